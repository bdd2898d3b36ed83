"""The acceptance battery, shared by ``dtmoments suite`` and the test suite.

Each ``criterion_*`` function returns one aggregate :class:`CheckReport`
whose ``details`` hold the individual reports.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Callable

from .brown import brown_radial_check, log_energy_mc, log_energy_target
from .fixedpoint import check_fixed_point, check_s_fixed_point
from .hankel import batch_condensation, batch_lemma57
from .moments import check_q_consistency, check_sniady
from .randmat import word_moment_mc
from .report import CheckReport, timer
from .spectral import check_rtransform, genfun_check, sniady_series_check

__all__ = ["DEFAULT_SEED", "CRITERIA", "SMOKE", "DESK", "run_criteria", "aggregate", "canonical_json"]

DEFAULT_SEED = 20240607


def aggregate(name: str, reports: list[CheckReport], tolerance: float | None = None, notes=None) -> CheckReport:
    """Combine sub-reports; numeric aggregates report the worst residual."""
    exact = all(r.exact for r in reports)
    ok = all(r.passed for r in reports)
    if exact:
        rep = CheckReport.exact_result(name, ok)
    else:
        residuals = [r.max_residual for r in reports if r.max_residual is not None]
        tol = tolerance if tolerance is not None else max((r.tolerance or 0.0) for r in reports)
        rep = CheckReport(name=name, passed=ok, exact=False, max_residual=max(residuals) if residuals else None, tolerance=tol)
    rep.details = [r.to_dict(include_timing=False) for r in reports]
    rep.notes = list(notes or [])
    rep.elapsed_ms = sum(r.elapsed_ms for r in reports)
    return rep


def criterion_1(**_) -> CheckReport:
    """Recursion integrals of ``P_{k,n}`` equal ``n^(nk)/(nk+1)!``."""
    return aggregate("c1_sniady_closed_form", [check_sniady(k_max=5, n_max=8, degree_max=40)])


def criterion_2(perturb=0, **_) -> CheckReport:
    return aggregate("c2_q_consistency", [check_q_consistency((0, Fraction(1, 2), 1, 3), 8, perturb=perturb)])


def criterion_3(**_) -> CheckReport:
    return aggregate("c3_rtransform", [check_rtransform((0, Fraction(1, 2), 1), order=10, oracle_n=6)])


def criterion_4(**_) -> CheckReport:
    reps = [
        genfun_check(k, s, x, tolerance=1e-9, tail_target=1e-11)
        for k in (1, 2, 3, 4)
        for s in (0.02, 0.05)
        for x in (0.0, 0.5, 1.0)
    ]
    return aggregate("c4_generating_function", reps, tolerance=1e-9)


def criterion_5(**_) -> CheckReport:
    reps = [
        check_fixed_point(k, mu, tolerance=1e-6, boundary_tolerance=1e-8)
        for k in (2, 3)
        for mu in (10, 10j, 15)
    ]
    return aggregate("c5_matrix_fixed_point", reps, tolerance=1e-6)


def criterion_6(**_) -> CheckReport:
    reps = [
        check_s_fixed_point(a, b, lam, sigma, tolerance=1e-8, constancy_tolerance=1e-12)
        for a, b, lam, sigma in ((2, 1, 1, -0.5), (2, 1, 0.3, -0.3), (1.5, 0.5, 0, -0.4))
    ]
    return aggregate("c6_s_fixed_point", reps, tolerance=1e-8)


def criterion_7(seed: int = DEFAULT_SEED, scale: float = 1.0, **_) -> CheckReport:
    matrices = max(1, int(1000 * scale))
    polys = max(1, int(200 * scale))
    reps = [batch_condensation(w, n, matrices, seed + 10 * n + (w == "B")) for w in "AB" for n in (3, 4, 5)]
    reps += [batch_lemma57(j, 10, polys, seed + j, random_degree=True) for j in (1, 2, 3)]
    return aggregate("c7_determinant_identities", reps)


def criterion_8(seed: int = DEFAULT_SEED, n: int = 200, trials: int = 2000, threads: int | None = None, **_) -> CheckReport:
    """Word moments of ``T^(n)``; the residual is ``|est - target| / tolerance``."""
    with timer() as clock:
        rows = []
        worst = 0.0
        ok = True
        for word, target in (("T*,T", 0.5), ("T*,T,T*,T", 2 / 3), ("T*,T*,T,T", 1 / 6)):
            est = word_moment_mc(word, n, trials, seed, threads=threads)
            tol = max(3 * est.stderr, 5.0 / n)
            err = abs(est.mean - target)
            rows.append({"word": word, "target": target, "estimate": est.to_dict(), "tolerance": tol, "error": err})
            worst = max(worst, err / tol)
            ok &= err <= tol
            if word == "T*,T":
                exact = (n - 1) / (2 * n)
                tol_exact = 3 * est.stderr
                err_exact = abs(est.mean - exact)
                rows.append({"identity": "E tr_n(T*T) = (n-1)/(2n)", "target": exact, "tolerance": tol_exact, "error": err_exact})
                worst = max(worst, err_exact / tol_exact)
                ok &= err_exact <= tol_exact
    rep = CheckReport(
        name="c8_mc_moments", passed=ok, exact=False, max_residual=worst, tolerance=1.0,
        params={"n": n, "trials": trials, "seed": seed}, details=rows,
        notes=["residual is the largest error / tolerance ratio"],
    )
    rep.elapsed_ms = clock[0]
    return rep


def criterion_9(seed: int = DEFAULT_SEED, n: int = 512, trials: int = 4, threads: int | None = None, **_) -> CheckReport:
    reps = [brown_radial_check(eps, n, trials, seed, threads) for eps in (1.0, 1.0 / (math.e - 1.0))]
    return aggregate("c9_brown_measure", reps, tolerance=0.08)


def criterion_10(seed: int = DEFAULT_SEED, pairs: int = 10**6, **_) -> CheckReport:
    with timer() as clock:
        rows = []
        worst = 0.0
        for radius in (1.0, 2.0):
            est = log_energy_mc(radius, pairs, seed)
            target = log_energy_target(radius)
            rel = abs(est.mean.real - target) / abs(target)
            worst = max(worst, rel)
            rows.append({"R": radius, "estimate": est.to_dict(), "target": target, "relative_error": rel})
    rep = CheckReport.numeric("c10_log_energy", worst, 0.02, params={"pairs": pairs, "seed": seed}, details=rows)
    rep.elapsed_ms = clock[0]
    return rep


def criterion_11(**_) -> CheckReport:
    return aggregate("c11_series_identity", [sniady_series_check(x, 40, 1e-14) for x in (Fraction(1, 4), Fraction(1))], tolerance=1e-14)


NUMERIC = ("4", "5", "6", "8", "9", "10", "11")


def canonical_json(report: CheckReport) -> str:
    """Machine-readable body with timing removed, for byte comparisons."""
    return json.dumps(report.to_dict(include_timing=False), sort_keys=True)


def criterion_12(first_run: dict[str, CheckReport] | None = None, seed: int = DEFAULT_SEED, threads: int | None = None, **kw) -> CheckReport:
    """Rerun every numeric criterion and compare the bodies byte for byte."""
    first_run = dict(first_run or {})
    with timer() as clock:
        rows = []
        ok = True
        for key in NUMERIC:
            func = CRITERIA[key]
            if key not in first_run:
                first_run[key] = func(seed=seed, threads=threads, **kw)
            again = func(seed=seed, threads=threads, **kw)
            same = canonical_json(first_run[key]) == canonical_json(again)
            ok &= same
            rows.append({"criterion": key, "identical": same})
    rep = CheckReport.exact_result("c12_determinism", ok, details=rows, params={"seed": seed})
    rep.elapsed_ms = clock[0]
    return rep


CRITERIA: dict[str, Callable[..., CheckReport]] = {
    "1": criterion_1,
    "2": criterion_2,
    "3": criterion_3,
    "4": criterion_4,
    "5": criterion_5,
    "6": criterion_6,
    "7": criterion_7,
    "8": criterion_8,
    "9": criterion_9,
    "10": criterion_10,
    "11": criterion_11,
    "12": criterion_12,
}

SMOKE = ("1", "2", "3", "7", "11")
DESK = tuple(CRITERIA)


def run_criteria(
    level: str = "desk",
    seed: int = DEFAULT_SEED,
    threads: int | None = None,
    perturb=0,
    progress: Callable[[CheckReport], None] | None = None,
) -> list[CheckReport]:
    """Run the battery. ``smoke`` keeps the exact checks, with small identity batches."""
    keys = SMOKE if level == "smoke" else DESK
    done: dict[str, CheckReport] = {}
    out = []
    for key in keys:
        if key == "12":
            rep = criterion_12(first_run={k: v for k, v in done.items() if k in NUMERIC}, seed=seed, threads=threads)
        elif key == "7" and level == "smoke":
            rep = criterion_7(seed=seed, scale=0.05)
        else:
            rep = CRITERIA[key](seed=seed, threads=threads, perturb=perturb)
        done[key] = rep
        out.append(rep)
        if progress is not None:
            progress(rep)
    return out
