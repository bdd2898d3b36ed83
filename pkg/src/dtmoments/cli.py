"""Command-line entry point: ``dtmoments <subcommand> [options]``.

Every run prints its resolved configuration followed by one or more check
reports. Exit status is 0 when every check passes, 1 when one fails and 2
on usage or domain errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import acceptance
from .brown import (
    brown_grid_density,
    brown_radial_check,
    density_variation,
    disk_radius,
    entropy_bound,
    log_energy_mc,
    log_energy_target,
    pooled_eigenvalues,
    sample_t_plus_y,
)
from .errors import ConfigurationError, ConvergenceError, DomainError, SingularityError

from .fixedpoint import check_fixed_point, check_s_fixed_point, default_grid
from .hankel import batch_condensation, batch_lemma57
from .moments import f_polys, p_polys, q_polys, sniady_closed, tau_tlambda_closed
from .randmat import parse_models, resolvent_norm_checks, word_moment_mc
from .report import CheckReport, jsonable, timer
from .spectral import (
    free_cumulants_from_moments,
    genfun_check,
    noncrossing_cumulants,
    resolvent_check_k1,
    rtransform_taylor_tlambda,
)

__all__ = ["main", "build_parser", "resolve_seed", "render", "SEED_ENV"]

SEED_ENV = "DTMOMENTS_SEED"
CSV_COLUMNS = ("name", "pass", "exact", "applicable", "max_residual", "tolerance", "params", "details", "notes", "config")


# argument parsing helpers

def _complex(text: str) -> complex:
    """``"RE,IM"`` or a single real number."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational such as 3 or 1/2, got {text!r}") from None


def _key_values(text: str) -> dict:
    """``"lam=0.3,d=1,c=1"``; values accept ``RE`` or ``RE:IM``."""
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        key, val = item.split("=", 1)
        try:
            re_, _, im = val.partition(":")
            out[key.strip()] = complex(float(re_), float(im)) if im else float(re_)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad value in {item!r}") from None
    return out


def resolve_seed(seed: int | None, default: int = 0) -> tuple[int, str]:
    """Seed from the flag, then ``$DTMOMENTS_SEED``, then ``default``.

    A resolved value of 0 draws a fresh 64-bit seed from OS entropy; the
    second element names the source so the output header can echo it.
    """
    source = "flag"
    if seed is None:
        env = os.environ.get(SEED_ENV)
        if env:
            try:
                seed, source = int(env), "env"
            except ValueError:
                raise ConfigurationError(f"{SEED_ENV}={env!r} is not an integer") from None
        else:
            seed, source = default, "default"
    if seed < 0 or seed >= 2**64:
        raise ConfigurationError("seed must be in [0, 2^64)")
    if seed == 0:
        seed = int(np.random.SeedSequence().entropy) % (2**64 - 1) + 1
        source = "entropy"
    return seed, source


# subcommands; each returns a list of CheckReports


def _cmd_moments(args, cfg):
    kind = args.kind
    if kind == "q":
        table = q_polys(args.lambda_sq, args.nmax)
        closed = [Fraction(1)] + [tau_tlambda_closed(n, args.lambda_sq) for n in range(1, args.nmax + 1)]
    elif kind == "p":
        table = p_polys(args.k, args.nmax, max_k=args.max_k, max_degree=args.max_degree)
        closed = [sniady_closed(args.k, n) for n in range(args.nmax + 1)]
    else:
        table = f_polys(args.a, args.b, args.nmax)
        closed = None
    rows = table.rows()
    ok = True
    if closed is not None:
        for row, tau, c in zip(rows, table.taus, closed):
            row["closed_form"] = c
            row["equal"] = tau == c
            ok &= tau == c
    rep = CheckReport.exact_result(f"moments_{kind}", ok, details=rows, params=table.params)
    if closed is None:
        rep.notes.append("no closed form for the F family; table only")
    return [rep]


def _cmd_sniady(args, cfg):
    table = p_polys(args.k, args.n, max_k=args.max_k, max_degree=args.max_degree)
    value = sniady_closed(args.k, args.n)
    rec = table.taus[args.n]
    return [CheckReport.exact_result(
        "sniady", rec == value, params={"k": args.k, "n": args.n},
        details=[{"value": value, "recursion": rec, "float": float(value)}],
    )]


def _cmd_cumulants(args, cfg):
    m = [tau_tlambda_closed(n, args.lambda_sq) for n in range(1, args.order + 1)]
    kappa = free_cumulants_from_moments(m)
    closed = rtransform_taylor_tlambda(args.lambda_sq, args.order)
    oracle_n = min(args.order, 8)
    oracle = noncrossing_cumulants(m[:oracle_n])
    ok = kappa == closed and kappa[:oracle_n] == oracle
    rows = [
        {"n": i + 1, "moment": m[i], "cumulant": kappa[i], "closed_form": closed[i], "partition_oracle": oracle[i] if i < oracle_n else None}
        for i in range(args.order)
    ]
    return [CheckReport.exact_result("cumulants", ok, details=rows, params={"lambda_sq": args.lambda_sq, "order": args.order})]


def _cmd_genfun(args, cfg):
    return [genfun_check(args.k, args.s, args.x, n_max=args.nmax, tolerance=_tol(args, 1e-9))]


def _cmd_resolvent_k1(args, cfg):
    return [resolvent_check_k1(args.sigma, float(args.lambda_sq), args.x, n_max=args.nmax, tolerance=_tol(args, 1e-10))]


def _cmd_fixedpoint(args, cfg):
    return [check_fixed_point(
        args.k, args.mu, default_grid(args.grid), tolerance=_tol(args, 1e-6),
        boundary_tolerance=args.boundary_tol, mu0=args.mu0,
    )]


def _cmd_s_fixedpoint(args, cfg):
    return [check_s_fixed_point(args.a, args.b, args.lam, args.sigma, default_grid(args.grid), tolerance=_tol(args, 1e-8))]


def _cmd_hankel(args, cfg):
    return [batch_condensation(args.which, args.n, args.trials, cfg["seed"])]


def _cmd_lemma57(args, cfg):
    return [batch_lemma57(args.j, args.deg, args.trials, cfg["seed"], random_degree=args.random_degree)]


def _cmd_mc_word(args, cfg):
    models = parse_models(args.models)
    with timer() as clock:
        est = word_moment_mc(args.word, args.n, args.trials, cfg["seed"], models, threads=args.threads)
    params = {"word": args.word, "n": args.n, "trials": args.trials, "models": args.models or "default"}
    details = [{"estimate": est.to_dict()}]
    if args.target is None:
        rep = CheckReport(name="mc_word", passed=True, exact=False, params=params, details=details, notes=["no target given; estimate only"])
    else:
        tol = _tol(args, max(3 * est.stderr, 5.0 / args.n))
        rep = CheckReport.numeric("mc_word", abs(est.mean - args.target), tol, params={**params, "target": args.target}, details=details)
    rep.elapsed_ms = clock[0]
    return [rep]


def _cmd_brown(args, cfg):
    with timer() as clock:
        eigs = pooled_eigenvalues(args.epsilon, args.n, args.trials, cfg["seed"], args.threads)
    rep = brown_radial_check(args.epsilon, args.n, args.trials, cfg["seed"], eigs=eigs, ks_tolerance=_tol(args, 0.08))
    rep.elapsed_ms += clock[0]
    out = [rep]
    if args.eig_csv:
        with open(args.eig_csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["re", "im"])
            for z in eigs:
                w.writerow([repr(float(z.real)), repr(float(z.imag))])
        rep.notes.append(f"eigenvalues written to {args.eig_csv}")
    if args.grid:
        radius = disk_radius(args.epsilon)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg["seed"]).spawn(1)[0]))
        m = sample_t_plus_y(args.n, args.epsilon, rng)
        with timer() as clock:
            dens = brown_grid_density(m, 0j, 2 * radius, args.grid, args.alpha)
        cv = density_variation(dens, 0.7 * radius)
        grid_rep = CheckReport.numeric(
            "brown_grid_density", cv, 0.2,
            params={"epsilon": args.epsilon, "n": args.n, "resolution": args.grid, "alpha": args.alpha},
            details=[{"total_mass": dens.mass, "variation_within_0.7R": cv}],
            notes=["residual: coefficient of variation of the density inside 0.7R"] + dens.warnings,
        )
        grid_rep.passed = grid_rep.passed and 0.95 <= dens.mass <= 1.05
        grid_rep.elapsed_ms = clock[0]
        out.append(grid_rep)
    return out


def _cmd_log_energy(args, cfg):
    with timer() as clock:
        est = log_energy_mc(args.r, args.pairs, cfg["seed"])
        target = log_energy_target(args.r)
        rel = abs(est.mean.real - target) / abs(target) if target else abs(est.mean.real)
    rep = CheckReport.numeric(
        "log_energy", rel, _tol(args, 0.02), params={"R": args.r, "pairs": args.pairs},
        details=[{"estimate": est.to_dict(), "target": target}],
        notes=["residual is relative to the target" if target else "target is 0: residual is absolute"],
    )
    rep.elapsed_ms = clock[0]
    return [rep]


def _cmd_entropy(args, cfg):
    res = entropy_bound(args.epsilon)
    rep = CheckReport.numeric(
        "entropy_bound", abs(res["gap"] - 1.25), _tol(args, 1e-12), params={"epsilon": args.epsilon},
        details=[res], notes=["residual: distance of (generic bound - closed form) from 5/4"],
    )
    return [rep]


def _cmd_resolvent(args, cfg):
    return [resolvent_norm_checks(args.model, args.params, args.n, args.trials, cfg["seed"], n_max=args.nmax, threads=args.threads)]


def _cmd_suite(args, cfg):
    perturb = 1 if args.inject else 0
    progress = None
    if args.progress:
        progress = lambda r: print(r.summary_line(), file=sys.stderr, flush=True)
    return acceptance.run_criteria(args.level, cfg["seed"], args.threads, perturb=perturb, progress=progress)


def _tol(args, default: float) -> float:
    return default if getattr(args, "tol", None) is None else args.tol


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    common.add_argument("--seed", type=int, default=None, help=f"0 draws from OS entropy; default from ${SEED_ENV}")
    common.add_argument("--threads", type=int, default=None, help="worker cap (default: all cores)")
    common.add_argument("--tol", type=float, default=None, help="override the main tolerance")
    common.add_argument("--timing", action="store_true", help="include elapsed_ms (breaks byte-identical reruns)")

    parser = argparse.ArgumentParser(prog="dtmoments", description="Moment, fixed-point and spectral checks for DT-operators.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("moments", _cmd_moments, "moment polynomial tables (Q, P or F family)")
    p.add_argument("--kind", choices=("q", "p", "f"), default="q")
    p.add_argument("--lambda-sq", type=_rational, default=Fraction(0))
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--a", type=_rational, default=Fraction(1))
    p.add_argument("--b", type=_rational, default=Fraction(0))
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--max-degree", type=int, default=None)

    p = add("sniady", _cmd_sniady, "tau(((T*)^k T^k)^n) exactly")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--max-degree", type=int, default=None)

    p = add("cumulants", _cmd_cumulants, "free cumulants of T_lam* T_lam")
    p.add_argument("--lambda-sq", type=_rational, default=Fraction(0))
    p.add_argument("--order", type=int, default=10)

    p = add("genfun", _cmd_genfun, "moment generating function against its exponential closed form")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=_complex, required=True)
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--nmax", type=int, default=None)

    p = add("resolvent-k1", _cmd_resolvent_k1, "k = 1 resolvent series of T_lam* T_lam")
    p.add_argument("--sigma", type=_complex, required=True)
    p.add_argument("--lambda-sq", type=_rational, default=Fraction(0))
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--nmax", type=int, default=60)

    p = add("fixedpoint", _cmd_fixedpoint, "(k+1)x(k+1) matrix fixed point")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu", type=_complex, required=True)
    p.add_argument("--grid", type=int, default=21)
    p.add_argument("--mu0", type=float, default=None)
    p.add_argument("--boundary-tol", type=float, default=1e-8)

    p = add("s-fixedpoint", _cmd_s_fixedpoint, "2x2 fixed point for S - lambda")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=_complex, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--grid", type=int, default=21)

    p = add("hankel", _cmd_hankel, "determinant condensation identities on random rational matrices")
    p.add_argument("--which", type=str.upper, choices=("A", "B"), required=True)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--trials", type=int, default=100)

    p = add("lemma57", _cmd_lemma57, "Hankel-determinant identities on random polynomials")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--deg", type=int, default=6)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--random-degree", action="store_true", help="draw each degree from 0..deg")

    p = add("mc-word", _cmd_mc_word, "Monte-Carlo trace of a word in random matrices")
    p.add_argument("--word", required=True, help='comma separated letters, e.g. "T*,T"')
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--models", default=None, help='e.g. "T=ut,Y=ginibre,S=s(2;1)"')
    p.add_argument("--target", type=_complex, default=None)

    p = add("brown", _cmd_brown, "eigenvalues of T + sqrt(eps) Y against the uniform disk")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--trials", type=int, default=4)
    p.add_argument("--grid", type=int, default=0, help="also estimate the regularized density on RES x RES points")
    p.add_argument("--alpha", type=float, default=1e-2)
    p.add_argument("--eig-csv", default=None, help="write pooled eigenvalues (re, im) to this file")

    p = add("log-energy", _cmd_log_energy, "Monte-Carlo log-energy of the uniform disk")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--pairs", type=int, default=10**6)

    p = add("entropy", _cmd_entropy, "entropy upper bound for T + sqrt(eps) Y")
    p.add_argument("--epsilon", type=float, required=True)

    p = add("resolvent", _cmd_resolvent, "Monte-Carlo norm of a truncated resolvent series")
    p.add_argument("--model", choices=("t", "dtc", "s"), required=True)
    p.add_argument("--params", type=_key_values, default={}, help='e.g. "lam=0.3,d=1,c=1" (complex as RE:IM)')
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--nmax", type=int, default=60)

    p = add("suite", _cmd_suite, "run the acceptance battery")
    p.add_argument("--level", choices=("smoke", "desk"), default="smoke")
    p.add_argument("--inject", action="store_true", help="perturb lambda^2 by 1 in the Q recursion; must fail")
    p.add_argument("--progress", action="store_true", help="print one line per criterion to stderr as it finishes")
    return parser


# output


def _config(args, seed: int, source: str) -> dict:
    skip = {"func", "format", "timing", "progress", "eig_csv"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip and k not in ("seed", "threads", "command")}
    return {
        "subcommand": args.command,
        "params": jsonable(params),
        "seed": seed,
        "seed_source": source,
        "format": args.format,
        "threads": args.threads,
    }


def render(config: dict, reports: list[CheckReport], fmt: str = "json", timing: bool = False) -> str:
    """Serialize a run. JSON and CSV are canonical (sorted keys, LF endings)."""
    bodies = [r.to_dict(include_timing=timing) for r in reports]
    ok = all(r.passed for r in reports)
    if fmt == "json":
        return json.dumps({"config": config, "pass": ok, "reports": bodies}, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS + (("elapsed_ms",) if timing else ()))
        cfg = json.dumps(config, sort_keys=True, separators=(",", ":"))
        for body in bodies:
            row = [_csv_cell(body[c]) for c in CSV_COLUMNS[:-1]] + [cfg]
            if timing:
                row.append(repr(body["elapsed_ms"]))
            w.writerow(row)
        return buf.getvalue()
    lines = [f"# {config['subcommand']}  seed={config['seed']} ({config['seed_source']})  params={json.dumps(config['params'], sort_keys=True)}"]
    for r in reports:
        lines.append(r.summary_line() if timing else r.summary_line().rsplit(" (", 1)[0])
        for note in r.notes:
            lines.append(f"    note: {note}")
        for d in r.details[:20]:
            lines.append("    " + json.dumps(jsonable(d), sort_keys=True))
        if len(r.details) > 20:
            lines.append(f"    ... {len(r.details) - 20} more rows")
    lines.append("PASS" if ok else "FAIL: " + ", ".join(r.name for r in reports if not r.passed))
    return "\n".join(lines) + "\n"


def _csv_cell(value) -> str:
    """Scalars verbatim; containers as compact JSON, so ``"num/den"`` strings survive."""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (int, float)):
        return repr(value)
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    default_seed = acceptance.DEFAULT_SEED if args.command == "suite" else 0
    try:
        seed, source = resolve_seed(args.seed, default_seed)
        config = _config(args, seed, source)
        reports = args.func(args, config)
    except (DomainError, ConfigurationError) as exc:
        print(f"dtmoments {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (SingularityError, ConvergenceError) as exc:
        # a numerical breakdown is a failed check, not a usage error
        reports = [CheckReport(name=args.command, passed=False, exact=False, notes=[f"{type(exc).__name__}: {exc}"])]
    sys.stdout.write(render(config, reports, args.format, args.timing))
    failed = [r for r in reports if not r.passed]
    if failed:
        print(f"dtmoments {args.command}: failing checks: {', '.join(r.name for r in failed)}", file=sys.stderr)
        for r in failed:
            case = _first_failing_case(r.details)
            if case is not None:
                print(f"  {r.name}: first failing case {json.dumps(jsonable(case), sort_keys=True)}", file=sys.stderr)
        return 1
    return 0


def _first_failing_case(details):
    """Depth-first search for the first record flagged as not passing."""
    for d in details:
        if not isinstance(d, dict):
            continue
        for key in ("equal", "pass", "identical"):
            if d.get(key) is False:
                inner = _first_failing_case(d.get("details", []))
                return inner if inner is not None else d
    return None


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
