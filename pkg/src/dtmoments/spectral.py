"""Lambert-W based functions and scalar free cumulants.

``rho`` is the principal inverse of ``w -> w e^{-w}``, i.e.
``rho(z) = -W0(-z)``. It generates the exponents of the moment
generating functions of ``(T*)^k T^k``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ConvergenceError, DomainError
from .exact import TruncatedSeries, as_fraction
from .moments import p_polys, q_polys, sniady_closed, tau_tlambda_closed
from .report import CheckReport, timer

__all__ = [
    "rho",
    "CoefficientFamily",
    "coefficient_family",
    "genfun_check",
    "genfun_auto_nmax",
    "resolvent_check_k1",
    "free_cumulants_from_moments",
    "noncrossing_cumulants",
    "noncrossing_partitions",
    "rtransform_taylor_tlambda",
    "check_rtransform",
    "sniady_series_check",
]

_INV_E = math.exp(-1.0)
_MAX_ITER = 50


def _rho_seeds(z: complex) -> list[complex]:
    """Starting points, most accurate first for the region of ``z``."""
    seeds = []
    if abs(z) < 0.25:
        seeds.append(z + z * z + 1.5 * z**3 + (8.0 / 3.0) * z**4)
    # expansion around the branch point 1/e, where w = 1
    p = cmath.sqrt(2.0 * (1.0 - math.e * z))
    branch = 1.0 - p + p * p / 3.0 - (11.0 / 72.0) * p**3
    middle = -cmath.log(1.0 - z)
    l1 = cmath.log(-z)
    asymptotic = -(l1 - cmath.log(l1)) if l1 != 0 else middle
    if abs(z - _INV_E) < 1.0:
        seeds += [branch, middle, asymptotic]
    elif abs(z) < 3.0:
        seeds += [middle, branch, asymptotic]
    else:
        seeds += [asymptotic, middle, branch]
    return seeds


def _is_principal(w: complex) -> bool:
    # W0 maps onto {|y| < pi, x > -y cot y}; here w = -W0(-z)
    x, y = -w.real, -w.imag
    if abs(y) >= math.pi:
        return False
    if abs(y) < 1e-300:
        return x >= -1.0 - 1e-7
    return x > -y / math.tan(y) - 1e-9


def _halley(z: complex, w: complex) -> complex:
    for _ in range(_MAX_ITER):
        e = cmath.exp(-w)
        g = w * e - z
        g1 = (1.0 - w) * e
        g2 = (w - 2.0) * e
        denom = 2.0 * g1 * g1 - g * g2
        if denom == 0:
            break
        step = 2.0 * g * g1 / denom
        w = w - step
        if abs(step) <= 1e-15 * max(1.0, abs(w)):
            break
    return w


def rho(z: complex) -> complex:
    """Principal solution ``w`` of ``w e^{-w} = z``.

    Halley iteration on ``g(w) = w e^{-w} - z``. The cut is the real ray
    ``[1/e, inf)``; points on it raise :class:`DomainError`.

    Examples
    --------
    >>> abs(rho(0.1) - 0.11183255915896297) < 1e-15
    True
    """
    z = complex(z)
    if not (cmath.isfinite(z)):
        raise DomainError("rho: argument must be finite")
    if z.imag == 0.0 and z.real >= _INV_E:
        raise DomainError(f"rho: z = {z.real!r} lies on the branch cut [1/e, inf)")
    if z == 0:
        return 0j
    tol = 1e-14 * max(1.0, abs(z))
    best = None
    for seed in _rho_seeds(z):
        w = _halley(z, seed)
        residual = abs(w * cmath.exp(-w) - z)
        if residual <= tol and _is_principal(w):
            if z.imag == 0.0:
                w = complex(w.real, 0.0)
            return w
        if best is None or residual < best:
            best = residual
    raise ConvergenceError(f"rho: no principal solution at z = {z} (best residual {best:.3e}) within {_MAX_ITER} iterations")


@dataclass(frozen=True)
class CoefficientFamily:
    """Exponents ``alpha_j = rho(s e^{2 pi i j/k})`` and weights ``gamma_j``.

    ``limit`` is true when the nodes collided (``s = 0`` or two ``alpha``
    closer than ``1e-9``) and the ``s -> 0`` family was substituted.
    """

    k: int
    s: complex
    alphas: tuple[complex, ...]
    gammas: tuple[complex, ...]
    limit: bool = False

    def moment_residuals(self) -> list[float]:
        """``|sum gamma_j - 1|`` followed by ``|sum gamma_j alpha_j^i|``, i = 1..k-1."""
        out = [abs(sum(self.gammas) - 1.0)]
        for i in range(1, self.k):
            out.append(abs(sum(g * a**i for g, a in zip(self.gammas, self.alphas))))
        return out

    def defining_residuals(self) -> list[float]:
        return [
            abs(a * cmath.exp(-a) - self.s * cmath.exp(2j * math.pi * j / self.k))
            for j, a in zip(range(1, self.k + 1), self.alphas)
        ]

    def exponential_residuals(self) -> list[float]:
        """Relative residual of ``e^{k alpha} = alpha^k / s^k``."""
        if self.limit:
            return [0.0] * self.k
        out = []
        for a in self.alphas:
            lhs = cmath.exp(self.k * a)
            rhs = (a / self.s) ** self.k
            out.append(abs(lhs - rhs) / max(abs(lhs), 1.0))
        return out

    def evaluate(self, x: float) -> complex:
        """``sum_j gamma_j e^{k alpha_j x}``."""
        return sum(g * cmath.exp(self.k * a * x) for g, a in zip(self.gammas, self.alphas))


def coefficient_family(k: int, s: complex) -> CoefficientFamily:
    if k < 1:
        raise DomainError("k must be >= 1")
    s = complex(s)
    if abs(s) >= _INV_E:
        raise DomainError(f"|s| = {abs(s):.6g} must be < 1/e")
    if s == 0:
        return CoefficientFamily(k, s, (0j,) * k, (1.0 / k + 0j,) * k, limit=True)
    alphas = tuple(rho(s * cmath.exp(2j * math.pi * j / k)) for j in range(1, k + 1))
    gap = min((abs(alphas[l] - alphas[j]) for j in range(k) for l in range(k) if l != j), default=math.inf)
    if gap < 1e-9:
        return CoefficientFamily(k, s, (0j,) * k, (1.0 / k + 0j,) * k, limit=True)
    gammas = []
    for j in range(k):
        prod = 1.0 + 0j
        for l in range(k):
            if l != j:
                prod *= alphas[l] / (alphas[l] - alphas[j])
        gammas.append(prod)
    return CoefficientFamily(k, s, alphas, tuple(gammas))


def genfun_auto_nmax(k: int, s: complex, tail_target: float = 1e-11, limit: int = 200) -> int:
    """Smallest ``n_max`` whose certified tail is below ``tail_target``."""
    q = (math.e * abs(s)) ** k
    if q >= 1:
        raise DomainError(f"|s| = {abs(s):.4g} too large for a certified tail at k = {k}")
    term = 1.0
    for n in range(limit + 1):
        if term * q / (1 - q) < tail_target:
            return max(n, 1)
        term *= q
    raise DomainError("no n_max within limit reaches the tail target")


def genfun_check(
    k: int,
    s: complex,
    x: float,
    n_max: int | None = None,
    tolerance: float = 1e-9,
    tail_target: float = 1e-11,
) -> CheckReport:
    """Compare ``sum_n (ks)^{nk} P_{k,n}(x)`` with ``sum_j gamma_j e^{k alpha_j x}``.

    Tail certificate: ``|P_{k,n}(x)| <= P_{k,n}(1)`` on [0, 1] and
    ``|ks|^{(n+1)k} P_{k,n+1}(1) <= (e|s|)^k |ks|^{nk} P_{k,n}(1)``, so the
    tail after ``n_max`` is at most ``t_{n_max} q / (1-q)`` with
    ``q = (e|s|)^k`` and ``t_n`` the last included bound term.
    """
    s = complex(s)
    params = {"k": k, "s": s, "x": x}
    with timer() as clock:
        if n_max is None:
            n_max = genfun_auto_nmax(k, s, tail_target)
        params["n_max"] = n_max
        table = p_polys(k, n_max, max_degree=max(48, n_max * k))
        base = (k * s) ** k
        lhs = 0j
        power = 1.0 + 0j
        for n, p in enumerate(table.polys):
            lhs += power * p(float(x))
            if n < n_max:
                power *= base
        last = abs(base) ** n_max * float(table.polys[n_max](Fraction(1)))
        q = (math.e * abs(s)) ** k
        tail = last * q / (1 - q) if q < 1 else math.inf
        fam = coefficient_family(k, s)
        rhs = fam.evaluate(x)
        residual = abs(lhs - rhs)
    notes = ["limit family substituted (coinciding nodes)"] if fam.limit else []
    rep = CheckReport.numeric(
        "genfun",
        residual,
        tolerance,
        params=params,
        notes=notes,
        details=[{"lhs": lhs, "rhs": rhs, "tail_bound": tail, "tail_ok": tail < tail_target}],
    )
    rep.passed = rep.passed and tail < tail_target
    rep.elapsed_ms = clock[0]
    return rep


def resolvent_check_k1(
    sigma: complex,
    lambda_sq: float,
    x: float,
    n_max: int = 60,
    tolerance: float = 1e-10,
) -> CheckReport:
    """Check the k = 1 resolvent series of ``T_lam* T_lam``.

    With ``1/mu^2 = sigma e^{-sigma} / (1 + lambda_sq sigma)``:
    ``sum_n mu^{-2(n+1)} Q_n(x) = sigma e^{sigma(x-1)}`` and
    ``sum_n mu^{-2(n+1)} tau_n = 1 - e^{-sigma}``.
    """
    sigma = complex(sigma)
    lam2 = float(lambda_sq)
    if sigma == 0:
        raise DomainError("sigma = 0 is excluded")
    if lam2 > 0 and abs(sigma + 1.0 / lam2) < 1e-15:
        raise DomainError("sigma = -1/lambda_sq is excluded")
    params = {"sigma": sigma, "lambda_sq": lam2, "x": x, "n_max": n_max}
    with timer() as clock:
        t = sigma * cmath.exp(-sigma) / (1.0 + lam2 * sigma)
        table = q_polys(as_fraction(lambda_sq), n_max)
        series = 0j
        series_tau = 0j
        power = t
        terms = []
        for n, (p, tau) in enumerate(zip(table.polys, table.taus)):
            term = power * p(float(x))
            series += term
            series_tau += power * float(tau)
            terms.append(abs(term))
            power *= t
        target = sigma * cmath.exp(sigma * (x - 1.0))
        target_tau = 1.0 - cmath.exp(-sigma)
        res_d = abs(series - target)
        res_tau = abs(series_tau - target_tau)
        ratio = terms[-1] / terms[-2] if len(terms) > 1 and terms[-2] > 0 else 0.0
        tail = terms[-1] * ratio / (1 - ratio) if ratio < 1 else math.inf
    rep = CheckReport.numeric(
        "resolvent_k1",
        max(res_d, res_tau),
        tolerance,
        params=params,
        details=[
            {"series": series, "target": target, "residual": res_d},
            {"series_tau": series_tau, "target_tau": target_tau, "residual": res_tau},
            {"tail_estimate": tail, "mu_inv_sq": t},
        ],
        notes=["tail estimated from the ratio of the last two terms"],
    )
    rep.elapsed_ms = clock[0]
    return rep


def free_cumulants_from_moments(m: Sequence) -> list[Fraction]:
    """Free cumulants ``kappa_1..kappa_N`` from moments ``m_1..m_N``.

    With ``M(z) = sum m_n z^n`` and ``C(z) = 1 + sum kappa_n z^n`` the
    moment-cumulant relation is ``C(z (1 + M(z))) = 1 + M(z)``, hence
    ``C = (1 + M) o psi^{<-1>}`` with ``psi(z) = z (1 + M(z))``.
    """
    if len(m) == 0:
        raise DomainError("moment list is empty")
    N = len(m)
    M = TruncatedSeries([0] + [as_fraction(v) for v in m], N)
    one_plus_m = M + 1
    psi = one_plus_m.mul_z()
    C = one_plus_m.compose(psi.reversion())
    return list(C.coeffs[1:])


def _set_partitions(n: int):
    """All set partitions of ``range(n)`` as lists of blocks."""
    if n == 0:
        yield []
        return
    for part in _set_partitions(n - 1):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [n - 1]] + part[i + 1 :]
        yield part + [[n - 1]]


def _is_noncrossing(part: list[list[int]]) -> bool:
    label = {}
    for b, block in enumerate(part):
        for e in block:
            label[e] = b
    n = len(label)
    for a in range(n):
        for b in range(a + 1, n):
            if label[a] == label[b]:
                continue
            for c in range(b + 1, n):
                if label[c] != label[a]:
                    continue
                for d in range(c + 1, n):
                    if label[d] == label[b]:
                        return False
    return True


def noncrossing_partitions(n: int) -> list[list[list[int]]]:
    return [p for p in _set_partitions(n) if _is_noncrossing(p)]


def noncrossing_cumulants(m: Sequence, n_max: int | None = None) -> list[Fraction]:
    """Brute-force cumulants: ``kappa_n = m_n - sum_{pi != 1_n} prod kappa_|B|``."""
    n_max = len(m) if n_max is None else n_max
    if n_max > 8:
        raise DomainError("partition oracle is limited to n <= 8")
    kappa: list[Fraction] = []
    for n in range(1, n_max + 1):
        acc = as_fraction(m[n - 1])
        for part in noncrossing_partitions(n):
            if len(part) == 1:
                continue
            prod = Fraction(1)
            for block in part:
                prod *= kappa[len(block) - 1]
            acc -= prod
        kappa.append(acc)
    return kappa


def rtransform_taylor_tlambda(lambda_sq, order: int) -> list[Fraction]:
    """Coefficients ``kappa_1..kappa_order`` of ``z R(z)`` for ``T_lam* T_lam``.

    ``R(z) = -1/((1-z) log(1-z)) - 1/z + lambda_sq/(1-z)``. Writing
    ``-log(1-z) = z h(z)`` gives ``z R(z) = 1/((1-z) h(z)) - 1 + lambda_sq z/(1-z)``;
    the constant term must cancel exactly.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    lam2 = as_fraction(lambda_sq)
    h = TruncatedSeries([Fraction(1, n + 1) for n in range(order + 1)], order)
    one_minus_z = TruncatedSeries([1, -1], order)
    zr = TruncatedSeries.one(order) / (one_minus_z * h) - 1
    if zr[0] != 0:
        raise ArithmeticError(f"pole cancellation failed: constant term {zr[0]}")
    zr = zr + TruncatedSeries.geometric(order).mul_z() * lam2
    return list(zr.coeffs[1:])


def check_rtransform(lambda_sqs=(0, Fraction(1, 2), 1), order: int = 10, oracle_n: int = 6) -> CheckReport:
    """Cumulants from moments vs the closed-form Taylor coefficients and the partition oracle."""
    with timer() as clock:
        details = []
        ok = True
        for lam2 in lambda_sqs:
            m = [tau_tlambda_closed(n, lam2) for n in range(1, order + 1)]
            kappa = free_cumulants_from_moments(m)
            closed = rtransform_taylor_tlambda(lam2, order)
            oracle = noncrossing_cumulants(m[:oracle_n])
            eq_closed = kappa == closed
            eq_oracle = kappa[:oracle_n] == oracle
            ok &= eq_closed and eq_oracle
            details.append({
                "lambda_sq": as_fraction(lam2),
                "cumulants": kappa,
                "closed_form": closed,
                "matches_closed_form": eq_closed,
                "matches_partition_oracle": eq_oracle,
            })
    rep = CheckReport.exact_result(
        "rtransform_tlambda", ok, details=details,
        params={"lambda_sq": [as_fraction(v) for v in lambda_sqs], "order": order, "oracle_n": oracle_n},
    )
    rep.elapsed_ms = clock[0]
    return rep


def sniady_series_check(x: float, n_terms: int = 40, tolerance: float = 1e-14) -> CheckReport:
    """``sum_k sniady_closed(k, 1) x^k`` against ``(e^x - 1)/x``.

    ``sniady_closed(k, 1) = 1/(k+1)!``; the partial sum is accumulated
    exactly and rounded once.
    """
    with timer() as clock:
        xq = as_fraction(x)
        partial = sum((sniady_closed(k, 1) * xq**k for k in range(n_terms + 1)), Fraction(0))
        xf = float(x)
        closed = math.expm1(xf) / xf if xf != 0 else 1.0
        residual = abs(float(partial) - closed)
        tail = abs(xf) ** (n_terms + 1) / math.factorial(n_terms + 2) * 2
    rep = CheckReport.numeric(
        "series_exp_identity", residual, tolerance,
        params={"x": xq, "n_terms": n_terms},
        details=[{"partial_sum": float(partial), "closed": closed, "tail_bound": tail}],
    )
    rep.elapsed_ms = clock[0]
    return rep
