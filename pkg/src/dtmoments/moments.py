"""Exact moment polynomials and their scalar moments.

Three families are built by recursion over :class:`ExactPoly`:

* ``Q_n`` for ``T_lam = T - lam 1``:
  ``Q_{n+1}(x) = |lam|^2 Q_n(x+1) + int_0^x Q_n(y+1) dy``.
* ``P_{k,n}`` for the words ``((T*)^k T^k)^n``: the k-fold antiderivative
  (all lower derivatives zero at 0) of ``P_{k,n-1}(x+1)``.
* ``F_n`` for ``S = sqrt(a) T1 + sqrt(b) T2*``:
  ``F_n = a L*(F_{n-1}) + b L(F_{n-1})`` with ``L*(f) = int_0^x f`` and
  ``L(f) = int_x^1 f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import DomainError
from .exact import ExactPoly, as_fraction
from .report import CheckReport, timer

__all__ = [
    "MomentTable",
    "DEFAULT_MAX_K",
    "DEFAULT_MAX_DEGREE",
    "q_polys",
    "tau_tlambda_closed",
    "p_polys",
    "sniady_closed",
    "f_polys",
    "genfun_fab_check",
    "check_q_consistency",
    "check_sniady",
]

DEFAULT_MAX_K = 6
DEFAULT_MAX_DEGREE = 48


@dataclass(frozen=True)
class MomentTable:
    """Polynomials ``polys[n]`` and their integrals ``taus[n]`` over [0, 1].

    ``kind`` is one of ``"q"``, ``"p"``, ``"f"``; ``params`` holds the
    defining parameters (``lambda_sq``, ``k`` or ``a``/``b``).
    """

    kind: str
    params: dict
    polys: tuple[ExactPoly, ...]
    taus: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.polys)

    def rows(self) -> list[dict]:
        """One JSON-ready row per n."""
        return [
            {
                "n": n,
                "coeffs": p.to_json(),
                "tau": f"{t.numerator}/{t.denominator}",
                "tau_float": float(t),
            }
            for n, (p, t) in enumerate(zip(self.polys, self.taus))
        ]


def _table(kind: str, params: dict, polys: list[ExactPoly]) -> MomentTable:
    return MomentTable(kind, params, tuple(polys), tuple(p.defint01() for p in polys))


def q_polys(lambda_sq, n_max: int) -> MomentTable:
    """``E_D((T_lam* T_lam)^n) = Q_n`` for ``n = 0..n_max``.

    Examples
    --------
    >>> t = q_polys(0, 2)
    >>> [p.coeffs for p in t.polys][2]
    (Fraction(0, 1), Fraction(1, 1), Fraction(1, 2))
    """
    lam2 = as_fraction(lambda_sq)
    if lam2 < 0:
        raise DomainError("lambda_sq must be >= 0")
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    polys = [ExactPoly([1])]
    for _ in range(n_max):
        shifted = polys[-1].shift(1)
        polys.append(shifted * lam2 + shifted.antiderivative())
    return _table("q", {"lambda_sq": lam2}, polys)


def tau_tlambda_closed(n: int, lambda_sq) -> Fraction:
    """``sum_{k=0}^n n^k/(k+1)! C(n,k) lambda_sq^(n-k)``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    lam2 = as_fraction(lambda_sq)
    return sum(
        (Fraction(n**k, factorial(k + 1)) * comb(n, k) * lam2 ** (n - k) for k in range(n + 1)),
        Fraction(0),
    )


def _check_caps(k: int, n_max: int, max_k: int | None, max_degree: int | None) -> None:
    max_k = DEFAULT_MAX_K if max_k is None else max_k
    max_degree = DEFAULT_MAX_DEGREE if max_degree is None else max_degree
    if k > max_k:
        raise DomainError(f"k={k} exceeds the cap {max_k} (override with max_k)")
    if n_max * k > max_degree:
        raise DomainError(f"degree n*k={n_max * k} exceeds the cap {max_degree} (override with max_degree)")


def p_polys(k: int, n_max: int, *, max_k: int | None = None, max_degree: int | None = None) -> MomentTable:
    """``E_D(((T*)^k T^k)^n) = P_{k,n}`` for ``n = 0..n_max``."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    _check_caps(k, n_max, max_k, max_degree)
    polys = [ExactPoly([1])]
    for _ in range(n_max):
        p = polys[-1].shift(1)
        for _ in range(k):
            p = p.antiderivative()
        polys.append(p)
    return _table("p", {"k": k}, polys)


def sniady_closed(k: int, n: int) -> Fraction:
    """``n^(nk) / (nk+1)!``; at ``n = 0`` the empty word gives 1."""
    if k < 0 or n < 0:
        raise DomainError("k and n must be >= 0")
    return Fraction(n ** (n * k), factorial(n * k + 1))


def f_polys(a, b, n_max: int) -> MomentTable:
    """``F_n = E_D((S*)^n S^n)`` by ``F_n = a L*(F_{n-1}) + b L(F_{n-1})``."""
    a = as_fraction(a)
    b = as_fraction(b)
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    polys = [ExactPoly([1])]
    for _ in range(n_max):
        prev = polys[-1]
        lower = prev.antiderivative()
        upper = ExactPoly([prev.defint01()]) - lower
        polys.append(lower * a + upper * b)
    return _table("f", {"a": a, "b": b}, polys)


def fab_closed(a: float, b: float, t: float) -> float:
    """``(1/t) (e^{(a-b)t} - 1) / (a - b e^{(a-b)t})``, equal to 1 at ``t = 0``."""
    if t == 0:
        return 1.0
    d = a - b
    if d == 0:
        # limit b -> a: (e^{dt}-1)/(a-be^{dt}) -> t/(1-at)
        return 1.0 / (1.0 - a * t)
    e = math.expm1(d * t)
    return e / (t * (d - b * e))


def genfun_fab_check(a, b, t, n_max: int, tolerance: float = 1e-9) -> CheckReport:
    """Compare ``sum_n t^n tau(F_n)`` with its closed form.

    The tail after ``n_max`` is bounded by ``q^{n_max+1}/(1-q)`` with
    ``q = |t| max(a, b)``, because ``tau(F_n) <= max(a, b)^n`` for
    ``a, b >= 0``. Outside ``|b (e^{(a-b)t}-1)/(a-b)| < 1`` the check is
    flagged not applicable.
    """
    name = "genfun_fab"
    a_q, b_q, t_q = as_fraction(a), as_fraction(b), as_fraction(t)
    params = {"a": a_q, "b": b_q, "t": t_q, "n_max": n_max}
    with timer() as clock:
        af, bf, tf = float(a_q), float(b_q), float(t_q)
        if tf == 0:
            table = f_polys(a_q, b_q, 0)
            lhs = table.taus[0]
            rep = CheckReport.numeric(
                name, abs(float(lhs) - 1.0), tolerance, params=params,
                notes=["t = 0: constant terms compared"],
            )
            rep.elapsed_ms = clock[0]
            return rep
        d = af - bf
        ratio = abs(bf * math.expm1(d * tf) / d) if d != 0 else abs(bf * tf)
        q = abs(tf) * max(abs(af), abs(bf))
        if ratio >= 1 or q >= 1 or af < 0 or bf < 0:
            return CheckReport.not_applicable(
                name, f"divergent regime: |b(e^((a-b)t)-1)/(a-b)| = {ratio:.4g}, q = {q:.4g}", params=params
            )
        table = f_polys(a_q, b_q, n_max)
        series = sum((t_q**n * tau for n, tau in enumerate(table.taus)), Fraction(0))
        closed = fab_closed(af, bf, tf)
        residual = abs(float(series) - closed)
        tail = q ** (n_max + 1) / (1 - q)
    # the tolerance has to absorb the tail, or truncation would look like a formula error
    rep = CheckReport.numeric(
        name, residual, max(tolerance, tail), params=params,
        details=[{"series": series, "series_float": float(series), "closed": closed, "tail_bound": tail}],
    )
    rep.elapsed_ms = clock[0]
    return rep


def check_q_consistency(lambda_sqs=(0, Fraction(1, 2), 1, 3), n_max: int = 8, perturb=0) -> CheckReport:
    """Recursion integrals against the closed-form sum, exactly.

    ``perturb`` is added to ``lambda_sq`` on the recursion side only; a
    nonzero value must make the check fail (harness mutation test).
    """
    with timer() as clock:
        details = []
        ok = True
        for lam2 in lambda_sqs:
            table = q_polys(as_fraction(lam2) + as_fraction(perturb), n_max)
            for n in range(1, n_max + 1):
                closed = tau_tlambda_closed(n, lam2)
                equal = table.taus[n] == closed
                ok &= equal
                details.append({"lambda_sq": as_fraction(lam2), "n": n, "recursion": table.taus[n], "closed": closed, "equal": equal})
    params = {"lambda_sq": [as_fraction(v) for v in lambda_sqs], "n_max": n_max}
    if perturb:
        params["perturb"] = as_fraction(perturb)
    rep = CheckReport.exact_result("q_consistency", ok, details=details, params=params)
    rep.elapsed_ms = clock[0]
    return rep


def check_sniady(k_max: int = 5, n_max: int = 8, degree_max: int = 40) -> CheckReport:
    """Recursion integrals of ``P_{k,n}`` against ``n^(nk)/(nk+1)!``, exactly.

    Degree and the vanishing of the first ``k`` derivatives at 0 are
    re-checked on every polynomial.
    """
    with timer() as clock:
        details = []
        ok = True
        for k in range(1, k_max + 1):
            top = min(n_max, degree_max // k)
            table = p_polys(k, top, max_degree=max(degree_max, DEFAULT_MAX_DEGREE))
            for n in range(1, top + 1):
                p = table.polys[n]
                boundary = all(p.derivative(j)(Fraction(0)) == 0 for j in range(k))
                closed = sniady_closed(k, n)
                equal = table.taus[n] == closed and p.degree == n * k and boundary
                ok &= equal
                details.append({"k": k, "n": n, "recursion": table.taus[n], "closed": closed, "degree": p.degree, "boundary_ok": boundary, "equal": equal})
    rep = CheckReport.exact_result("sniady_closed_form", ok, details=details, params={"k_max": k_max, "n_max": n_max, "degree_max": degree_max})
    rep.elapsed_ms = clock[0]
    return rep
