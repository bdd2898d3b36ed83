"""Exact Hankel-determinant identities.

``Delta_j(g)`` is the determinant of the ``(j+1) x (j+1)`` Hankel matrix
``(g^{(i+l)})_{i,l=0..j}``. For polynomial ``g`` it is computed exactly
by Laplace expansion over column subsets; rational matrix determinants
use fraction-free (Bareiss) elimination.
"""

from __future__ import annotations

import random
from math import gcd
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import DomainError
from .exact import ExactPoly
from .report import CheckReport, timer

__all__ = [
    "det_exact",
    "minor",
    "delta_poly",
    "check_lemma57",
    "check_condensation",
    "condensation_a_sides",
    "condensation_b_sides",
    "random_rational_matrix",
    "random_poly",
    "batch_condensation",
    "batch_lemma57",
]

Matrix = Sequence[Sequence[Fraction]]


def det_exact(m: Matrix) -> Fraction:
    """Determinant of a square rational matrix by Bareiss elimination.

    Entries are scaled to a common denominator first so the elimination
    runs over the integers, where every Bareiss division is exact.
    """
    n = len(m)
    if any(len(row) != n for row in m):
        raise DomainError("det_exact: matrix is not square")
    if n == 0:
        return Fraction(1)
    den = 1
    for row in m:
        for v in row:
            v = Fraction(v)
            den = den * v.denominator // gcd(den, v.denominator)
    a = [[int(Fraction(v) * den) for v in row] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], den**n)


def minor(m: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Fraction:
    """Determinant of the submatrix on 0-based ``rows`` x ``cols``."""
    return det_exact([[m[r][c] for c in cols] for r in rows])


def _det_poly(entries: list[list[ExactPoly]]) -> ExactPoly:
    """Laplace expansion along rows, memoized on the set of used columns."""
    n = len(entries)

    @lru_cache(maxsize=None)
    def expand(row: int, used: int) -> ExactPoly:
        if row == n:
            return ExactPoly([1])
        total = ExactPoly()
        sign = 1
        for c in range(n):
            if used & (1 << c):
                continue
            e = entries[row][c]
            if not e.is_zero():
                sub = expand(row + 1, used | (1 << c))
                total = total + (e * sub if sign > 0 else -(e * sub))
            sign = -sign
        return total

    return expand(0, 0)


def delta_poly(j: int, g: ExactPoly) -> ExactPoly:
    """``Delta_j(g)`` as an exact polynomial.

    Examples
    --------
    >>> delta_poly(1, ExactPoly([0, 0, 1])).coeffs
    (Fraction(0, 1), Fraction(0, 1), Fraction(-2, 1))
    """
    if j < 0:
        raise DomainError("j must be >= 0")
    derivs = [g]
    for _ in range(2 * j):
        derivs.append(derivs[-1].derivative())
    entries = [[derivs[i + l] for l in range(j + 1)] for i in range(j + 1)]
    return _det_poly(entries)


def check_lemma57(g: ExactPoly, j: int) -> CheckReport:
    """Both condensation identities for ``Delta_j``, as exact polynomials.

    ``Delta_j(g'') Delta_j(g) - Delta_j(g')^2 = Delta_{j-1}(g'') Delta_{j+1}(g)``

    ``Delta_{j-1}(g'') Delta_j(g)' - Delta_j(g) Delta_{j-1}(g'')' = Delta_{j-1}(g') Delta_j(g')``
    """
    if j < 1:
        raise DomainError("j must be >= 1")
    with timer() as clock:
        g1 = g.derivative()
        g2 = g1.derivative()
        dj_g = delta_poly(j, g)
        dj_g1 = delta_poly(j, g1)
        dj_g2 = delta_poly(j, g2)
        djm_g2 = delta_poly(j - 1, g2)
        djm_g1 = delta_poly(j - 1, g1)
        first = dj_g2 * dj_g - dj_g1 * dj_g1 - djm_g2 * delta_poly(j + 1, g)
        second = djm_g2 * dj_g.derivative() - dj_g * djm_g2.derivative() - djm_g1 * dj_g1
        ok1 = first.is_zero()
        ok2 = second.is_zero()
    rep = CheckReport.exact_result(
        "lemma57",
        ok1 and ok2,
        params={"j": j, "g": g},
        details=[{"identity": "second-derivative", "holds": ok1}, {"identity": "first-derivative", "holds": ok2}],
    )
    rep.elapsed_ms = clock[0]
    return rep


def condensation_a_sides(m: Matrix) -> tuple[Fraction, Fraction]:
    """Desnanot-Jacobi condensation on an ``n x n`` matrix.

    ``det(M[2..n-1]) det(M) = det(M[1..n-1]) det(M[2..n])
    - det(M[1..n-1 | 2..n]) det(M[2..n | 1..n-1])`` (1-based, rows | cols).
    """
    n = len(m)
    if n < 3 or any(len(row) != n for row in m):
        raise DomainError("identity A needs an n x n matrix with n >= 3")
    head = list(range(n - 1))
    tail = list(range(1, n))
    inner = list(range(1, n - 1))
    lhs = minor(m, inner, inner) * det_exact(m)
    rhs = minor(m, head, head) * minor(m, tail, tail) - minor(m, head, tail) * minor(m, tail, head)
    return lhs, rhs


def condensation_b_sides(m: Matrix) -> tuple[Fraction, Fraction]:
    """Condensation on an ``(n+1) x n`` matrix (1-based rows | cols).

    ``det(rows 2..n+1) det(rows 1..n-1 | cols 2..n)
    = det(rows 1..n-1, n+1) det(rows 2..n | cols 2..n)
    - det(rows 1..n) det(rows 2..n-1, n+1 | cols 2..n)``.
    """
    rows = len(m)
    n = rows - 1
    if n < 2 or any(len(row) != n for row in m):
        raise DomainError("identity B needs an (n+1) x n matrix with n >= 2")
    cols_all = list(range(n))
    cols_tail = list(range(1, n))
    lhs = minor(m, list(range(1, n + 1)), cols_all) * minor(m, list(range(n - 1)), cols_tail)
    rhs = minor(m, list(range(n - 1)) + [n], cols_all) * minor(m, list(range(1, n)), cols_tail) - minor(
        m, list(range(n)), cols_all
    ) * minor(m, list(range(1, n - 1)) + [n], cols_tail)
    return lhs, rhs


def check_condensation(matrix: Matrix, which: str) -> CheckReport:
    which = which.upper()
    if which not in ("A", "B"):
        raise DomainError("which must be 'A' or 'B'")
    m = [[Fraction(v) for v in row] for row in matrix]
    with timer() as clock:
        lhs, rhs = (condensation_a_sides if which == "A" else condensation_b_sides)(m)
    rep = CheckReport.exact_result(
        f"condensation_{which.lower()}", lhs == rhs,
        params={"which": which, "rows": len(m), "cols": len(m[0]) if m else 0},
        details=[{"lhs": lhs, "rhs": rhs}],
    )
    rep.elapsed_ms = clock[0]
    return rep


def random_rational_matrix(rng: random.Random, rows: int, cols: int, bound: int = 9, den: int = 4) -> list[list[Fraction]]:
    """Entries ``p/q`` with ``|p| <= bound`` and ``1 <= q <= den``."""
    return [[Fraction(rng.randint(-bound, bound), rng.randint(1, den)) for _ in range(cols)] for _ in range(rows)]


def random_poly(rng: random.Random, degree: int, bound: int = 5, den: int = 3) -> ExactPoly:
    return ExactPoly(Fraction(rng.randint(-bound, bound), rng.randint(1, den)) for _ in range(degree + 1))


def batch_condensation(which: str, n: int, trials: int, seed: int) -> CheckReport:
    """Identity A (``n x n``) or B (``(n+1) x n``) on ``trials`` random rational matrices."""
    rng = random.Random(seed)
    which = which.upper()
    rows = n if which == "A" else n + 1
    with timer() as clock:
        failures = []
        for t in range(trials):
            m = random_rational_matrix(rng, rows, n)
            lhs, rhs = (condensation_a_sides if which == "A" else condensation_b_sides)(m)
            if lhs != rhs:
                failures.append({"trial": t, "lhs": lhs, "rhs": rhs})
    rep = CheckReport.exact_result(
        f"condensation_{which.lower()}_n{n}", not failures,
        params={"which": which, "n": n, "trials": trials, "seed": seed},
        details=failures[:5],
    )
    rep.elapsed_ms = clock[0]
    return rep


def batch_lemma57(j: int, degree: int, trials: int, seed: int, random_degree: bool = False) -> CheckReport:
    """Both identities on ``trials`` random polynomials of degree ``degree``.

    With ``random_degree`` each degree is drawn uniformly from ``0..degree``.
    """
    rng = random.Random(seed)
    with timer() as clock:
        failures = []
        for t in range(trials):
            g = random_poly(rng, rng.randint(0, degree) if random_degree else degree)
            if not check_lemma57(g, j).passed:
                failures.append({"trial": t, "g": g})
    rep = CheckReport.exact_result(
        f"lemma57_j{j}", not failures,
        params={"j": j, "degree": degree, "random_degree": random_degree, "trials": trials, "seed": seed},
        details=failures[:5],
    )
    rep.elapsed_ms = clock[0]
    return rep
