"""Pointwise verification of the operator-valued fixed-point solutions.

Three systems are checked on grids in [0, 1]:

* the ``2k x 2k`` solution ``W`` for ``(T*)^k T^k``, built from Hankel
  determinants of the exponential family ``f^{(j)}``;
* the degenerate ``k = 1`` pair;
* the ``2 x 2`` system for ``S = sqrt(a) T1 + sqrt(b) T2*`` shifted by ``lambda``.

``L(f)(x) = int_x^1 f`` and ``L*(f)(x) = int_0^x f``. Every integral that
has a closed form is also recomputed by composite Gauss-Legendre
quadrature, and both versions are plugged into the equations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, SingularityError
from .report import CheckReport, timer
from .spectral import CoefficientFamily, coefficient_family, rho

__all__ = [
    "ExpFamily",
    "WMatrix",
    "default_mu0",
    "default_grid",
    "gauss_legendre",
    "integrate_upper",
    "integrate_lower",
    "hankel_delta",
    "build_w",
    "w_entries",
    "check_fixed_point",
    "check_fixed_point_k1",
    "check_delta_k_vanishes",
    "check_boundary_conditions",
    "s_fixed_point_solution",
    "s_sigma0",
    "check_s_fixed_point",
]


def default_mu0(k: int) -> float:
    """Heuristic ``|mu|`` above which the asymptotic regime is comfortable.

    Smaller ``|mu|`` is still evaluated (the singularity test on the
    ``Delta_j`` is the real guard) but the report carries a note.
    """
    return max(10.0, 4.0 * math.sqrt(math.e) * k)


def _mu_notes(k: int, mu: complex, mu0: float | None) -> list[str]:
    mu0 = default_mu0(k) if mu0 is None else mu0
    if abs(mu) < mu0:
        return [f"|mu| = {abs(mu):.4g} is below the heuristic threshold {mu0:.4g}"]
    return []


def default_grid(points: int = 21) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


class ExpFamily:
    """The family ``f^{(j)}``, ``-k <= j <= k``, as exponential sums.

    ``f^{(j)}(x) = sum_nu (gamma_nu / mu) (k alpha_nu)^j e^{k alpha_nu x}``
    with ``s = mu^{-2}/k``; negative ``j`` are the antiderivatives fixed by
    the boundary conditions at 1.
    """

    def __init__(self, k: int, mu: complex):
        if k < 1:
            raise DomainError("k must be >= 1")
        mu = complex(mu)
        if abs(mu) ** 2 <= math.e / k:
            raise DomainError("need |mu|^2 > e/k so that |s| < 1/e")
        self.k = k
        self.mu = mu
        self.s = mu**-2 / k
        self.family: CoefficientFamily = coefficient_family(k, self.s)
        self._rates = np.array([k * a for a in self.family.alphas], dtype=complex)
        self._weights = np.array(self.family.gammas, dtype=complex) / mu

    def _check_order(self, j: int) -> None:
        if not -self.k <= j <= self.k:
            raise DomainError(f"derivative order {j} outside [-{self.k}, {self.k}]")

    def deriv(self, j: int, x) -> np.ndarray | complex:
        """``f^{(j)}(x)`` for scalar or array ``x``."""
        self._check_order(j)
        xs = np.asarray(x, dtype=float)
        vals = np.exp(np.multiply.outer(xs, self._rates)) * (self._weights * self._rates ** float(j))
        out = vals.sum(axis=-1)
        return complex(out) if np.ndim(out) == 0 else out

    def scale(self, j: int, x) -> np.ndarray | float:
        """``sum_nu |term_nu|``, the magnitude against which cancellation is judged."""
        self._check_order(j)
        xs = np.asarray(x, dtype=float)
        vals = np.abs(np.exp(np.multiply.outer(xs, self._rates)) * (self._weights * self._rates ** float(j)))
        out = vals.sum(axis=-1)
        return float(out) if np.ndim(out) == 0 else out


def hankel_delta(fam: ExpFamily, j: int, shift: int, x: np.ndarray) -> np.ndarray:
    """``Delta_j(f^{(shift)})`` at every point of ``x``.

    Entry ``(i, l)`` is ``f^{(shift + i + l)}``; determinants use LU with
    partial pivoting (numpy).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if j < 0:
        return np.ones_like(x, dtype=complex)
    vals = {m: fam.deriv(shift + m, x) for m in range(2 * j + 1)}
    h = np.empty(x.shape + (j + 1, j + 1), dtype=complex)
    for i in range(j + 1):
        for l in range(j + 1):
            h[..., i, l] = vals[i + l]
    return np.linalg.det(h)


def hankel_bound(fam: ExpFamily, j: int, shift: int, x: np.ndarray) -> np.ndarray:
    """Hadamard bound ``prod_i ||row_i||`` of the same Hankel matrix."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    vals = {m: fam.deriv(shift + m, x) for m in range(2 * j + 1)}
    out = np.ones_like(x, dtype=float)
    for i in range(j + 1):
        out *= np.sqrt(sum(np.abs(vals[i + l]) ** 2 for l in range(j + 1)))
    return out


@dataclass
class _Deltas:
    D: dict[int, np.ndarray]
    E: dict[int, np.ndarray]
    F: dict[int, np.ndarray]


def _deltas(fam: ExpFamily, x: np.ndarray, check: bool = True) -> _Deltas:
    k = fam.k
    D = {-1: np.ones_like(x, dtype=complex)}
    E = {}
    F = {}
    for j in range(k):
        D[j] = hankel_delta(fam, j, -j, x)
        E[j] = hankel_delta(fam, j, -j - 1, x)
        F[j] = hankel_delta(fam, j, 1 - j, x)
        if check:
            floor = 1e-3 * abs(fam.mu) ** (-j - 1)
            small = np.abs(D[j]) < floor
            if np.any(small):
                where = float(np.atleast_1d(x)[np.argmax(small)])
                raise SingularityError(
                    f"Delta_{j}(f^(-{j})) = {abs(D[j][np.argmax(small)]):.3e} below {floor:.3e} at x = {where}"
                )
    D[k] = hankel_delta(fam, k, -k, x)
    return _Deltas(D, E, F)


def w_entries(fam: ExpFamily, x, check: bool = True) -> dict:
    """Nonzero entries of ``W`` at ``x`` (arrays), keyed by role.

    ``w11``; ``a[j] = w_{j+2,j+2} = w_{2k-j,2k-j}``; ``b[j] = w_{j+2,2k-j}``;
    ``c[j] = w_{2k-j,j+2}`` for ``j = 0..k-2``; ``mid = w_{k+1,k+1}``.
    """
    k, mu = fam.k, fam.mu
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = _deltas(fam, x, check)
    D, E, F = d.D, d.E, d.F
    out = {"w11": fam.deriv(0, x), "a": [], "b": [], "c": [], "deltas": d}
    for j in range(k - 1):
        sq = D[j] ** 2
        out["a"].append(-(1.0 / mu) * D[j - 1] * D[j + 1] / sq)
        out["b"].append(mu ** (-(2 * j + 2)) * E[j] * D[j + 1] / sq)
        out["c"].append(mu ** (2 * j) * D[j - 1] * F[j] / sq)
    if k >= 2:
        out["mid"] = mu ** (2 * k - 2) * D[k - 2] * F[k - 1] / D[k - 1] ** 2
    else:
        out["mid"] = None
    return out


@dataclass
class WMatrix:
    """Sparse ``2k x 2k`` matrix at one grid point (0-based storage)."""

    k: int
    x: float
    entries: dict[tuple[int, int], complex] = field(default_factory=dict)

    def pattern(self) -> set[tuple[int, int]]:
        """Allowed positions: diagonal plus the anti-band pairs."""
        k = self.k
        allowed = {(i, i) for i in range(2 * k)}
        for j in range(k - 1):
            allowed.add((j + 1, 2 * k - 1 - j))
            allowed.add((2 * k - 1 - j, j + 1))
        return allowed

    def dense(self) -> np.ndarray:
        m = np.zeros((2 * self.k, 2 * self.k), dtype=complex)
        for (i, j), v in self.entries.items():
            m[i, j] = v
        return m

    def block(self, j: int) -> np.ndarray:
        """The 2x2 block on rows/cols ``j+2`` and ``2k-j`` (1-based)."""
        p, q = j + 1, 2 * self.k - 1 - j
        return np.array([[self.entries[(p, p)], self.entries[(p, q)]], [self.entries[(q, p)], self.entries[(q, q)]]])


def build_w(k: int, mu: complex, x: float, *, mu0: float | None = None) -> WMatrix:
    mu = complex(mu)
    fam = ExpFamily(k, mu)
    e = w_entries(fam, [x])
    w = WMatrix(k, float(x))
    w.entries[(0, 0)] = complex(e["w11"][0])
    for j in range(k - 1):
        p, q = j + 1, 2 * k - 1 - j
        w.entries[(p, p)] = complex(e["a"][j][0])
        w.entries[(q, q)] = complex(e["a"][j][0])
        w.entries[(p, q)] = complex(e["b"][j][0])
        w.entries[(q, p)] = complex(e["c"][j][0])
    w.entries[(k, k)] = complex(e["mid"][0]) if k >= 2 else complex(e["w11"][0])
    bad = set(w.entries) - w.pattern()
    if bad:
        raise AssertionError(f"entries outside the sparsity pattern: {sorted(bad)}")
    return w


# quadrature


def gauss_legendre(order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _composite(func: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray, panels: int, order: int) -> np.ndarray:
    nodes, weights = gauss_legendre(order)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = (hi - lo) / panels
    total = np.zeros(lo.shape, dtype=complex)
    for p in range(panels):
        a = lo + p * width
        mid = a + width / 2
        pts = mid[..., None] + np.multiply.outer(width / 2, nodes)
        vals = func(pts.reshape(-1)).reshape(pts.shape)
        total += (vals * weights).sum(axis=-1) * (width / 2)
    return total


def _adaptive(func, lo, hi, tol: float = 1e-10, order: int = 16, max_panels: int = 256) -> tuple[np.ndarray, int]:
    panels = 1
    prev = _composite(func, lo, hi, panels, order)
    while panels < max_panels:
        panels *= 2
        cur = _composite(func, lo, hi, panels, order)
        scale = max(float(np.max(np.abs(cur))), 1e-300)
        if float(np.max(np.abs(cur - prev))) <= tol * scale:
            return cur, panels
        prev = cur
    return prev, panels


def integrate_upper(func, x, tol: float = 1e-10) -> np.ndarray:
    """``L(func)(x) = int_x^1 func`` for each x, by adaptive Gauss-Legendre."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return _adaptive(func, x, np.ones_like(x), tol)[0]


def integrate_lower(func, x, tol: float = 1e-10) -> np.ndarray:
    """``L*(func)(x) = int_0^x func``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return _adaptive(func, np.zeros_like(x), x, tol)[0]


# general k


def _rel(residual: np.ndarray, scale: float) -> float:
    return float(np.max(np.abs(residual)) / max(scale, 1e-300))


def check_boundary_conditions(fam: ExpFamily, tolerance: float = 1e-8) -> CheckReport:
    """Values of the family at 0 and 1, each relative to its own term scale."""
    k, mu = fam.k, fam.mu
    rows = []
    for j in range(1, k):
        v = fam.deriv(-j, 1.0)
        rows.append({"condition": f"f^(-{j})(1) = 0", "value": v, "relative": abs(v) / fam.scale(-j, 1.0)})
    v = fam.deriv(-k, 1.0)
    rows.append({"condition": f"f^(-{k})(1) = mu^{2 * k - 1}", "value": v,
                 "relative": abs(v - mu ** (2 * k - 1)) / abs(mu) ** (2 * k - 1)})
    v = fam.deriv(0, 0.0)
    rows.append({"condition": "f(0) = 1/mu", "value": v, "relative": abs(v - 1 / mu) * abs(mu)})
    for j in range(1, k):
        v = fam.deriv(j, 0.0)
        rows.append({"condition": f"f^({j})(0) = 0", "value": v, "relative": abs(v) / fam.scale(j, 0.0)})
    worst = max(r["relative"] for r in rows)
    return CheckReport.numeric("boundary_conditions", worst, tolerance, params={"k": k, "mu": mu}, details=rows)


def check_fixed_point(
    k: int,
    mu: complex,
    grid: Sequence[float] | None = None,
    tolerance: float = 1e-6,
    boundary_tolerance: float = 1e-8,
    quad_tol: float = 1e-10,
    mu0: float | None = None,
) -> CheckReport:
    """Verify the ``k + 1`` fixed-point equations on a grid.

    For ``k = 1`` this delegates to :func:`check_fixed_point_k1`. Every
    equation is evaluated twice, once with the closed-form integrals and
    once with quadrature; residuals are relative to ``|mu|`` for the
    diagonal equations and to the largest term on the grid for the
    off-diagonal ones. The block determinant relation
    ``det B_j = a_j / mu`` is checked too.
    """
    mu = complex(mu)
    if k == 1:
        return check_fixed_point_k1(mu, grid, tolerance=tolerance)
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    with timer() as clock:
        fam = ExpFamily(k, mu)
        e = w_entries(fam, x)
        d = e["deltas"]
        D, E, F = d.D, d.E, d.F
        a, b, c, mid, w11 = e["a"], e["b"], e["c"], e["mid"], e["w11"]

        def entry(name: str, j: int | None = None):
            def fn(pts):
                ee = w_entries(fam, pts, check=False)
                return ee[name] if j is None else ee[name][j]
            return fn

        # closed forms of the integrals
        closed = {}
        closed["L(w11)"] = -fam.deriv(-1, x)
        for j in range(k - 1):
            if j <= k - 3:
                closed[f"L(b{j})"] = -(mu ** (-(2 * j + 2))) * E[j + 1] / D[j]
            else:
                closed[f"L(b{j})"] = mu - mu ** (-(2 * k - 2)) * E[k - 1] / D[k - 2]
        closed["L*(c0)"] = mu - 1.0 / w11
        for j in range(1, k - 1):
            closed[f"L*(c{j})"] = -(mu ** (2 * j)) * F[j - 1] / D[j]
        closed["L*(mid)"] = -(mu ** (2 * k - 2)) * F[k - 2] / D[k - 1]

        quad = {}
        quad["L(w11)"] = integrate_upper(entry("w11"), x, quad_tol)
        for j in range(k - 1):
            quad[f"L(b{j})"] = integrate_upper(entry("b", j), x, quad_tol)
            quad[f"L*(c{j})"] = integrate_lower(entry("c", j), x, quad_tol)
        quad["L*(mid)"] = integrate_lower(entry("mid"), x, quad_tol)

        quad_rows = []
        worst_quad = 0.0
        for key in closed:
            diff = np.abs(closed[key] - quad[key])
            scale = max(float(np.max(np.abs(closed[key]))), float(np.max(np.abs(quad[key]))), abs(mu) ** -1)
            r = float(np.max(diff)) / scale
            worst_quad = max(worst_quad, r)
            quad_rows.append({"integral": key, "relative_difference": r})

        def equations(ints: dict) -> list[tuple[str, float]]:
            out = []
            # first: L*(w_{2k,2}) + 1/w11 = mu
            out.append(("eq0 diag", _rel(ints["L*(c0)"] + 1.0 / w11 - mu, abs(mu))))
            for j in range(k - 1):
                det = a[j] ** 2 - b[j] * c[j]
                u = ints["L(w11)"] if j == 0 else ints[f"L(b{j - 1})"]
                v = ints[f"L*(c{j + 1})"] if j <= k - 3 else ints["L*(mid)"]
                diag = a[j] / det - mu
                top = u - b[j] / det
                bottom = v - c[j] / det
                out.append((f"block{j} diag", _rel(diag, abs(mu))))
                s_top = max(float(np.max(np.abs(u))), float(np.max(np.abs(b[j] / det))))
                s_bot = max(float(np.max(np.abs(v))), float(np.max(np.abs(c[j] / det))))
                out.append((f"block{j} upper", _rel(top, s_top)))
                out.append((f"block{j} lower", _rel(bottom, s_bot)))
            out.append((f"eq{k} diag", _rel(ints[f"L(b{k - 2})"] + 1.0 / mid - mu, abs(mu))))
            return out

        eq_closed = equations(closed)
        eq_quad = equations(quad)
        det_rows = []
        for j in range(k - 1):
            det = a[j] ** 2 - b[j] * c[j]
            det_rows.append({"block": j, "relative": _rel(det - a[j] / mu, float(np.max(np.abs(a[j] / mu))))})
        worst_eq = max(r for _, r in eq_closed + eq_quad)
        worst_det = max(r["relative"] for r in det_rows)
        boundary = check_boundary_conditions(fam, boundary_tolerance)
        delta_k = check_delta_k_vanishes(k, mu, x, mu0=mu0)
    residual = max(worst_eq, worst_quad, worst_det)
    rep = CheckReport.numeric(
        "fixed_point",
        residual,
        tolerance,
        params={"k": k, "mu": mu, "grid_points": len(x)},
        notes=_mu_notes(k, mu, mu0),
        details=[
            {"equations_closed_form": dict(eq_closed)},
            {"equations_quadrature": dict(eq_quad)},
            {"closed_vs_quadrature": quad_rows},
            {"block_determinants": det_rows},
            {"boundary": boundary.to_dict(include_timing=False)},
            {"delta_k": delta_k.to_dict(include_timing=False)},
        ],
    )
    rep.passed = rep.passed and boundary.passed and delta_k.passed
    rep.elapsed_ms = clock[0]
    return rep


def check_delta_k_vanishes(
    k: int, mu: complex, grid: Sequence[float] | None = None, tolerance: float = 1e-8, mu0: float | None = None
) -> CheckReport:
    """``Delta_k(f^{(-k)}) = 0`` on the grid, normalized by the Hadamard bound.

    ``f`` is a sum of ``k`` exponentials, so every ``(k+1) x (k+1)``
    Hankel matrix of its derivatives is singular; the lower ``Delta_j``
    are reported so a degenerate family is visible.
    """
    mu = complex(mu)
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    with timer() as clock:
        fam = ExpFamily(k, mu)
        dk = hankel_delta(fam, k, -k, x)
        bound = hankel_bound(fam, k, -k, x)
        normalized = np.abs(dk) / bound
        lower = [float(np.min(np.abs(hankel_delta(fam, j, -j, x)))) for j in range(k)]
    rep = CheckReport.numeric(
        "delta_k_vanishes", float(np.max(normalized)), tolerance, params={"k": k, "mu": mu, "grid_points": len(x)},
        details=[{"min_abs_lower_deltas": lower}],
    )
    rep.elapsed_ms = clock[0]
    return rep


# k = 1


def check_fixed_point_k1(mu: complex, grid: Sequence[float] | None = None, tolerance: float = 1e-9) -> CheckReport:
    """The ``2 x 2`` system for ``T`` at ``lambda = 0``.

    ``sigma = rho(1/mu^2)``, ``z11 = mu sigma e^{sigma(x-1)}``,
    ``z22 = mu sigma e^{-sigma x}``; the equations are
    ``L*(z22) + 1/z11 = mu`` and ``L(z11) + 1/z22 = mu``.
    """
    mu = complex(mu)
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    with timer() as clock:
        sigma = rho(mu**-2)
        z11 = lambda t: mu * sigma * np.exp(sigma * (np.asarray(t) - 1.0))
        z22 = lambda t: mu * sigma * np.exp(-sigma * np.asarray(t))
        lstar_closed = mu * (1.0 - np.exp(-sigma * x))
        l_closed = mu * (1.0 - np.exp(sigma * (x - 1.0)))
        lstar_quad = integrate_lower(z22, x)
        l_quad = integrate_upper(z11, x)
        fam = ExpFamily(1, mu)
        res = {
            "eq1 closed": _rel(lstar_closed + 1.0 / z11(x) - mu, abs(mu)),
            "eq2 closed": _rel(l_closed + 1.0 / z22(x) - mu, abs(mu)),
            "eq1 quadrature": _rel(lstar_quad + 1.0 / z11(x) - mu, abs(mu)),
            "eq2 quadrature": _rel(l_quad + 1.0 / z22(x) - mu, abs(mu)),
            "z11 vs family": _rel(z11(x) - fam.deriv(0, x), abs(mu) ** -1),
        }
    rep = CheckReport.numeric(
        "fixed_point_k1", max(res.values()), tolerance, params={"k": 1, "mu": mu, "sigma": sigma}, details=[res]
    )
    rep.elapsed_ms = clock[0]
    return rep


# S = sqrt(a) T1 + sqrt(b) T2*


def s_sigma0(a: float, b: float, lam: complex) -> float:
    """Left end of the admissible sigma interval."""
    bound = math.log(a / b)
    if abs(lam) > 0:
        bound = min(bound, (a - b) / abs(lam) ** 2)
    return -bound


def s_fixed_point_solution(a: float, b: float, lam: complex, sigma: float) -> dict:
    """Coefficients of ``z11 = c11 e^{sigma x}``, ``z22 = c22 e^{-sigma x}`` and constant off-diagonals."""
    if not a > b > 0:
        raise DomainError("need a > b > 0")
    lam = complex(lam)
    s0 = s_sigma0(a, b, lam)
    if not s0 < sigma < 0:
        raise DomainError(f"sigma = {sigma} outside ({s0}, 0)")
    d = a - b
    # positive imaginary part: sigma < 0 makes |sigma|^{1/2} real
    mu = 1j * (a * math.exp(sigma / 2) - b * math.exp(-sigma / 2)) / (math.sqrt(-sigma) * d) * math.sqrt(
        d + sigma * abs(lam) ** 2
    )
    c11 = sigma * mu / (a * math.exp(sigma) - b)
    c22 = sigma * mu / (a - b * math.exp(-sigma))
    c12 = -sigma * lam.conjugate() / d
    c21 = -sigma * lam / d
    return {"mu": mu, "c11": c11, "c22": c22, "c12": c12, "c21": c21, "sigma0": s0}


def check_s_fixed_point(
    a: float,
    b: float,
    lam: complex,
    sigma: float,
    grid: Sequence[float] | None = None,
    tolerance: float = 1e-8,
    constancy_tolerance: float = 1e-12,
) -> CheckReport:
    """Verify the ``2 x 2`` system for ``S - lambda``.

    Equations (entrywise, ``det = z11 z22 - z12 z21``):
    ``(a L* + b L)(z22) + z22/det = mu``, ``(a L + b L*)(z11) + z11/det = mu``,
    ``-lambda_bar - z12/det = 0`` and ``-lambda - z21/det = 0``. The
    off-diagonal entry of ``(mu - R(z))^{-1}`` is recomputed pointwise and
    compared with ``-sigma lambda_bar/(a-b)``.
    """
    lam = complex(lam)
    x = default_grid() if grid is None else np.asarray(grid, dtype=float)
    with timer() as clock:
        sol = s_fixed_point_solution(a, b, lam, sigma)
        mu, c11, c22, c12, c21 = sol["mu"], sol["c11"], sol["c22"], sol["c12"], sol["c21"]
        z11 = lambda t: c11 * np.exp(sigma * np.asarray(t))
        z22 = lambda t: c22 * np.exp(-sigma * np.asarray(t))
        det = z11(x) * z22(x) - c12 * c21
        # closed-form integrals of the exponentials
        lstar_z22 = c22 * (1.0 - np.exp(-sigma * x)) / sigma
        l_z22 = c22 * (np.exp(-sigma * x) - math.exp(-sigma)) / sigma
        lstar_z11 = c11 * (np.exp(sigma * x) - 1.0) / sigma
        l_z11 = c11 * (math.exp(sigma) - np.exp(sigma * x)) / sigma
        q_lstar_z22 = integrate_lower(z22, x)
        q_l_z22 = integrate_upper(z22, x)
        q_lstar_z11 = integrate_lower(z11, x)
        q_l_z11 = integrate_upper(z11, x)
        res = {}
        for label, (ls22, l22, ls11, l11) in {
            "closed": (lstar_z22, l_z22, lstar_z11, l_z11),
            "quadrature": (q_lstar_z22, q_l_z22, q_lstar_z11, q_l_z11),
        }.items():
            r11 = a * ls22 + b * l22
            r22 = a * l11 + b * ls11
            res[f"(1,1) {label}"] = _rel(r11 + z22(x) / det - mu, abs(mu))
            res[f"(2,2) {label}"] = _rel(r22 + z11(x) / det - mu, abs(mu))
        res["(1,2)"] = _rel(-lam.conjugate() - c12 / det, max(abs(lam), 1.0))
        res["(2,1)"] = _rel(-lam - c21 / det, max(abs(lam), 1.0))
        res["det = sigma/(a-b)"] = _rel(det - sigma / (a - b), abs(sigma / (a - b)))
        mu_sq = (a * math.exp(sigma) - b) * (a - b * math.exp(-sigma)) * (a - b + sigma * abs(lam) ** 2) / (
            sigma * (a - b) ** 2
        )
        res["mu^2 condition"] = abs(mu**2 - mu_sq) / abs(mu_sq)
        # z12 recomputed from the right-hand side of z = (mu - R(z))^{-1}
        z12_pointwise = []
        for i, xi in enumerate(x):
            r = np.array([[a * lstar_z22[i] + b * l_z22[i], -lam.conjugate()], [-lam, a * l_z11[i] + b * lstar_z11[i]]])
            z = np.linalg.inv(mu * np.eye(2) - r)
            z12_pointwise.append(z[0, 1])
        z12_pointwise = np.array(z12_pointwise)
        constancy = float(np.max(np.abs(z12_pointwise - c12)))
        spread = float(np.ptp(z12_pointwise.real) + np.ptp(z12_pointwise.imag))
    residual = max(res.values())
    rep = CheckReport.numeric(
        "s_fixed_point",
        residual,
        tolerance,
        params={"a": a, "b": b, "lambda": lam, "sigma": sigma, "grid_points": len(x)},
        details=[res, {"mu": mu, "sigma0": sol["sigma0"], "z12": c12, "z12_max_deviation": constancy, "z12_spread": spread}],
    )
    rep.passed = rep.passed and constancy < constancy_tolerance
    rep.elapsed_ms = clock[0]
    return rep
