"""Spectrum, Brown measure, log-energy and entropy bound of ``T + sqrt(eps) Y``.

The limit Brown measure is uniform on the disk of radius
``R = log(1 + 1/eps)^{-1/2}``; for finite ``n`` the eigenvalues of
``T^(n) + sqrt(eps) Y^(n)`` are compared against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eigen import eigenvalues
from .errors import DomainError
from .randmat import McEstimate, run_trials, sample_ginibre, sample_ut_gaussian
from .report import CheckReport, timer

__all__ = [
    "disk_radius",
    "sample_t_plus_y",
    "pooled_eigenvalues",
    "ks_uniform",
    "brown_radial_check",
    "BrownDensity",
    "density_variation",
    "brown_grid_density",
    "log_energy_target",
    "log_energy_mc",
    "entropy_bound",
    "generic_entropy_bound",
    "uniform_disk_energy",
]


def disk_radius(epsilon: float) -> float:
    """``1 / sqrt(log(1 + 1/eps))``."""
    if epsilon <= 0:
        raise DomainError("epsilon must be > 0")
    return 1.0 / math.sqrt(math.log1p(1.0 / epsilon))


def sample_t_plus_y(n: int, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    t = sample_ut_gaussian(n, rng)
    y = sample_ginibre(n, rng)
    return t + math.sqrt(epsilon) * y


def pooled_eigenvalues(epsilon: float, n: int, trials: int, seed: int, threads: int | None = None) -> np.ndarray:
    """Eigenvalues of independent samples, concatenated in trial order."""

    def one(_i: int, seq: np.random.SeedSequence) -> np.ndarray:
        m = sample_t_plus_y(n, epsilon, np.random.Generator(np.random.PCG64(seq)))
        return eigenvalues(m)

    return np.concatenate(run_trials(one, seed, trials, threads))


def ks_uniform(u: np.ndarray) -> float:
    """Kolmogorov distance between the empirical law of ``u`` and Uniform[0, 1]."""
    u = np.sort(np.asarray(u, dtype=float))
    n = u.size
    cdf = np.clip(u, 0.0, 1.0)
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def brown_radial_check(
    epsilon: float,
    n: int,
    trials: int,
    seed: int,
    threads: int | None = None,
    ks_tolerance: float = 0.08,
    outside_tolerance: float = 0.02,
    radius_band: tuple[float, float] = (0.9, 1.1),
    eigs: np.ndarray | None = None,
) -> CheckReport:
    """Pooled eigenvalues against the uniform law on the disk of radius R.

    Three statistics: Kolmogorov distance of ``(|lam|/R)^2`` from
    Uniform[0, 1], the fraction beyond ``1.05 R`` and ``max|lam| / R``.
    The reported residual is the Kolmogorov distance; all three must pass.
    """
    if n < 64:
        raise DomainError("n must be >= 64")
    with timer() as clock:
        radius = disk_radius(epsilon)
        if eigs is None:
            eigs = pooled_eigenvalues(epsilon, n, trials, seed, threads)
        r = np.abs(eigs) / radius
        ks = ks_uniform(r**2)
        outside = float(np.mean(r > 1.05))
        rmax = float(r.max())
        # R grows with eps: log(1 + 1/eps) decreases
        larger = disk_radius(epsilon * 2)
    ok_outside = outside < outside_tolerance
    ok_max = radius_band[0] <= rmax <= radius_band[1]
    rep = CheckReport.numeric(
        "brown_radial",
        ks,
        ks_tolerance,
        params={"epsilon": epsilon, "n": n, "trials": trials, "seed": seed},
        details=[{
            "radius": radius,
            "ks_distance": ks,
            "fraction_outside_1.05R": outside,
            "max_abs_over_R": rmax,
            "eigenvalue_count": int(eigs.size),
            "radius_increases_in_epsilon": radius < larger,
        }],
    )
    rep.passed = rep.passed and ok_outside and ok_max and radius < larger
    rep.elapsed_ms = clock[0]
    return rep


@dataclass
class BrownDensity:
    """Discrete Laplacian of the regularized log-determinant on a square grid."""

    xs: np.ndarray
    ys: np.ndarray
    spacing: float
    log_det: np.ndarray
    density: np.ndarray
    mass: float
    warnings: list[str] = field(default_factory=list)

    def interior_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of the density cells (the grid without its border)."""
        gx, gy = np.meshgrid(self.xs[1:-1], self.ys[1:-1], indexing="xy")
        return gx, gy

    def mass_within(self, radius: float, center: complex = 0j) -> float:
        gx, gy = self.interior_points()
        inside = np.abs(gx + 1j * gy - center) < radius
        return float(self.density[inside].sum() * self.spacing**2)


def _regularized_logdet(m: np.ndarray, lam: complex, alpha: float) -> float:
    """``(1/2n) log det((M - lam)^*(M - lam) + alpha)`` via Cholesky."""
    n = m.shape[0]
    q = m - lam * np.eye(n)
    g = q.conj().T @ q + alpha * np.eye(n)
    c = np.linalg.cholesky(g)
    return float(np.sum(np.log(np.abs(np.diag(c))))) / n


def brown_grid_density(
    m: np.ndarray,
    center: complex = 0j,
    extent: float = 1.5,
    resolution: int = 41,
    alpha: float = 1e-2,
) -> BrownDensity:
    """Regularized Brown density ``(1/2pi) Laplacian L_alpha`` on a grid.

    ``L_alpha(lam) = (1/2n) log det((M - lam)^*(M - lam) + alpha)`` is
    evaluated on ``resolution x resolution`` points covering
    ``center +- extent`` in both directions; the 5-point Laplacian gives
    the density on interior points.
    """
    if alpha <= 0:
        raise DomainError("alpha must be > 0")
    if resolution < 3:
        raise DomainError("resolution must be >= 3")
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    center = complex(center)
    xs = np.linspace(center.real - extent, center.real + extent, resolution)
    ys = np.linspace(center.imag - extent, center.imag + extent, resolution)
    h = float(xs[1] - xs[0])
    warnings = []
    if h * h < 1e3 * np.finfo(float).eps:
        warnings.append("grid spacing is too fine for the Laplacian stencil")
    L = np.empty((resolution, resolution))
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            L[iy, ix] = _regularized_logdet(m, complex(x, y), alpha)
    lap = (L[2:, 1:-1] + L[:-2, 1:-1] + L[1:-1, 2:] + L[1:-1, :-2] - 4.0 * L[1:-1, 1:-1]) / (h * h)
    density = lap / (2.0 * math.pi)
    mass = float(density.sum() * h * h)
    # spectral radius estimate from the Frobenius norm is an upper bound
    est = float(np.linalg.norm(m) / math.sqrt(m.shape[0]))
    reach = min(abs(xs[0] - center.real), abs(xs[-1] - center.real), abs(ys[0] - center.imag), abs(ys[-1] - center.imag))
    if est > reach:
        warnings.append(f"grid half-width {reach:.3g} may not cover the spectral radius estimate {est:.3g}")
    return BrownDensity(xs, ys, h, L, density, mass, warnings)


def density_variation(dens: BrownDensity, radius: float, center: complex = 0j) -> float:
    """Coefficient of variation of the density over interior cells within ``radius``."""
    gx, gy = dens.interior_points()
    vals = dens.density[np.abs(gx + 1j * gy - center) < radius]
    if vals.size < 2:
        raise DomainError("fewer than two grid cells inside the radius")
    return float(vals.std() / abs(vals.mean()))


def log_energy_target(radius: float) -> float:
    """``pi^2 R^4 (log R - 1/4)``, the double integral of ``log|z1 - z2|`` over the disk."""
    return math.pi**2 * radius**4 * (math.log(radius) - 0.25)


def log_energy_mc(radius: float, pairs: int, seed: int, chunk: int = 250_000) -> McEstimate:
    """Monte-Carlo estimate of ``int int_{B(0,R)^2} log|z1 - z2|``.

    Uniform points come from ``R sqrt(U) e^{2 pi i V}``; the mean of
    ``log|z1 - z2|`` is scaled by ``(pi R^2)^2``.
    """
    if radius <= 0 or pairs < 1:
        raise DomainError("need radius > 0 and pairs >= 1")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    area2 = (math.pi * radius**2) ** 2
    parts = []
    left = pairs
    while left:
        m = min(chunk, left)
        u = rng.random((4, m))
        z1 = radius * np.sqrt(u[0]) * np.exp(2j * math.pi * u[1])
        z2 = radius * np.sqrt(u[2]) * np.exp(2j * math.pi * u[3])
        parts.append(np.log(np.abs(z1 - z2)))
        left -= m
    vals = np.concatenate(parts)
    mean = float(vals.mean())
    std = float(np.sqrt(np.sum((vals - mean) ** 2) / max(pairs - 1, 1)))
    return McEstimate(complex(mean * area2), std * area2 / math.sqrt(pairs), pairs, 0, seed)


def uniform_disk_energy(radius: float) -> float:
    """``log R - 1/4``: the log-energy of the normalized uniform disk measure."""
    return math.log(radius) - 0.25


def generic_entropy_bound(energy: float, od: float) -> float:
    """``energy + 5/4 + log(pi sqrt(2 od))`` for a Brown measure with log-energy ``energy``."""
    if od <= 0:
        raise DomainError("off-diagonality must be > 0")
    return energy + 1.25 + math.log(math.pi * math.sqrt(2.0 * od))


def entropy_bound(epsilon: float) -> dict:
    """Entropy upper bound for ``T + sqrt(eps) Y`` and its ingredients.

    ``value`` is
    ``-1/2 log(log(1+1/eps)) - 1/4 + log(pi) + 1/2 log(1 + 2 eps - 1/log(1+1/eps))``;
    ``od = 1/2 + eps - R^2/2``. ``generic`` evaluates the general bound
    with the uniform-disk log-energy, which is larger by exactly 5/4.
    """
    if epsilon <= 0:
        raise DomainError("epsilon must be > 0")
    lg = math.log1p(1.0 / epsilon)
    inner = 1.0 + 2.0 * epsilon - 1.0 / lg
    if inner <= 0:
        raise DomainError("1 + 2 eps - 1/log(1 + 1/eps) must be positive")
    radius = 1.0 / math.sqrt(lg)
    value = -0.5 * math.log(lg) - 0.25 + math.log(math.pi) + 0.5 * math.log(inner)
    od = 0.5 + epsilon - radius**2 / 2.0
    generic = generic_entropy_bound(uniform_disk_energy(radius), od)
    return {"value": value, "od": od, "radius": radius, "generic": generic, "gap": generic - value}
