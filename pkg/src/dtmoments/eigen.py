"""Self-contained complex eigenvalue solver.

Householder reduction to upper Hessenberg form followed by implicit
single-shift complex QR sweeps (Wilkinson shift, exceptional shifts on
stagnation) with deflation restricted to the active window. The sweep
kernel is compiled with numba.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import ConvergenceError, DomainError

__all__ = ["hessenberg", "eigenvalues", "backward_errors", "DEFLATION_EPS"]

DEFLATION_EPS = 1e-14


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Unitary similarity to upper Hessenberg form (Householder).

    Columns whose part below the subdiagonal is already zero are left
    untouched, so triangular input stays exactly triangular.
    """
    h = np.array(a, dtype=complex, copy=True)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k]
        if not np.any(x[1:]):
            continue
        norm = np.linalg.norm(x)
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * norm
        v /= np.linalg.norm(v)
        h[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, k:])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        h[k + 2 :, k] = 0.0
    return h


@njit(cache=True)
def _qr_sweeps(h, eps, max_iter):  # pragma: no cover - compiled
    n = h.shape[0]
    eigs = np.zeros(n, dtype=np.complex128)
    hi = n - 1
    total = 0
    since = 0
    while hi >= 0:
        if hi == 0:
            eigs[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            tst = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if tst == 0.0:
                if lo - 2 >= 0:
                    tst += abs(h[lo - 1, lo - 2])
                if lo + 1 <= hi:
                    tst += abs(h[lo + 1, lo])
            if sub <= eps * tst:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs[hi] = h[hi, hi]
            hi -= 1
            since = 0
            continue
        total += 1
        since += 1
        if total > max_iter:
            return eigs, hi + 1, total
        if since % 11 == 0:
            shift = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            a = h[hi - 1, hi - 1]
            b = h[hi - 1, hi]
            c = h[hi, hi - 1]
            d = h[hi, hi]
            half = 0.5 * (a - d)
            disc = np.sqrt(half * half + b * c)
            m1 = 0.5 * (a + d) + disc
            m2 = 0.5 * (a + d) - disc
            shift = m1 if abs(m1 - d) < abs(m2 - d) else m2
        x = h[lo, lo] - shift
        y = h[lo + 1, lo]
        for k in range(lo, hi):
            if k > lo:
                x = h[k, k - 1]
                y = h[k + 1, k - 1]
            ax = abs(x)
            r = np.sqrt(ax * ax + abs(y) ** 2)
            if r == 0.0:
                continue
            if ax == 0.0:
                cs = 0.0
                sn = np.conj(y) / abs(y)
            else:
                cs = ax / r
                sn = (x / ax) * np.conj(y) / r
            jlo = k - 1 if k > lo else lo
            for j in range(jlo, hi + 1):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = cs * t1 + sn * t2
                h[k + 1, j] = -np.conj(sn) * t1 + cs * t2
            if k > lo:
                h[k + 1, k - 1] = 0.0
            ihi = k + 2 if k + 2 < hi else hi
            for i in range(lo, ihi + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = cs * t1 + np.conj(sn) * t2
                h[i, k + 1] = -sn * t1 + cs * t2
    return eigs, 0, total


def backward_errors(m: np.ndarray, eigs: np.ndarray, sample: int = 8, seed: int = 0) -> np.ndarray:
    """``||M v - lam v|| / (||M||_F ||v||)`` for sampled eigenvalues.

    Each eigenvector is recomputed by two steps of inverse iteration with a
    slightly perturbed shift, so it is independent of the QR sweeps. When
    that overflows the smallest right singular vector is used instead.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    norm = np.linalg.norm(m)
    if norm == 0:
        return np.zeros(min(sample, n))
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=min(sample, n), replace=False)
    out = []
    eye = np.eye(n)
    for i in idx:
        lam = eigs[i]
        shift = lam + 1e-10 * norm * (1 + 1j)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        with np.errstate(all="ignore"):
            for _ in range(2):
                v = np.linalg.solve(m - shift * eye, v)
                v /= np.linalg.norm(v)
        if not np.all(np.isfinite(v)):
            # inverse iteration overflows on highly non-normal input (e.g. nilpotent)
            v = np.linalg.svd(m - lam * eye)[2][-1].conj()
        out.append(np.linalg.norm(m @ v - lam * v) / norm)
    return np.array(out)


def eigenvalues(m, *, check: bool = True, sample: int = 8, tolerance: float = 1e-8) -> np.ndarray:
    """All eigenvalues of a square complex matrix.

    Raises :class:`ConvergenceError` after ``30 n`` QR sweeps, reporting
    how many eigenvalues were still undeflated. With ``check`` the
    backward error of a sample of eigenpairs must stay below ``tolerance``.

    Examples
    --------
    >>> np.sort_complex(eigenvalues(np.diag([1, 2j, -3])))
    array([-3.+0.j,  0.+2.j,  1.+0.j])
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("eigenvalues: matrix must be square")
    if not np.all(np.isfinite(m)):
        raise DomainError("eigenvalues: non-finite entries")
    n = m.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    h = hessenberg(m)
    eigs, remaining, sweeps = _qr_sweeps(h, DEFLATION_EPS, 30 * n)
    if remaining:
        raise ConvergenceError(f"QR did not converge: {remaining} of {n} eigenvalues undeflated after {sweeps} sweeps")
    if check:
        err = backward_errors(m, eigs, sample)
        if err.size and float(err.max()) > tolerance:
            raise ConvergenceError(f"backward error {float(err.max()):.3e} exceeds {tolerance:.1e}")
    return eigs
