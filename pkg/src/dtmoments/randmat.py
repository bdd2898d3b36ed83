"""Random-matrix models and Monte-Carlo estimates of normalized traces.

Every trial draws from its own generator, spawned from
``SeedSequence(seed)``, and results are stored by trial index, so the
estimate is bit-identical for a given seed whatever the thread count.
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .moments import sniady_closed
from .report import CheckReport, timer

__all__ = [
    "McEstimate",
    "sample_ut_gaussian",
    "sample_ginibre",
    "sample_s",
    "sample_dtc",
    "parse_word",
    "parse_models",
    "word_moment_mc",
    "run_trials",
    "trial_generators",
    "default_threads",
    "tnorm_closed",
    "dtc_norm_closed",
    "s_norm_closed",
    "resolvent_norm_checks",
    "resolvent_series_exact",
]


def default_threads() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error (two-pass)."""

    mean: complex
    stderr: float
    trials: int
    dimension: int
    seed: int
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_samples(cls, values: Sequence[complex], dimension: int, seed: int, keep: bool = False) -> "McEstimate":
        v = np.asarray(values, dtype=complex)
        n = v.size
        if n == 0:
            raise DomainError("no samples")
        mean = complex(v.sum() / n)
        if n > 1:
            dev = v - mean
            var = float(np.sum(dev.real**2 + dev.imag**2)) / (n - 1)
        else:
            var = 0.0
        return cls(mean, math.sqrt(var / n), n, dimension, seed, v if keep else None)

    def to_dict(self) -> dict:
        return {
            "mean": [self.mean.real, self.mean.imag],
            "stderr": self.stderr,
            "trials": self.trials,
            "dimension": self.dimension,
            "seed": self.seed,
        }


def _complex_gaussian(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """Complex normal with ``E|z|^2 = variance`` (real and imaginary parts each ``variance/2``)."""
    g = rng.standard_normal(shape + (2,))
    return (g[..., 0] + 1j * g[..., 1]) * math.sqrt(variance / 2.0)


def sample_ut_gaussian(n: int, rng: np.random.Generator) -> np.ndarray:
    """Strictly upper-triangular with iid complex Gaussian entries, ``E|t_ij|^2 = 1/n``."""
    if n < 2:
        raise DomainError("n must be >= 2")
    return np.triu(_complex_gaussian(rng, (n, n), 1.0 / n), 1)


def sample_ginibre(n: int, rng: np.random.Generator) -> np.ndarray:
    """Full matrix of iid complex Gaussians with ``E|y_ij|^2 = 1/n``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return _complex_gaussian(rng, (n, n), 1.0 / n)


def sample_s(n: int, rng: np.random.Generator, a: float, b: float) -> np.ndarray:
    """``sqrt(a) T1 + sqrt(b) T2*`` with independent upper-triangular samples."""
    t1 = sample_ut_gaussian(n, rng)
    t2 = sample_ut_gaussian(n, rng)
    return math.sqrt(a) * t1 + math.sqrt(b) * t2.conj().T


def sample_dtc(n: int, rng: np.random.Generator, d: float, c: float) -> np.ndarray:
    """``D + c T`` with ``D`` diagonal, entries uniform on the disk of radius ``d``.

    Disk points come from rejection sampling in the bounding square.
    """
    diag = np.empty(n, dtype=complex)
    filled = 0
    while filled < n:
        pts = rng.uniform(-d, d, size=(2 * (n - filled) + 8, 2))
        pts = pts[(pts**2).sum(axis=1) <= d * d]
        take = min(len(pts), n - filled)
        diag[filled : filled + take] = pts[:take, 0] + 1j * pts[:take, 1]
        filled += take
    return np.diag(diag) + c * sample_ut_gaussian(n, rng)


_SAMPLERS: dict[str, Callable[..., np.ndarray]] = {
    "ut": sample_ut_gaussian,
    "ginibre": sample_ginibre,
    "s": sample_s,
    "dtc": sample_dtc,
}

DEFAULT_MODELS = {"T": "ut", "Y": "ginibre"}


def parse_models(source: str | dict | None) -> dict[str, tuple[str, tuple[float, ...]]]:
    """Model declarations, e.g. ``"T=ut,Y=ginibre,S=s(2;1)"``.

    Parameters inside parentheses are separated by ``;``.
    """
    if source is None:
        source = DEFAULT_MODELS
    if isinstance(source, str):
        items = {}
        for part in filter(None, (p.strip() for p in source.split(","))):
            if "=" not in part:
                raise ConfigurationError(f"model declaration {part!r} lacks '='")
            name, kind = part.split("=", 1)
            items[name.strip()] = kind.strip()
        source = items
    out = {}
    for name, kind in source.items():
        if isinstance(kind, tuple):  # already parsed
            out[name] = kind
            continue
        m = re.fullmatch(r"([a-z]+)(?:\(([^)]*)\))?", kind)
        if not m or m.group(1) not in _SAMPLERS:
            raise ConfigurationError(f"unknown model {kind!r} for {name!r}")
        params = tuple(float(p) for p in m.group(2).split(";")) if m.group(2) else ()
        expected = {"ut": 0, "ginibre": 0, "s": 2, "dtc": 2}[m.group(1)]
        if len(params) != expected:
            raise ConfigurationError(f"model {m.group(1)} takes {expected} parameters, got {len(params)}")
        out[name] = (m.group(1), params)
    return out


def parse_word(word: str | Sequence[str], models: dict) -> list[tuple[str, bool]]:
    """Split ``"T*,T"`` (or a list of letters) into ``(model, adjoint)`` pairs."""
    letters = [w.strip() for w in word.split(",")] if isinstance(word, str) else list(word)
    if not letters or any(not w for w in letters):
        raise ConfigurationError("word must be a non-empty comma-separated list of letters")
    out = []
    for letter in letters:
        adj = letter.endswith("*")
        name = letter[:-1] if adj else letter
        if name not in models:
            raise ConfigurationError(f"unknown letter {letter!r}; declared models: {sorted(models)}")
        out.append((name, adj))
    return out


def trial_generators(seed: int, trials: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(trials)


def run_trials(func: Callable[[int, np.random.SeedSequence], object], seed: int, trials: int, threads: int | None = None) -> list:
    """Evaluate ``func(index, seedseq)`` for every trial, results in index order."""
    seqs = trial_generators(seed, trials)
    threads = default_threads() if threads is None else max(1, threads)
    if threads == 1 or trials == 1:
        return [func(i, s) for i, s in enumerate(seqs)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, range(trials), seqs))


def _sample_models(models: dict, n: int, seq: np.random.SeedSequence) -> dict[str, np.ndarray]:
    names = sorted(models)
    children = seq.spawn(len(names))
    out = {}
    for name, child in zip(names, children):
        kind, params = models[name]
        out[name] = _SAMPLERS[kind](n, np.random.Generator(np.random.PCG64(child)), *params)
    return out


def _evaluate_word(parsed, mats: dict[str, np.ndarray]) -> np.ndarray:
    acc = None
    for name, adj in parsed:
        m = mats[name].conj().T if adj else mats[name]
        acc = m if acc is None else acc @ m
    return acc


def word_moment_mc(
    word,
    n: int,
    trials: int,
    seed: int,
    models=None,
    threads: int | None = None,
) -> McEstimate:
    """Estimate ``E[tr_n(word)]`` over independent joint samples.

    Letters naming the same model share one sample per trial; distinct
    names are independent.

    Examples
    --------
    >>> est = word_moment_mc("T*,T", n=20, trials=50, seed=1)
    >>> abs(est.mean - 19 / 40) < 4 * est.stderr
    True
    """
    mdl = parse_models(models)
    parsed = parse_word(word, mdl)
    used = {name: mdl[name] for name, _ in parsed}

    def one(_i: int, seq: np.random.SeedSequence) -> complex:
        mats = _sample_models(used, n, seq)
        return complex(np.trace(_evaluate_word(parsed, mats)) / n)

    values = run_trials(one, seed, trials, threads)
    return McEstimate.from_samples(values, n, seed)


# resolvent norms


def tnorm_closed(a: complex) -> float:
    """``|a|^2 (e^{1/|a|^2} - 1)``."""
    x = 1.0 / abs(a) ** 2
    return math.expm1(x) / x


def dtc_norm_closed(lam: complex, d: float, c: float) -> float:
    """``(1/(c^2|lam|^2)) [(1 - d^2|lam|^2)^{-c^2/d^2} - 1]``, ``d > 0``."""
    x = abs(lam) ** 2
    if d * d * x >= 1:
        raise DomainError("need d |lambda| < 1")
    if d == 0:
        return math.expm1(c * c * x) / (c * c * x)
    return math.expm1(-(c * c) / (d * d) * math.log1p(-d * d * x)) / (c * c * x)


def s_norm_closed(lam: complex, a: float, b: float) -> float:
    """``(1/|lam|^2) (e^{(a-b)|lam|^2} - 1) / (a - b e^{(a-b)|lam|^2})``."""
    x = abs(lam) ** 2
    e = math.expm1((a - b) * x)
    denom = a - b * (e + 1.0)
    if denom <= 0:
        raise DomainError("lambda outside the convergence region")
    return e / (x * denom)


def resolvent_series_exact(x, n_terms: int = 30):
    """``sum_{k<=n_terms} tau((T*)^k T^k) x^k`` with ``tau((T*)^k T^k) = sniady_closed(k, 1)``."""
    from fractions import Fraction

    from .exact import as_fraction

    xq = as_fraction(x)
    return sum((sniady_closed(k, 1) * xq**k for k in range(n_terms + 1)), Fraction(0))


def resolvent_norm_checks(
    which: str,
    params: dict,
    n: int,
    trials: int,
    seed: int,
    n_max: int = 60,
    threads: int | None = None,
) -> CheckReport:
    """Monte-Carlo ``tr_n(W* W)`` for ``W = sum_{m<=n_max} lam^m Z^m`` against closed forms.

    ``which`` is ``"t"`` (``params: a``, ``lam = 1/a``), ``"dtc"``
    (``params: lam, d, c``) or ``"s"`` (``params: lam, a, b``). The
    tolerance is ``max(3 stderr, 5/n)`` since the closed forms are limits.
    """
    which = which.lower()
    with timer() as clock:
        if which == "t":
            a = complex(params.get("a", 2.0))
            lam = 1.0 / a
            target = tnorm_closed(a)
            sampler = lambda rng: sample_ut_gaussian(n, rng)
            # tail of the limit series: sum_{k>n_max} x^k/(k+1)!
            x = abs(lam) ** 2
            tail = x ** (n_max + 1) / math.factorial(n_max + 2) * 2
        elif which == "dtc":
            lam = complex(params.get("lam", 0.5))
            d = float(params.get("d", 1.0))
            c = float(params.get("c", 1.0))
            try:
                target = dtc_norm_closed(lam, d, c)
            except DomainError as exc:
                return CheckReport.not_applicable("resolvent_norm_dtc", str(exc), params={"which": which, **params})
            sampler = lambda rng: sample_dtc(n, rng, d, c)
            q = (d + c * math.sqrt(math.e)) * abs(lam)
            tail = q ** (2 * (n_max + 1)) / (1 - q**2) if q < 1 else math.nan
        elif which == "s":
            lam = complex(params.get("lam", math.sqrt(0.1)))
            a = float(params.get("a", 2.0))
            b = float(params.get("b", 1.0))
            try:
                target = s_norm_closed(lam, a, b)
            except DomainError as exc:
                return CheckReport.not_applicable("resolvent_norm_s", str(exc), params={"which": which, **params})
            sampler = lambda rng: sample_s(n, rng, a, b)
            q = (math.sqrt(a) + math.sqrt(b)) * math.sqrt(math.e) * abs(lam)
            tail = q ** (2 * (n_max + 1)) / (1 - q**2) if q < 1 else math.nan
        else:
            raise ConfigurationError(f"unknown resolvent model {which!r}")

        def one(_i: int, seq: np.random.SeedSequence) -> float:
            z = sampler(np.random.Generator(np.random.PCG64(seq)))
            # sum_{m<=N} (lam Z)^m = (1 - lam Z)^{-1} (1 - (lam Z)^{N+1})
            step = lam * z
            eye = np.eye(n, dtype=complex)
            w = np.linalg.solve(eye - step, eye - np.linalg.matrix_power(step, n_max + 1))
            return float(np.sum(np.abs(w) ** 2).real / n)

        est = McEstimate.from_samples(run_trials(one, seed, trials, threads), n, seed)
        tol = max(3 * est.stderr, 5.0 / n)
        residual = abs(est.mean.real - target)
        details = [{"estimate": est.to_dict(), "closed_form": target, "truncation_tail_estimate": tail if math.isfinite(tail) else None}]
        notes = [] if math.isfinite(tail) else ["no certified truncation tail for these parameters"]
        series_ok = True
        if which == "t":
            # the limit value is also a series in tau((T*)^k T^k); compare exactly summed
            series = float(resolvent_series_exact(abs(lam) ** 2, 30))
            series_res = abs(series - target)
            series_ok = series_res < 1e-14 * max(1.0, target)
            details.append({"series_sum": series, "series_residual": series_res})
    rep = CheckReport.numeric(
        f"resolvent_norm_{which}",
        residual,
        tol,
        params={"which": which, "n": n, "trials": trials, "seed": seed, "n_max": n_max, **params},
        details=details,
        notes=notes,
    )
    rep.passed = rep.passed and series_ok
    rep.elapsed_ms = clock[0]
    return rep
