"""Structured result records shared by every check."""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator

__all__ = ["CheckReport", "jsonable", "timer"]


def jsonable(value: Any) -> Any:
    """Convert a value to something ``json.dumps`` accepts.

    Fractions become ``"num/den"`` strings, complex numbers become
    ``[re, im]`` pairs and non-finite floats become strings.
    """
    from .exact import ExactPoly, TruncatedSeries

    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, complex):
        return [jsonable(value.real), jsonable(value.imag)]
    if isinstance(value, (ExactPoly, TruncatedSeries)):
        return value.to_json()
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if getattr(value, "ndim", 0) > 0:  # numpy arrays
        return jsonable(value.tolist())
    if hasattr(value, "item"):  # numpy scalars
        return jsonable(value.item())
    return str(value)


@dataclass
class CheckReport:
    """Outcome of one verification.

    For exact checks ``max_residual`` is ``None`` and ``passed`` reflects
    exact equality. For numeric checks ``passed`` is
    ``max_residual <= tolerance`` unless the check was flagged
    not-applicable.
    """

    name: str
    passed: bool
    exact: bool
    max_residual: float | None = None
    tolerance: float | None = None
    details: list[dict] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    applicable: bool = True
    elapsed_ms: float = 0.0

    def __post_init__(self) -> None:
        if self.exact and self.max_residual is not None:
            raise ValueError("exact checks carry no residual")

    @classmethod
    def numeric(cls, name: str, residual: float, tolerance: float, **kw) -> "CheckReport":
        ok = bool(math.isfinite(residual) and residual <= tolerance)
        return cls(name=name, passed=ok, exact=False, max_residual=float(residual), tolerance=tolerance, **kw)

    @classmethod
    def exact_result(cls, name: str, equal: bool, **kw) -> "CheckReport":
        return cls(name=name, passed=bool(equal), exact=True, **kw)

    @classmethod
    def not_applicable(cls, name: str, reason: str, **kw) -> "CheckReport":
        notes = list(kw.pop("notes", [])) + [reason]
        return cls(name=name, passed=True, exact=False, applicable=False, notes=notes, **kw)

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "name": self.name,
            "pass": self.passed,
            "exact": self.exact,
            "applicable": self.applicable,
            "max_residual": jsonable(self.max_residual),
            "tolerance": jsonable(self.tolerance),
            "params": jsonable(self.params),
            "details": jsonable(self.details),
            "notes": list(self.notes),
        }
        if include_timing:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if not self.applicable:
            status = "N/A "
        if self.exact:
            metric = "exact"
        else:
            metric = f"residual={self.max_residual:.3e} tol={self.tolerance:.1e}" if self.max_residual is not None else "-"
        return f"[{status}] {self.name}: {metric} ({self.elapsed_ms:.0f} ms)"


@contextmanager
def timer() -> Iterator[list[float]]:
    """Yield a one-element list that receives the elapsed milliseconds."""
    box = [0.0]
    t0 = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = (time.perf_counter() - t0) * 1e3
