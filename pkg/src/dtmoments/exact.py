"""Exact rational polynomials and truncated power series.

Scalars are :class:`fractions.Fraction`; both container types are immutable
and every operation returns a new value.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from numbers import Rational
from typing import Iterable, Sequence

from .errors import DomainError

__all__ = [
    "Fraction",
    "as_fraction",
    "fraction_to_str",
    "fraction_from_str",
    "ExactPoly",
    "TruncatedSeries",
    "poly_shift",
    "poly_antideriv",
    "poly_derivative",
    "poly_defint01",
    "series_mul",
    "series_div",
    "series_exp",
    "series_log",
    "series_compose",
    "series_reversion",
]


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and decimal/ratio strings to a Fraction.

    Floats are accepted only when they are exactly representable as short
    decimals (their ``repr`` is parsed), so ``0.5`` becomes ``1/2``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


def fraction_to_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def fraction_from_str(text: str) -> Fraction:
    return Fraction(text)


def _trim(coeffs: Iterable[Fraction]) -> tuple[Fraction, ...]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class ExactPoly:
    """Dense univariate polynomial with Fraction coefficients.

    ``coeffs[i]`` is the coefficient of ``x**i``; the zero polynomial has no
    coefficients.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable = ()):
        self._c = _trim(as_fraction(c) for c in coeffs)

    @classmethod
    def constant(cls, value) -> "ExactPoly":
        return cls([value])

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "ExactPoly":
        return cls([0] * degree + [coeff])

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._c

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self._c) - 1

    def is_zero(self) -> bool:
        return not self._c

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactPoly):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == _trim([as_fraction(other)])
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._c)

    def __repr__(self) -> str:
        return f"ExactPoly({[fraction_to_str(c) for c in self._c]})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        terms = []
        for i, c in enumerate(self._c):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(f"({c})" + ("*" + mono if mono else ""))
        return " + ".join(terms)

    # arithmetic

    def __add__(self, other) -> "ExactPoly":
        other = _coerce_poly(other)
        n = max(len(self._c), len(other._c))
        a = self._c + (Fraction(0),) * (n - len(self._c))
        b = other._c + (Fraction(0),) * (n - len(other._c))
        return ExactPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "ExactPoly":
        return ExactPoly(-c for c in self._c)

    def __sub__(self, other) -> "ExactPoly":
        return self + (-_coerce_poly(other))

    def __rsub__(self, other) -> "ExactPoly":
        return _coerce_poly(other) - self

    def __mul__(self, other) -> "ExactPoly":
        if isinstance(other, (int, Fraction)):
            return ExactPoly(c * other for c in self._c)
        other = _coerce_poly(other)
        if not self._c or not other._c:
            return ExactPoly()
        out = [Fraction(0)] * (len(self._c) + len(other._c) - 1)
        for i, a in enumerate(self._c):
            if a == 0:
                continue
            for j, b in enumerate(other._c):
                out[i + j] += a * b
        return ExactPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ExactPoly":
        if k < 0:
            raise DomainError("negative polynomial power")
        out = ExactPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        """Horner evaluation; exact for Fraction/int arguments."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self._c):
                acc = acc * x + c
            return acc
        acc = 0.0 * x
        for c in reversed(self._c):
            acc = acc * x + float(c)
        return acc

    # calculus

    def shift(self, c) -> "ExactPoly":
        """Return q with q(x) = p(x + c)."""
        c = as_fraction(c)
        d = len(self._c)
        if d == 0:
            return ExactPoly()
        powers = [Fraction(1)]
        for _ in range(d):
            powers.append(powers[-1] * c)
        out = []
        for j in range(d):
            out.append(sum((self._c[i] * comb(i, j) * powers[i - j] for i in range(j, d)), Fraction(0)))
        return ExactPoly(out)

    def antiderivative(self) -> "ExactPoly":
        """Antiderivative vanishing at 0."""
        return ExactPoly([0] + [c / (i + 1) for i, c in enumerate(self._c)])

    def derivative(self, order: int = 1) -> "ExactPoly":
        p = self
        for _ in range(order):
            p = ExactPoly(i * c for i, c in enumerate(p._c) if i > 0)
        return p

    def defint01(self) -> Fraction:
        """Integral over [0, 1]."""
        return sum((c / (i + 1) for i, c in enumerate(self._c)), Fraction(0))

    def to_json(self) -> list[str]:
        return [fraction_to_str(c) for c in self._c]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "ExactPoly":
        return cls(Fraction(s) for s in data)


def _coerce_poly(value) -> ExactPoly:
    if isinstance(value, ExactPoly):
        return value
    return ExactPoly([value])


def poly_shift(p: ExactPoly, c) -> ExactPoly:
    return p.shift(c)


def poly_antideriv(p: ExactPoly) -> ExactPoly:
    return p.antiderivative()


def poly_derivative(p: ExactPoly) -> ExactPoly:
    return p.derivative()


def poly_defint01(p: ExactPoly) -> Fraction:
    return p.defint01()


class TruncatedSeries:
    """Power series ``c_0 + c_1 z + ... + c_N z^N`` modulo ``z^(N+1)``.

    Binary operations demand equal orders; a mismatch raises instead of
    truncating silently.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        c = [as_fraction(x) for x in coeffs]
        if order is None:
            if not c:
                raise DomainError("series needs an explicit order when empty")
            order = len(c) - 1
        if order < 0:
            raise DomainError("series order must be >= 0")
        c = c[: order + 1] + [Fraction(0)] * (order + 1 - len(c))
        self._c = tuple(c)

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls([1], order)

    @classmethod
    def identity(cls, order: int) -> "TruncatedSeries":
        """The series ``z``."""
        return cls([0, 1], order)

    @classmethod
    def geometric(cls, order: int, ratio=1) -> "TruncatedSeries":
        """``1/(1 - ratio*z)``."""
        r = as_fraction(ratio)
        return cls([r**i for i in range(order + 1)], order)

    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._c

    def __getitem__(self, i: int) -> Fraction:
        return self._c[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(self._c)

    def __repr__(self) -> str:
        return f"TruncatedSeries({[fraction_to_str(c) for c in self._c]}, order={self.order})"

    def _check(self, other: "TruncatedSeries") -> None:
        if not isinstance(other, TruncatedSeries):
            raise TypeError("expected a TruncatedSeries")
        if other.order != self.order:
            raise DomainError(f"series order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries((self._c[0] + other,) + self._c[1:], self.order)
        self._check(other)
        return TruncatedSeries((a + b for a, b in zip(self._c, other._c)), self.order)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries((-a for a in self._c), self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries((a * other for a in self._c), self.order)
        self._check(other)
        n = self.order + 1
        out = [Fraction(0)] * n
        for i, a in enumerate(self._c):
            if a == 0:
                continue
            for j in range(n - i):
                out[i + j] += a * other._c[j]
        return TruncatedSeries(out, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DomainError("series_div: division by zero scalar")
            return TruncatedSeries((a / other for a in self._c), self.order)
        self._check(other)
        b0 = other._c[0]
        if b0 == 0:
            raise DomainError("series_div: divisor has zero constant term")
        out: list[Fraction] = []
        for n in range(self.order + 1):
            acc = self._c[n] - sum((out[i] * other._c[n - i] for i in range(n)), Fraction(0))
            out.append(acc / b0)
        return TruncatedSeries(out, self.order)

    def __rtruediv__(self, other):
        return TruncatedSeries([other], self.order) / self

    def __pow__(self, k: int):
        if k < 0:
            return TruncatedSeries.one(self.order) / (self ** (-k))
        out = TruncatedSeries.one(self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self) -> "TruncatedSeries":
        """Formal derivative, padded with a zero top coefficient."""
        return TruncatedSeries([i * c for i, c in enumerate(self._c) if i > 0], self.order)

    def integral(self) -> "TruncatedSeries":
        """Formal antiderivative with zero constant term; the top term is dropped."""
        return TruncatedSeries([0] + [c / (i + 1) for i, c in enumerate(self._c)], self.order)

    def mul_z(self) -> "TruncatedSeries":
        """Multiply by ``z`` (top coefficient falls off)."""
        return TruncatedSeries((0,) + self._c[:-1], self.order)

    def div_z(self) -> "TruncatedSeries":
        """Divide by ``z``; requires a zero constant term. Top coefficient becomes unknown-zero."""
        if self._c[0] != 0:
            raise DomainError("div_z: constant term is not zero")
        return TruncatedSeries(self._c[1:] + (Fraction(0),), self.order)

    def with_order(self, order: int) -> "TruncatedSeries":
        """Explicit truncation (or zero padding) to another order."""
        return TruncatedSeries(self._c, order)

    def exp(self) -> "TruncatedSeries":
        if self._c[0] != 0:
            raise DomainError("series_exp: constant term must be 0")
        # n b_n = sum_{k=1}^n k a_k b_{n-k}
        b = [Fraction(1)]
        for n in range(1, self.order + 1):
            b.append(sum((k * self._c[k] * b[n - k] for k in range(1, n + 1)), Fraction(0)) / n)
        return TruncatedSeries(b, self.order)

    def log(self) -> "TruncatedSeries":
        if self._c[0] != 1:
            raise DomainError("series_log: constant term must be 1")
        return (self.derivative() / self).integral()

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner(z))``; ``inner`` must have zero constant term."""
        self._check(inner)
        if inner._c[0] != 0:
            raise DomainError("series_compose: inner series must have zero constant term")
        acc = TruncatedSeries([self._c[-1]], self.order)
        for c in reversed(self._c[:-1]):
            acc = acc * inner + c
        return acc

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse by Lagrange inversion.

        ``[z^n] b = (1/n) [w^(n-1)] (w / a(w))^n``.
        """
        if self._c[0] != 0:
            raise DomainError("series_reversion: constant term must be 0")
        if self.order >= 1 and self._c[1] == 0:
            raise DomainError("series_reversion: linear coefficient is zero")
        N = self.order
        if N == 0:
            return TruncatedSeries.zero(0)
        # w / a(w) = 1 / (a_1 + a_2 w + ...)
        quotient = TruncatedSeries(self._c[1:] + (Fraction(0),), N)
        h = TruncatedSeries.one(N) / quotient
        out = [Fraction(0)]
        power = TruncatedSeries.one(N)
        for n in range(1, N + 1):
            power = power * h
            out.append(power[n - 1] / n)
        return TruncatedSeries(out, N)

    def to_json(self) -> list[str]:
        return [fraction_to_str(c) for c in self._c]


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_div(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a / b


def series_exp(a: TruncatedSeries) -> TruncatedSeries:
    return a.exp()


def series_log(a: TruncatedSeries) -> TruncatedSeries:
    return a.log()


def series_compose(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a.compose(b)


def series_reversion(a: TruncatedSeries) -> TruncatedSeries:
    return a.reversion()
