from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtmoments.errors import DomainError
from dtmoments.exact import (
    ExactPoly,
    TruncatedSeries,
    as_fraction,
    fraction_from_str,
    fraction_to_str,
    poly_antideriv,
    poly_defint01,
    poly_derivative,
    poly_shift,
    series_compose,
    series_exp,
    series_log,
    series_mul,
    series_reversion,
)

F = Fraction
X = ExactPoly([0, 1])

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.lists(small, max_size=9).map(ExactPoly)


def series_with(const, order=12):
    return st.lists(small, min_size=order, max_size=order).map(lambda cs: TruncatedSeries([const] + cs, order))


invertible = st.tuples(small.filter(lambda c: c != 0), st.lists(small, min_size=11, max_size=11)).map(
    lambda t: TruncatedSeries([0, t[0]] + t[1], 12)
)


def test_shift_examples():
    assert poly_shift(X**2, 1) == ExactPoly([1, 2, 1])
    assert poly_shift(ExactPoly([1]), 5) == ExactPoly([1])
    assert poly_shift(X**3 - X, -1) == ExactPoly([0, 2, -3, 1])


def test_antiderivative_examples():
    assert poly_antideriv(ExactPoly([1])) == X
    assert poly_antideriv(X) == ExactPoly([0, 0, F(1, 2)])
    assert poly_antideriv(ExactPoly([2, 0, 3])) == ExactPoly([0, 2, 0, 1])


def test_defint_examples():
    assert poly_defint01(X) == F(1, 2)
    assert poly_defint01(ExactPoly([0, 1, F(1, 2)])) == F(2, 3)
    assert poly_defint01(ExactPoly([])) == 0


def test_derivative_examples():
    assert poly_derivative(X**3) == ExactPoly([0, 0, 3])
    assert poly_derivative(ExactPoly([7])).is_zero()
    assert poly_derivative(ExactPoly([1, 1, 1])) == ExactPoly([1, 2])


def test_poly_evaluation_is_exact():
    p = ExactPoly([F(1, 3), 0, F(2, 7)])
    assert p(F(3, 2)) == F(1, 3) + F(2, 7) * F(9, 4)


def test_poly_json_roundtrip():
    p = ExactPoly([F(-3, 4), 0, F(5, 9)])
    assert p.to_json() == ["-3/4", "0/1", "5/9"]
    assert ExactPoly.from_json(p.to_json()) == p


def test_fraction_strings():
    assert fraction_to_str(F(-6, 4)) == "-3/2"
    assert fraction_from_str("-3/2") == F(-3, 2)
    assert as_fraction(0.1) == F(1, 10)
    assert as_fraction("2/6") == F(1, 3)


def test_series_examples():
    assert series_exp(TruncatedSeries.identity(3)) == TruncatedSeries([1, 1, F(1, 2), F(1, 6)], 3)
    one_over = TruncatedSeries.geometric(3)
    assert series_log(one_over) == TruncatedSeries([0, 1, F(1, 2), F(1, 3)], 3)
    assert series_mul(TruncatedSeries([1, 1], 2), TruncatedSeries([1, -1], 2)) == TruncatedSeries([1, 0, -1], 2)


def test_reversion_examples():
    z = TruncatedSeries.identity(3)
    assert series_reversion(z) == z
    assert series_reversion(TruncatedSeries([0, 1, -1], 3)) == TruncatedSeries([0, 1, 1, 2], 3)
    mobius = TruncatedSeries([0, 1, 1, 1], 3)
    assert series_reversion(mobius) == TruncatedSeries([0, 1, -1, 1], 3)


def test_order_mismatch_raises():
    with pytest.raises(DomainError):
        TruncatedSeries([1], 3) + TruncatedSeries([1], 4)


def test_reversion_needs_linear_term():
    with pytest.raises(DomainError):
        series_reversion(TruncatedSeries([0, 0, 1], 4))


def test_log_needs_unit_constant():
    with pytest.raises(DomainError):
        series_log(TruncatedSeries([2, 1], 4))


@settings(max_examples=60, deadline=None)
@given(polys, small)
def test_shift_roundtrip(p, c):
    assert poly_shift(poly_shift(p, c), -c) == p


@settings(max_examples=60, deadline=None)
@given(polys)
def test_derivative_inverts_antiderivative(p):
    assert poly_derivative(poly_antideriv(p)) == p


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_integral_is_linear(p, q):
    assert poly_defint01(p + q) == poly_defint01(p) + poly_defint01(q)


@settings(max_examples=25, deadline=None)
@given(invertible)
def test_double_reversion(a):
    assert series_reversion(series_reversion(a)) == a


@settings(max_examples=25, deadline=None)
@given(invertible)
def test_compose_with_reversion_is_identity(a):
    assert series_compose(a, series_reversion(a)) == TruncatedSeries.identity(12)


@settings(max_examples=25, deadline=None)
@given(series_with(1))
def test_exp_inverts_log(a):
    assert series_exp(series_log(a)) == a
