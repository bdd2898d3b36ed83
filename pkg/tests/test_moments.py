from __future__ import annotations

import math
from fractions import Fraction

import pytest

from dtmoments.errors import DomainError
from dtmoments.exact import ExactPoly
from dtmoments.moments import (
    check_q_consistency,
    check_sniady,
    f_polys,
    genfun_fab_check,
    p_polys,
    q_polys,
    sniady_closed,
    tau_tlambda_closed,
)

F = Fraction


def test_tau_closed_examples():
    assert tau_tlambda_closed(1, 0) == F(1, 2)
    assert tau_tlambda_closed(2, 0) == F(2, 3)
    assert tau_tlambda_closed(2, 1) == F(11, 3)


def test_sniady_examples():
    assert sniady_closed(1, 3) == F(9, 8)
    assert sniady_closed(3, 1) == F(1, 24)
    assert sniady_closed(2, 2) == F(2, 15)


def test_sniady_uses_big_integers():
    # n = 8, k = 5 needs 41!
    assert sniady_closed(5, 8) == F(8**40, math.factorial(41))


def test_q_table_first_rows():
    table = q_polys(0, 2)
    assert table.polys[1] == ExactPoly([0, 1])
    assert table.polys[2] == ExactPoly([0, 1, F(1, 2)])
    assert table.taus[2] == F(2, 3)


def test_q_recursion_matches_closed_form():
    rep = check_q_consistency()
    assert rep.passed and rep.exact and rep.max_residual is None


def test_q_perturbation_is_detected():
    rep = check_q_consistency(perturb=1)
    assert not rep.passed
    assert rep.params["perturb"] == 1


def test_sniady_recursion_matches_closed_form():
    rep = check_sniady()
    assert rep.passed
    assert len(rep.details) == sum(min(8, 40 // k) for k in range(1, 6))


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_p_degree_and_boundary(k):
    table = p_polys(k, min(8, 40 // k))
    for n, p in enumerate(table.polys[1:], start=1):
        assert p.degree == n * k
        for j in range(k):
            assert p.derivative(j)(F(0)) == 0


def test_p_k1_equals_q_lambda0():
    assert p_polys(1, 8).polys == q_polys(0, 8).polys


def test_p_caps():
    with pytest.raises(DomainError):
        p_polys(7, 1)
    with pytest.raises(DomainError):
        p_polys(5, 10)
    assert p_polys(7, 1, max_k=7).taus[1] == F(1, 40320)


def test_f_first_moment_matches_t_plus_y():
    eps = F(1, 3)
    assert f_polys(1 + eps, eps, 1).taus[1] == F(1, 2) + eps


def test_f_with_b_zero_gives_words_t_star_n_t_n():
    # a = 1, b = 0: F_n = x^n/n!, the n-th k-word at n = 1
    assert list(f_polys(1, 0, 6).taus) == [sniady_closed(n, 1) for n in range(7)]


def test_genfun_fab_examples():
    assert genfun_fab_check(1, 0, F(1, 10), 20).max_residual < 1e-12
    assert genfun_fab_check(2, 1, F(1, 10), 25).max_residual < 1e-10
    rep = genfun_fab_check(2, 1, 0, 5)
    assert rep.passed and rep.max_residual == 0


def test_genfun_fab_divergent_is_flagged():
    rep = genfun_fab_check(2, 1, 3, 10)
    assert not rep.applicable


def test_domain_errors():
    with pytest.raises(DomainError):
        q_polys(-1, 3)
    with pytest.raises(DomainError):
        tau_tlambda_closed(0, 1)
    with pytest.raises(DomainError):
        p_polys(0, 3)


def test_table_rows_are_exact_strings():
    row = q_polys(1, 2).rows()[2]
    assert row["tau"] == "11/3"
    assert row["coeffs"] == ["2/1", "3/1", "1/2"]
