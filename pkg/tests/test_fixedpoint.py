from __future__ import annotations

import math

import numpy as np
import pytest

from dtmoments.errors import DomainError
from dtmoments.fixedpoint import (
    ExpFamily,
    build_w,
    check_boundary_conditions,
    check_delta_k_vanishes,
    check_fixed_point,
    check_fixed_point_k1,
    check_s_fixed_point,
    default_grid,
    default_mu0,
    hankel_delta,
    integrate_lower,
    integrate_upper,
    s_fixed_point_solution,
)


def det2(a, b, c, d):
    return a * d - b * c


def test_build_w_examples():
    w = build_w(2, 10, 0.0)
    assert abs(w.entries[(0, 0)] - 0.1) < 1e-8
    assert w.entries[(1, 1)] == w.entries[(3, 3)]
    w = build_w(3, 12, 0.5)
    for l in range(6):
        v = w.entries[(l, l)]
        assert np.isfinite(v) and 0.5 < abs(v) * 12 < 2


@pytest.mark.parametrize("k", [2, 3, 4])
def test_build_w_sparsity(k):
    w = build_w(k, 20, 0.4)
    assert set(w.entries) <= w.pattern()
    dense = w.dense()
    mask = np.zeros_like(dense, dtype=bool)
    for i, j in w.pattern():
        mask[i, j] = True
    assert np.all(dense[~mask] == 0)


@pytest.mark.parametrize("mu", [10, 10j, 15, 12 - 5j])
def test_k2_general_path_matches_explicit_formulas(mu):
    # the 4x4 treatment written out with 2x2 determinants of f^(-1), f, f', f''
    fam = ExpFamily(2, mu)
    for x in (0.0, 0.3, 1.0):
        fm1, f0, f1, f2 = (fam.deriv(j, x) for j in (-1, 0, 1, 2))
        d1 = det2(fm1, f0, f0, f1)
        w22 = -(1 / mu) * d1 / f0**2
        w24 = mu**-2 * fm1 * d1 / f0**2
        w42 = f1 / f0**2
        w33 = mu**2 * f0 * det2(f0, f1, f1, f2) / d1**2
        w = build_w(2, mu, x)
        for got, want in ((w.entries[(1, 1)], w22), (w.entries[(3, 3)], w22), (w.entries[(1, 3)], w24),
                          (w.entries[(3, 1)], w42), (w.entries[(2, 2)], w33), (w.entries[(0, 0)], f0)):
            assert abs(got - want) <= 1e-12 * abs(want)
        block = w.block(0)
        assert abs(np.linalg.det(block) - (-(mu**-2) * d1 / f0**2)) <= 1e-10 * abs(d1 / f0**2) * abs(mu) ** -2


def test_fixed_point_examples():
    assert check_fixed_point(2, 10, default_grid(21)).max_residual < 1e-7
    assert check_fixed_point(3, 15, default_grid(11)).max_residual < 1e-6


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("mu", [10, 10j, 20])
def test_fixed_point_passes(k, mu):
    rep = check_fixed_point(k, mu)
    assert rep.passed, rep.details


@pytest.mark.parametrize("k", [2, 3, 4])
def test_quadrature_agrees_with_closed_forms(k):
    rep = check_fixed_point(k, 10)
    rows = rep.details[2]["closed_vs_quadrature"]
    assert len(rows) == 2 * k
    assert max(r["relative_difference"] for r in rows) < 1e-7


def test_closed_forms_are_not_vacuous():
    # perturbing mu on one side must break the equations
    rep = check_fixed_point(2, 10)
    good = rep.max_residual
    fam = ExpFamily(2, 10)
    bad = ExpFamily(2, 10.5)
    x = default_grid()
    diff = np.max(np.abs(fam.deriv(-1, x) - bad.deriv(-1, x)))
    assert diff > 1e6 * good


def test_delta_k_vanishes_examples():
    assert check_delta_k_vanishes(2, 10).max_residual < 1e-8
    assert check_delta_k_vanishes(4, 20).max_residual < 1e-8


def test_lower_deltas_do_not_vanish():
    fam = ExpFamily(3, 15)
    x = default_grid()
    for j in range(3):
        d = hankel_delta(fam, j, -j, x)
        assert np.min(np.abs(d)) > 1e-3 * 15 ** (-j - 1)


def test_boundary_conditions():
    for k in (1, 2, 3, 4):
        assert check_boundary_conditions(ExpFamily(k, 12)).passed


def test_f_asymptotics_slope():
    # |f - 1/mu| ~ C |mu|^{-2k-1}
    x = np.linspace(0, 1, 11)
    scaled = []
    for mu in (10, 20, 40):
        f = ExpFamily(2, mu).deriv(0, x)
        scaled.append(np.max(np.abs(f - 1 / mu)) * mu**5)
    assert max(scaled) / min(scaled) < 4
    slope = math.log(scaled[2] / mu**5 / (scaled[0] / 10**5)) / math.log(4)
    assert abs(slope + 5) < 0.2


def test_k1_fixed_point():
    for mu in (10, 3, 5j):
        assert check_fixed_point_k1(mu).passed
    assert check_fixed_point(1, 10).name == "fixed_point_k1"
    assert check_delta_k_vanishes(1, 10).passed


def test_small_mu_is_noted_not_rejected():
    assert default_mu0(3) > 10
    rep = check_fixed_point(3, 10)
    assert rep.passed and rep.notes


def test_family_domain():
    with pytest.raises(DomainError):
        ExpFamily(2, 1)
    with pytest.raises(DomainError):
        ExpFamily(2, 10).deriv(3, 0.5)


def test_quadrature_on_known_integrals():
    x = np.linspace(0, 1, 7)
    assert np.max(np.abs(integrate_lower(np.exp, x) - (np.exp(x) - 1))) < 1e-13
    assert np.max(np.abs(integrate_upper(np.cos, x) - (math.sin(1) - np.sin(x)))) < 1e-13


def test_s_fixed_point_examples():
    assert check_s_fixed_point(2, 1, 1, -0.5).max_residual < 1e-9
    rep = check_s_fixed_point(2, 1, 0.3, -0.3)
    assert rep.passed and rep.details[1]["z12_max_deviation"] < 1e-12


@pytest.mark.parametrize("args", [(2, 1, 1, -0.5), (2, 1, 0.3, -0.3), (1.5, 0.5, 0, -0.4), (3, 1, 0.5 + 0.5j, -0.6)])
def test_s_fixed_point_cases(args):
    assert check_s_fixed_point(*args).passed


def test_s_fixed_point_domain():
    with pytest.raises(DomainError):
        s_fixed_point_solution(1, 2, 0.3, -0.1)
    with pytest.raises(DomainError):
        s_fixed_point_solution(2, 1, 0.3, 0.1)
    with pytest.raises(DomainError):
        s_fixed_point_solution(2, 1, 0.3, -5)


def test_s_solution_has_positive_imaginary_mu():
    assert s_fixed_point_solution(2, 1, 1, -0.5)["mu"].imag > 0
