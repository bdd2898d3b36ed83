from __future__ import annotations

import math

import numpy as np
import pytest

from dtmoments.brown import (
    brown_grid_density,
    brown_radial_check,
    density_variation,
    disk_radius,
    entropy_bound,
    generic_entropy_bound,
    ks_uniform,
    log_energy_mc,
    log_energy_target,
    pooled_eigenvalues,
    sample_t_plus_y,
    uniform_disk_energy,
)
from dtmoments.errors import DomainError


def test_radius_formula():
    assert disk_radius(1.0) == 1 / math.sqrt(math.log(2))
    assert abs(disk_radius(1 / (math.e - 1)) - 1) < 1e-15


def test_radius_increases_with_epsilon():
    eps = [0.01, 0.1, 1, 10, 100]
    radii = [disk_radius(e) for e in eps]
    assert radii == sorted(radii)


def test_ks_uniform():
    assert ks_uniform(np.linspace(0, 1, 1001)) < 2e-3
    assert ks_uniform(np.zeros(10)) == 1.0


def test_brown_radial_eps1():
    rep = brown_radial_check(1.0, 512, 4, seed=2024)
    assert rep.passed
    assert rep.max_residual < 0.08


def test_brown_radial_detects_wrong_radius():
    eigs = pooled_eigenvalues(1.0, 128, 2, seed=1)
    rep = brown_radial_check(1.0, 128, 2, seed=1, eigs=eigs * 1.3)
    assert not rep.passed


def test_pooling_is_deterministic():
    a = pooled_eigenvalues(0.5, 64, 3, seed=8)
    b = pooled_eigenvalues(0.5, 64, 3, seed=8, threads=1)
    assert np.array_equal(a, b)


def test_density_of_zero_matrix():
    # exact regularized mass inside r is r^2/(r^2 + alpha) = 0.9 at r = 0.3
    dens = brown_grid_density(np.zeros((1, 1)), 0j, 1.0, 201, 0.01)
    assert abs(dens.mass_within(0.3) - 0.9) < 0.01
    gx, gy = dens.interior_points()
    r2 = gx**2 + gy**2
    exact = 0.01 / (math.pi * (r2 + 0.01) ** 2)
    assert np.max(np.abs(dens.density - exact)) < 0.02 * exact.max()


def test_density_constant_on_disk():
    eps = 1.0
    radius = disk_radius(eps)
    m = sample_t_plus_y(512, eps, np.random.default_rng(3))
    dens = brown_grid_density(m, 0j, 2 * radius, 21, 0.01)
    assert 0.95 <= dens.mass <= 1.05
    assert density_variation(dens, 0.7 * radius) < 0.2
    assert not dens.warnings


def test_grid_warns_when_too_small():
    m = 5 * np.eye(4)
    dens = brown_grid_density(m, 0j, 1.0, 5, 0.1)
    assert dens.warnings


def test_grid_domain():
    with pytest.raises(DomainError):
        brown_grid_density(np.eye(2), 0j, 1.0, 2, 0.1)
    with pytest.raises(DomainError):
        brown_grid_density(np.eye(2), 0j, 1.0, 5, 0.0)


def test_log_energy_examples():
    assert abs(log_energy_target(1) + math.pi**2 / 4) < 1e-15
    assert abs(log_energy_target(2) - 69.98) < 0.01
    for r in (1.0, 2.0):
        est = log_energy_mc(r, 10**6, seed=5)
        assert abs(est.mean.real - log_energy_target(r)) < 0.02 * abs(log_energy_target(r))


def test_log_energy_scaling_law():
    # substituting z -> 2z: E(2R) = 16 E(R) + 16 (pi R^2)^2 log 2
    r = 0.8
    a = log_energy_mc(r, 10**6, seed=6)
    b = log_energy_mc(2 * r, 10**6, seed=6)
    expected = 16 * (math.pi * r * r) ** 2 * math.log(2)
    assert abs(log_energy_target(2 * r) - 16 * log_energy_target(r) - expected) < 1e-12
    # same seed: the difference is exact up to rounding
    assert abs(b.mean.real - 16 * a.mean.real - expected) < 1e-9


def test_statement_version_of_energy_is_rejected_by_mc():
    # the R^2 log R variant disagrees with simulation at R = 2
    est = log_energy_mc(2.0, 10**6, seed=7)
    wrong = math.pi**2 * (4 * math.log(2) - 0.25)
    assert abs(est.mean.real - wrong) > 10 * est.stderr


def test_entropy_examples():
    res = entropy_bound(1.0)
    assert abs(res["value"] - 1.2994) < 1e-4
    assert abs(res["od"] - (1.5 - 1 / (2 * math.log(2)))) < 1e-15
    assert abs(res["od"] - 0.77865) < 1e-5


@pytest.mark.parametrize("eps", [0.1, 0.5, 1.0, 1 / (math.e - 1), 7.0])
def test_entropy_generic_bound_exceeds_closed_form_by_five_quarters(eps):
    res = entropy_bound(eps)
    generic = generic_entropy_bound(uniform_disk_energy(res["radius"]), res["od"])
    assert abs(generic - res["value"] - 1.25) < 1e-12


def test_entropy_domain():
    with pytest.raises(DomainError):
        entropy_bound(0)
    with pytest.raises(DomainError):
        generic_entropy_bound(0.0, 0.0)
