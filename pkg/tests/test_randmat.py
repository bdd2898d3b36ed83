from __future__ import annotations

import math

import numpy as np
import pytest

from dtmoments.errors import ConfigurationError, DomainError
from dtmoments.randmat import (
    McEstimate,
    dtc_norm_closed,
    parse_models,
    parse_word,
    resolvent_norm_checks,
    resolvent_series_exact,
    run_trials,
    s_norm_closed,
    sample_dtc,
    sample_ginibre,
    sample_s,
    sample_ut_gaussian,
    tnorm_closed,
    word_moment_mc,
)


def test_ut_pattern():
    m = sample_ut_gaussian(2, np.random.default_rng(0))
    assert m[0, 1] != 0 and m[0, 0] == m[1, 0] == m[1, 1] == 0
    m = sample_ut_gaussian(30, np.random.default_rng(1))
    assert np.all(np.tril(m) == 0)


def test_ut_variance_exact_finite_n():
    est = word_moment_mc("T*,T", 50, 10_000, seed=3)
    assert abs(est.mean - 49 / 100) < 3 * est.stderr


def test_ginibre_moments():
    est = word_moment_mc("Y*,Y", 50, 10_000, seed=4)
    assert abs(est.mean - 1) < 3 * est.stderr
    est = word_moment_mc("Y", 50, 10_000, seed=5)
    assert abs(est.mean) < 3 * est.stderr * math.sqrt(2)


def test_split_streams_are_uncorrelated():
    vals = run_trials(lambda i, seq: complex(np.trace(sample_ginibre(20, np.random.Generator(np.random.PCG64(seq))))), 9, 4000)
    v = np.real(vals)
    assert abs(np.corrcoef(v[0::2], v[1::2])[0, 1]) < 0.05


def test_word_moment_examples():
    est = word_moment_mc("T*,T", 200, 2000, seed=11)
    assert abs(est.mean - 0.5) < max(3 * est.stderr, 2 / 200)
    est = word_moment_mc("T*,T*,T,T", 200, 1000, seed=12)
    assert abs(est.mean - 1 / 6) < max(3 * est.stderr, 5 / 200)
    est = word_moment_mc("T", 200, 1000, seed=13)
    assert abs(est.mean) < 3 * max(est.stderr, 1e-300)


def test_seed_determinism():
    a = word_moment_mc("T*,T,T*,T", 40, 50, seed=21)
    b = word_moment_mc("T*,T,T*,T", 40, 50, seed=21, threads=1)
    assert a == b
    assert a.mean == b.mean and a.stderr == b.stderr


def test_unbalanced_words_vanish():
    rng = np.random.default_rng(0)
    for _ in range(20):
        length = int(rng.integers(1, 6))
        letters = list(rng.choice(["T", "T*"], size=length))
        if letters.count("T") == letters.count("T*"):
            letters.append("T")
        est = word_moment_mc(",".join(letters), 30, 200, seed=int(rng.integers(1, 2**31)))
        # nilpotent products can be exactly zero: then stderr is 0 too
        assert abs(est.mean) <= 4 * est.stderr + 1e-15


def test_convergence_direction():
    closer = 0
    for r in range(5):
        small = word_moment_mc("T*,T,T*,T", 50, 200, seed=100 + r)
        large = word_moment_mc("T*,T,T*,T", 400, 200, seed=200 + r)
        closer += abs(large.mean - 2 / 3) < abs(small.mean - 2 / 3)
    assert closer >= 4


def test_t_operator_norm_approaches_sqrt_e():
    norms = []
    for seq in np.random.SeedSequence(5).spawn(8):
        m = sample_ut_gaussian(1024, np.random.Generator(np.random.PCG64(seq)))
        norms.append(np.linalg.norm(m, 2))
    assert 1.55 <= float(np.median(norms)) <= 1.75


def test_s_sampler_first_moment():
    est = word_moment_mc("S*,S", 60, 2000, seed=6, models="S=s(2;1)")
    assert abs(est.mean - 3 * 59 / 120) < 3 * est.stderr


def test_dtc_diagonal_in_disk():
    m = sample_dtc(100, np.random.default_rng(0), 0.5, 1.0)
    assert np.all(np.abs(np.diag(m)) <= 0.5)
    assert np.all(np.tril(m, -1) == 0)


def test_parsing():
    models = parse_models("T=ut,Y=ginibre,S=s(2;1)")
    assert models["S"] == ("s", (2.0, 1.0))
    assert parse_word("T*,Y", models) == [("T", True), ("Y", False)]
    with pytest.raises(ConfigurationError):
        parse_word("Q", models)
    with pytest.raises(ConfigurationError):
        parse_models("T=wishart")
    with pytest.raises(ConfigurationError):
        parse_models("S=s(2)")


def test_mc_estimate_from_samples():
    est = McEstimate.from_samples([1, 2, 3, 4], 1, 0)
    assert est.mean == 2.5
    assert abs(est.stderr - math.sqrt(5 / 3 / 4)) < 1e-15
    with pytest.raises(DomainError):
        McEstimate.from_samples([], 1, 0)


def test_closed_forms():
    assert abs(tnorm_closed(2) - 4 * (math.exp(0.25) - 1)) < 1e-15
    assert abs(float(resolvent_series_exact(0.25)) - 4 * math.expm1(0.25)) < 1e-14
    assert abs(s_norm_closed(math.sqrt(0.1), 2, 1) - 1.17532) < 1e-5
    # d -> 0 recovers the exponential form
    assert abs(dtc_norm_closed(0.3, 1e-6, 1) - math.expm1(0.09) / 0.09) < 1e-9
    with pytest.raises(DomainError):
        dtc_norm_closed(2, 1, 1)


@pytest.mark.parametrize("which,params", [("t", {"a": 2}), ("s", {"lam": math.sqrt(0.1), "a": 2, "b": 1}), ("dtc", {"lam": 0.3, "d": 1, "c": 1})])
def test_resolvent_norms(which, params):
    rep = resolvent_norm_checks(which, params, 200, 100, seed=7)
    assert rep.passed


def test_resolvent_outside_region_is_flagged():
    assert not resolvent_norm_checks("s", {"lam": 2, "a": 2, "b": 1}, 50, 5, seed=1).applicable
