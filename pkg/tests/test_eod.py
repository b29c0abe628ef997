import math

import numpy as np
import pytest

from evostrat import random as jr, states_equal
from evostrat.core import StrategyError
from evostrat.problems import make_problem
from evostrat.strategies import CMAES, GaussianES, SepCMAES, cma_constants
from evostrat.strategies.eod import eigen_decompose

from conftest import advance
from oracles import cma_tutorial_trajectory


def test_constants_match_tutorial_values():
    k = cma_constants(8, 2)
    assert k.mu == 4
    assert k.weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.all(np.diff(k.weights) < 0) and np.all(k.weights > 0)
    raw = np.log(4.5) - np.log([1, 2, 3, 4])
    np.testing.assert_allclose(k.weights, raw / raw.sum(), rtol=1e-15)
    mueff = 1 / np.sum(k.weights**2)
    assert k.c_sigma == pytest.approx((mueff + 2) / (2 + mueff + 5))
    assert k.c_1 == pytest.approx(2 / (3.3**2 + mueff))
    assert k.lazy_gap == 1
    assert cma_constants(16, 200).lazy_gap > 1


def test_identity_covariance_sampling_is_exact():
    s = CMAES(5, 3)
    p = s.default_params
    state = s.initialize(jr.prng_key(0), p, init_mean=[1.0, 2.0, 3.0])
    key = jr.prng_key(1)
    x, _ = s.ask(key, state, p)
    np.testing.assert_array_equal(x, state.mean + jr.normal(key, (5, 3)))


def test_sample_covariance_matches_state():
    s = CMAES(100_000, 3)
    p = s.default_params
    C = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, -0.3], [0.0, -0.3, 0.5]])
    C, B, D = eigen_decompose(C)
    state = s.initialize(jr.prng_key(0), p).replace(sigma=0.7, C=C, eigvecs=B, eigvals_sqrt=D)
    x, _ = s.ask(jr.prng_key(2), state, p)
    emp = np.cov(x, rowvar=False)
    target = 0.49 * C
    assert np.linalg.norm(emp - target) / np.linalg.norm(target) < 0.05
    x2, _ = s.ask(jr.prng_key(2), state, p)
    np.testing.assert_array_equal(x, x2)


@pytest.mark.parametrize("cls", [CMAES, SepCMAES])
def test_zero_displacement_shrinks_sigma(cls):
    s = cls(10, 3)
    p = s.default_params
    state = s.initialize(jr.prng_key(0), p, init_mean=[0.5, 0.5, 0.5])
    mu = state.consts.mu
    x = np.tile(state.mean, (10, 1))
    x[mu:] += 1.0
    f = np.concatenate([np.arange(mu, dtype=float), 100 + np.arange(10 - mu)])
    new = s.tell(x, f, state, p)
    np.testing.assert_array_equal(new.mean, state.mean)
    k = state.consts
    assert new.sigma == pytest.approx(state.sigma * math.exp(-k.c_sigma / k.d_sigma), rel=1e-14)


@pytest.mark.parametrize("cls", [CMAES, SepCMAES])
def test_permutation_invariance(cls):
    s = cls(12, 4)
    p = s.default_params
    state, rng = advance(s, p, make_problem("rosenbrock", 4), 5)
    x, state = s.ask(rng, state, p)
    f = make_problem("rosenbrock", 4).evaluate(x)
    perm = jr.permutation(jr.prng_key(77), 12)
    assert states_equal(s.tell(x, f, state, p), s.tell(x[perm], f[perm], state, p))


def test_cma_matches_tutorial_oracle():
    s = CMAES(8, 2)
    p = s.default_params
    problem = make_problem("sphere", 2)
    m0 = [3.0, 3.0]
    state = s.initialize(jr.prng_key(0), p, init_mean=m0)
    keys = jr.split(jr.prng_key(42), 10)
    transcript = [jr.normal(k, (8, 2)) for k in keys]
    ref = cma_tutorial_trajectory(lambda v: float(v @ v), m0, 1.0, 8, transcript)
    for k, expected in zip(keys, ref):
        x, state = s.ask(k, state, p)
        state = s.tell(x, problem.evaluate(x), state, p)
        for name in ("mean", "sigma", "C", "p_sigma", "p_c"):
            np.testing.assert_allclose(getattr(state, name), expected[name], rtol=0, atol=1e-6)


def test_sep_defaults():
    p = SepCMAES(16, 4).default_params
    assert p.elite_ratio == 0.4 and p.sigma_init == 0.05
    assert SepCMAES(16, 4).initialize(jr.prng_key(0)).consts.mu == 6


def test_sep_matches_full_cma_in_one_dimension():
    full, sep = CMAES(8, 1), SepCMAES(8, 1)
    pf = full.default_params.replace(sigma_init=0.8)
    ps = sep.default_params.replace(sigma_init=0.8, elite_ratio=0.5)
    a = full.initialize(jr.prng_key(0), pf, init_mean=[2.0])
    b = sep.initialize(jr.prng_key(0), ps, init_mean=[2.0])
    rng = jr.prng_key(3)
    for _ in range(60):
        rng, ra = jr.split(rng)
        xa, a = full.ask(ra, a, pf)
        xb, b = sep.ask(ra, b, ps)
        a = full.tell(xa, np.abs(xa[:, 0] - 0.3), a, pf)
        b = sep.tell(xb, np.abs(xb[:, 0] - 0.3), b, ps)
        np.testing.assert_allclose(b.mean, a.mean, rtol=1e-10, atol=1e-12)
        assert b.sigma == pytest.approx(a.sigma, rel=1e-10)
        np.testing.assert_allclose(b.C, np.diag(a.C), rtol=1e-10)


def test_sep_diagonal_stays_positive():
    s = SepCMAES(10, 6)
    p = s.default_params
    rng = jr.prng_key(4)
    state = s.initialize(rng, p)
    for _ in range(1000):
        rng, ra, rf = jr.split(rng, 3)
        x, state = s.ask(ra, state, p)
        state = s.tell(x, jr.uniform(rf, 10), state, p)
        assert np.all(state.C > 0) and state.sigma > 0


def test_covariance_symmetric_after_tell():
    s = CMAES(10, 5)
    state, _ = advance(s, s.default_params, make_problem("rosenbrock", 5), 30)
    assert np.max(np.abs(state.C - state.C.T)) < 1e-12


def test_lazy_eigendecomposition_schedule():
    s = CMAES(10, 200)
    p = s.default_params
    gap = cma_constants(10, 200).lazy_gap
    assert gap > 1
    problem = make_problem("sphere", 200)
    rng = jr.prng_key(0)
    state = s.initialize(rng, p, init_mean=np.ones(200))
    refreshed = []
    for _ in range(3 * gap + 1):
        rng, ra = jr.split(rng)
        before = state.eigen_gen
        x, state = s.ask(ra, state, p)
        if state.eigen_gen != before:
            refreshed.append(state.gen_counter)
        state = s.tell(x, problem.evaluate(x), state, p)
    assert refreshed == [gap, 2 * gap, 3 * gap]


def test_eigen_repair():
    C, B, D = eigen_decompose(np.diag([1.0, 0.0]))
    assert np.all(D > 0) and C[1, 1] > 0
    with pytest.raises(StrategyError, match="condition"):
        eigen_decompose(np.diag([1.0, -1.0]))


def test_gaussian_es_recombination():
    s = GaussianES(6, 2)
    state = s.initialize(jr.prng_key(0))
    x, state = s.ask(jr.prng_key(1), state, s.default_params)
    f = np.sum(x * x, axis=1)
    full = s.tell(x, f, state, s.default_params.replace(elite_ratio=1.0))
    np.testing.assert_allclose(full.mean, x.mean(axis=0), rtol=1e-15)
    elitist = s.tell(x, f, state, s.default_params.replace(elite_ratio=0.1))
    np.testing.assert_array_equal(elitist.mean, x[np.argmin(f)])


def test_gaussian_es_sigma_schedule():
    s = GaussianES(4, 1)
    p = s.default_params.replace(sigma_init=1.0, sigma_decay=0.5, sigma_limit=0.1)
    sigmas = []
    st = s.initialize(jr.prng_key(0), p)
    for g in range(6):
        x, st = s.ask(jr.prng_key(g), st, p)
        st = s.tell(x, x[:, 0] ** 2, st, p)
        sigmas.append(st.sigma)
    assert sigmas == [0.5, 0.25, 0.125, 0.1, 0.1, 0.1]
