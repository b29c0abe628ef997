import numpy as np
import pytest

from evostrat import random as jr, states_equal
from evostrat.problems import make_problem
from evostrat.strategies import DE, PSO, GaussianGA
from evostrat.strategies.meo import de_donors, de_trials, pso_velocity

from conftest import advance


def test_pso_velocity_hand_example():
    v = pso_velocity(
        np.array([0.0]), np.array([1.0]), np.array([2.0]), np.array([4.0]),
        np.array([0.5]), np.array([0.5]), 0.5, 1.0, 1.0,
    )
    assert v[0] == 3.5


def test_pso_velocity_without_attraction():
    x = np.array([1.0, -2.0])
    v = pso_velocity(x, np.array([0.3, 0.4]), x, x, np.ones(2), np.ones(2), 0.729, 1.5, 1.5)
    np.testing.assert_array_equal(v, 0.729 * np.array([0.3, 0.4]))


def test_pso_defaults():
    p = PSO(8, 2).default_params
    assert (p.inertia, p.c_cognitive, p.c_social) == (0.729, 1.49445, 1.49445)


def test_pso_bests_are_monotone():
    s = PSO(10, 3)
    p = s.default_params
    problem = make_problem("rastrigin", 3)
    rng = jr.prng_key(0)
    state = s.initialize(rng, p, init_mean=np.full(3, 2.0))
    reported = np.full(10, np.inf)
    prev_g = np.inf
    for _ in range(40):
        rng, ra = jr.split(rng)
        x, state = s.ask(ra, state, p)
        f = problem.evaluate(x)
        reported = np.minimum(reported, f)
        state = s.tell(x, f, state, p)
        np.testing.assert_array_equal(state.pbest_f, reported)
        assert state.gbest_f == state.pbest_f.min() <= prev_g
        prev_g = state.gbest_f


def test_pso_no_improvement_keeps_bests():
    s = PSO(6, 2)
    p = s.default_params
    state, rng = advance(s, p, make_problem("sphere", 2), 3)
    x, state = s.ask(rng, state, p)
    new = s.tell(x, np.full(6, 1e9), state, p)
    np.testing.assert_array_equal(new.pbest_x, state.pbest_x)
    np.testing.assert_array_equal(new.gbest_x, state.gbest_x)
    f = np.full(6, 1e9)
    f[4] = -1.0
    new = s.tell(x, f, state, p)
    np.testing.assert_array_equal(new.gbest_x, x[4])
    assert new.gbest_f == -1.0


def test_de_hand_examples():
    archive = np.array([[0.0, 0.0], [2.0, 2.0], [0.0, 0.0], [9.0, 9.0]])
    donors = np.array([[0, 1, 2]] * 4)
    full = np.ones((4, 2), bool)
    np.testing.assert_array_equal(de_trials(archive, donors, full, 0.5)[3], [1.0, 1.0])
    np.testing.assert_array_equal(de_trials(archive, donors, full, 0.0), archive[[0, 0, 0, 0]])


def test_de_donors_are_distinct():
    d = de_donors(jr.prng_key(0), 7)
    for j, row in enumerate(d):
        assert len(set(row.tolist()) | {j}) == 4


def test_de_rejects_small_population():
    with pytest.raises(ValueError, match="popsize"):
        DE(3, 2).initialize(jr.prng_key(0))


def test_de_trials_differ_from_targets():
    s = DE(12, 5)
    p = s.default_params.replace(cross_over_rate=0.0)
    state, rng = advance(s, p, make_problem("sphere", 5), 2)
    x, _ = s.ask(rng, state, p)
    assert np.all(np.sum(x != state.archive, axis=1) >= 1)


def test_de_greedy_selection():
    s = DE(6, 2)
    p = s.default_params
    state, rng = advance(s, p, make_problem("sphere", 2), 3)
    x, state = s.ask(rng, state, p)
    worse = s.tell(x, state.fitness + 1.0, state, p)
    np.testing.assert_array_equal(worse.archive, state.archive)
    better = s.tell(x, state.fitness - 1.0, state, p)
    np.testing.assert_array_equal(better.archive, x)


def test_de_archive_fitness_monotone():
    s = DE(8, 3)
    p = s.default_params
    problem = make_problem("rosenbrock", 3)
    rng = jr.prng_key(1)
    state = s.initialize(rng, p)
    prev = state.fitness
    for _ in range(30):
        rng, ra = jr.split(rng)
        x, state = s.ask(ra, state, p)
        state = s.tell(x, problem.evaluate(x), state, p)
        assert np.all(state.fitness <= prev)
        np.testing.assert_array_equal(state.fitness, problem.evaluate(state.archive))
        prev = state.fitness


def test_de_brute_force_generation():
    s = DE(4, 1)
    p = s.default_params
    state = s.initialize(jr.prng_key(0), p)
    x0, state = s.ask(jr.prng_key(1), state, p)
    state = s.tell(x0, x0[:, 0] ** 2, state, p)
    key = jr.prng_key(2)
    trial, _ = s.ask(key, state, p)

    # replay the random transcript by hand
    rng_donor, rng_cross, rng_forced = jr.split(key, 3)
    u = jr.uniform(rng_donor, (4, 4))
    cu = jr.uniform(rng_cross, (4, 1))
    forced = jr.randint(rng_forced, 4, 1)
    expected = []
    for j in range(4):
        others = sorted((k for k in range(4) if k != j), key=lambda k: u[j, k])
        a, b, c = (state.archive[k, 0] for k in others)
        take = cu[j, 0] < 0.9 or forced[j] == 0
        expected.append(a + 0.8 * (b - c) if take else state.archive[j, 0])
    np.testing.assert_array_equal(trial[:, 0], expected)


def test_ga_zero_sigma_copies_parents():
    s = GaussianGA(20, 3)
    p = s.default_params.replace(sigma_limit=0.0)
    state, rng = advance(s, p, make_problem("sphere", 3), 2)
    state = state.replace(sigma=0.0)
    x, _ = s.ask(rng, state, p)
    for row in x:
        assert any(np.array_equal(row, e) for e in state.elite_x)
    np.testing.assert_array_equal(x[0], state.elite_x[0])
    np.testing.assert_array_equal(state.elite_x[0], state.best_member)


def test_ga_spread_linear_in_sigma():
    s = GaussianGA(10_001, 2)
    p = s.default_params.replace(elite_ratio=1 / 10_001)
    state = s.initialize(jr.prng_key(0), p)
    for sigma in (0.1, 0.4):
        x, _ = s.ask(jr.prng_key(5), state.replace(sigma=sigma), p)
        assert np.std(x[1:], axis=0) == pytest.approx([sigma, sigma], rel=0.03)


def test_ga_archive_rules():
    s = GaussianGA(8, 2)
    p = s.default_params
    state, rng = advance(s, p, make_problem("sphere", 2), 4)
    x, state = s.ask(rng, state, p)
    assert np.all(np.diff(state.elite_f) >= 0)
    worse = s.tell(x, np.full(8, 1e9), state, p)
    np.testing.assert_array_equal(worse.elite_x, state.elite_x)
    np.testing.assert_array_equal(worse.elite_f, state.elite_f)


def test_ga_single_elite_is_best_ever():
    s = GaussianGA(6, 2)
    p = s.default_params.replace(elite_ratio=0.1)
    problem = make_problem("rastrigin", 2)
    rng = jr.prng_key(2)
    state = s.initialize(rng, p, init_mean=[1.0, 1.0])
    best = np.inf
    for _ in range(25):
        rng, ra = jr.split(rng)
        x, state = s.ask(ra, state, p)
        f = problem.evaluate(x)
        best = min(best, f.min())
        state = s.tell(x, f, state, p)
        assert state.elite_f.shape == (1,) and state.elite_f[0] == best


def _transform(f):
    return np.exp(f) + 7


@pytest.mark.parametrize("cls", [PSO, DE, GaussianGA])
def test_monotone_transform_invariance(cls):
    s = cls(8, 3)
    p = s.default_params
    problem = make_problem("sphere", 3)
    rng = jr.prng_key(3)
    a = b = s.initialize(rng, p, init_mean=np.full(3, 0.5))
    for _ in range(6):
        rng, ra = jr.split(rng)
        xa, a = s.ask(ra, a, p)
        xb, b = s.ask(ra, b, p)
        f = problem.evaluate(xa)
        a = s.tell(xa, f, a, p)
        b = s.tell(xb, _transform(f), b, p)
        np.testing.assert_array_equal(a.mean, b.mean)
    if cls is PSO:
        np.testing.assert_array_equal(a.pbest_x, b.pbest_x)
    elif cls is DE:
        np.testing.assert_array_equal(a.archive, b.archive)
    else:
        np.testing.assert_array_equal(a.elite_x, b.elite_x)


def test_ga_permutation_invariance():
    s = GaussianGA(10, 3)
    p = s.default_params
    state, rng = advance(s, p, make_problem("sphere", 3), 3)
    x, state = s.ask(rng, state, p)
    f = make_problem("sphere", 3).evaluate(x)
    perm = jr.permutation(jr.prng_key(9), 10)
    assert states_equal(s.tell(x, f, state, p), s.tell(x[perm], f[perm], state, p))


def test_de_permutation_equivariance():
    # selection is slot-wise, so permuting rows together with the archive permutes the result
    s = DE(8, 2)
    p = s.default_params
    state, rng = advance(s, p, make_problem("sphere", 2), 3)
    x, state = s.ask(rng, state, p)
    f = make_problem("sphere", 2).evaluate(x)
    perm = jr.permutation(jr.prng_key(9), 8)
    a = s.tell(x, f, state, p)
    b = s.tell(x[perm], f[perm], state.replace(archive=state.archive[perm], fitness=state.fitness[perm]), p)
    np.testing.assert_array_equal(b.archive, a.archive[perm])
    np.testing.assert_array_equal(b.mean, a.mean)


def test_pso_permutation_equivariance():
    s = PSO(8, 2)
    p = s.default_params
    state, rng = advance(s, p, make_problem("sphere", 2), 3)
    x, state = s.ask(rng, state, p)
    f = make_problem("sphere", 2).evaluate(x)
    perm = jr.permutation(jr.prng_key(9), 8)
    a = s.tell(x, f, state, p)
    b = s.tell(x[perm], f[perm], state.replace(pbest_x=state.pbest_x[perm], pbest_f=state.pbest_f[perm]), p)
    np.testing.assert_array_equal(b.pbest_x, a.pbest_x[perm])
    np.testing.assert_array_equal(b.gbest_x, a.gbest_x)
