import numpy as np
import pytest

from evostrat import random as jr
from evostrat.problems import evaluate_batched, make_problem

_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record a pass/fail line for the acceptance summary."""

    def record(number, description, passed, detail=""):
        _ACCEPTANCE.append((number, description, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {description} {detail}".rstrip())


def advance(strategy, params, problem, generations, seed=0, init_mean=None):
    """Run a few generations by hand and return the state plus the next rng."""
    rng = jr.prng_key(seed)
    rng, rng_init = jr.split(rng)
    state = strategy.initialize(rng_init, params, init_mean=init_mean)
    for _ in range(generations):
        rng, rng_ask, rng_eval = jr.split(rng, 3)
        x, state = strategy.ask(rng_ask, state, params)
        state = strategy.tell(x, evaluate_batched(problem, x, 1, rng_eval), state, params)
    return state, rng


@pytest.fixture
def sphere2():
    return make_problem("sphere", 2)
