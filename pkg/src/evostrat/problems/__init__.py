"""Benchmark problems, the name registry and batched Monte-Carlo evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import random as jr
from .cartpole import OBS_DIM, cartpole_rollout, initial_states, rollout_batch
from .functions import ackley, griewank, rastrigin, rosenbrock, sphere
from .mlp import MlpSpec, mlp_forward, mlp_forward_batch


@dataclass
class FunctionProblem:
    """Deterministic analytic objective."""

    name: str
    num_dims: int
    fn: Callable
    bounds: tuple[float, float] | None = None
    optimum_value: float = 0.0
    optimum: float = 0.0
    stochastic: bool = field(default=False, init=False)

    def evaluate(self, population, keys=None) -> np.ndarray:
        return self.fn(np.asarray(population, dtype=np.float64))


class CartPoleProblem:
    """Neuroevolution on cart-pole with a tanh MLP policy; fitness is the negated return."""

    stochastic = True
    name = "cartpole"
    bounds = None
    optimum_value = None

    def __init__(self, hidden=(16,), max_steps: int = 500):
        self.spec = MlpSpec.build(OBS_DIM, 1, hidden)
        self.layout = self.spec.layout()
        self.num_dims = self.layout.total_dims
        self.max_steps = int(max_steps)

    def evaluate(self, population, keys) -> np.ndarray:
        """One episode per row, the row's start state drawn from ``keys[row]``."""
        population = np.atleast_2d(population)
        init = initial_states(np.asarray(keys))
        return -rollout_batch(population, self.layout, self.spec, init, self.max_steps)


_FUNCTIONS = {
    "sphere": (sphere, (-5.0, 5.0), 0.0),
    "rosenbrock": (rosenbrock, (-5.0, 10.0), 1.0),
    "rastrigin": (rastrigin, (-5.12, 5.12), 0.0),
    "ackley": (ackley, (-32.768, 32.768), 0.0),
    "griewank": (griewank, (-600.0, 600.0), 0.0),
}

PROBLEMS = tuple(_FUNCTIONS) + ("cartpole",)


def make_problem(name: str, num_dims: int | None = None, **kwargs):
    if name in _FUNCTIONS:
        if num_dims is None or num_dims < 1:
            raise ValueError(f"{name} needs num_dims >= 1")
        fn, bounds, opt = _FUNCTIONS[name]
        if name == "rosenbrock" and num_dims < 2:
            raise ValueError("rosenbrock needs num_dims >= 2")
        return FunctionProblem(name, int(num_dims), fn, bounds, 0.0, opt)
    if name == "cartpole":
        return CartPoleProblem(**kwargs)
    raise KeyError(f"unknown problem {name!r}; available: {', '.join(PROBLEMS)}")


def rollout_keys(rng, popsize: int, n_rollouts: int) -> np.ndarray:
    """Keys ``(popsize, n_rollouts, 2)``; member ``j`` always gets the same keys for a given rng."""
    member_keys = jr.split(rng, popsize)
    return np.stack([jr.split(k, n_rollouts) for k in member_keys])


def evaluate_batched(problem, population, n_rollouts: int, rng) -> np.ndarray:
    """Mean fitness over ``n_rollouts`` Monte-Carlo rollouts per member."""
    if n_rollouts < 1:
        raise ValueError("n_rollouts must be >= 1")
    population = np.atleast_2d(np.asarray(population, dtype=np.float64))
    if not getattr(problem, "stochastic", False):
        return np.asarray(problem.evaluate(population), dtype=np.float64)
    n = population.shape[0]
    keys = rollout_keys(rng, n, n_rollouts)
    flat = problem.evaluate(np.repeat(population, n_rollouts, axis=0), keys.reshape(-1, 2))
    per_rollout = np.asarray(flat, dtype=np.float64).reshape(n, n_rollouts)
    total = np.zeros(n)
    for r in range(n_rollouts):
        total = total + per_rollout[:, r]
    return total / n_rollouts


__all__ = [
    "CartPoleProblem", "FunctionProblem", "MlpSpec", "PROBLEMS", "ackley", "cartpole_rollout",
    "evaluate_batched", "griewank", "make_problem", "mlp_forward", "mlp_forward_batch",
    "rastrigin", "rollout_keys", "rosenbrock", "sphere",
]
