"""Strategy contract, shared state/params types and the generation loop."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import random as jr


class StrategyError(RuntimeError):
    """Numerical failure inside a strategy update."""


class EvaluationError(RuntimeError):
    """A fitness evaluation failed; carries the generation index."""

    def __init__(self, generation: int, cause: BaseException):
        super().__init__(f"evaluation failed at generation {generation}: {cause!r}")
        self.generation = generation


@dataclass(frozen=True, kw_only=True)
class StrategyParams:
    """Static per-run settings shared by every strategy."""

    popsize: int
    num_dims: int
    clip_min: float | np.ndarray | None = None
    clip_max: float | np.ndarray | None = None
    init_uniform: bool = False
    strict_fitness: bool = False
    invalid_fitness_margin: float = 1.0

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True, kw_only=True)
class StrategyState:
    mean: np.ndarray
    best_member: np.ndarray
    best_fitness: float
    gen_counter: int
    rng: np.ndarray

    def replace(self, **changes):
        return replace(self, **changes)


def states_equal(a, b) -> bool:
    """Bit-exact comparison of two state (or params) dataclasses."""
    if type(a) is not type(b):
        return False
    for f in fields(a):
        x, y = getattr(a, f.name), getattr(b, f.name)
        if hasattr(x, "__dataclass_fields__"):
            if not states_equal(x, y):
                return False
        elif isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
            x, y = np.asarray(x), np.asarray(y)
            if x.shape != y.shape or x.dtype != y.dtype or not np.array_equal(x, y, equal_nan=True):
                return False
        elif x != y and not (x != x and y != y):
            return False
    return True


class Strategy:
    """Base class for ask/tell strategies (minimisation).

    Subclasses implement ``_init_state``, ``_ask`` and ``_tell``. The public
    methods handle validation, box clipping, invalid fitness values, the
    best-so-far archive and the generation counter.
    """

    name = "strategy"
    params_class = StrategyParams
    antithetic = False
    # fitness enters the update only through its ordering
    comparison_based = True
    positive_fields: tuple[str, ...] = ()

    def __init__(self, popsize: int, num_dims: int):
        self.popsize = int(popsize)
        self.num_dims = int(num_dims)
        self.validate_params(self.default_params)

    def __repr__(self):
        return f"{type(self).__name__}(popsize={self.popsize}, num_dims={self.num_dims})"

    @property
    def default_params(self):
        return self.params_class(popsize=self.popsize, num_dims=self.num_dims)

    def validate_params(self, params) -> None:
        if params.popsize < 2:
            raise ValueError(f"popsize must be >= 2, got {params.popsize}")
        if params.num_dims < 1:
            raise ValueError(f"num_dims must be >= 1, got {params.num_dims}")
        if self.antithetic and (params.popsize < 4 or params.popsize % 2):
            raise ValueError(f"{self.name} needs an even popsize >= 4, got {params.popsize}")
        for name in self.positive_fields:
            value = getattr(params, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if params.clip_min is not None and params.clip_max is not None:
            if np.any(np.asarray(params.clip_min) > np.asarray(params.clip_max)):
                raise ValueError("clip_min must not exceed clip_max")

    # -- public protocol ---------------------------------------------------

    def initialize(self, rng, params=None, init_mean=None):
        params = self.default_params if params is None else params
        self.validate_params(params)
        rng_mean, rng_init, rng_state = jr.split(rng, 3)
        if init_mean is not None:
            mean = np.array(init_mean, dtype=np.float64).reshape(-1)
            if mean.size == 1 and params.num_dims > 1:
                mean = np.full(params.num_dims, mean[0])
            if mean.size != params.num_dims:
                raise ValueError(f"init_mean has {mean.size} entries, expected {params.num_dims}")
        elif params.init_uniform and params.clip_min is not None and params.clip_max is not None:
            u = jr.uniform(rng_mean, params.num_dims)
            lo = np.broadcast_to(params.clip_min, (params.num_dims,))
            hi = np.broadcast_to(params.clip_max, (params.num_dims,))
            mean = lo + u * (hi - lo)
        else:
            mean = np.zeros(params.num_dims)
        base = dict(
            mean=mean,
            best_member=mean.copy(),
            best_fitness=np.inf,
            gen_counter=0,
            rng=rng_state,
        )
        return self._init_state(rng_init, params, base)

    def ask(self, rng, state, params):
        if state.mean.shape != (params.num_dims,):
            raise ValueError(
                f"state has {state.mean.shape} mean, params expect {params.num_dims} dims"
            )
        x, state = self._ask(rng, state, params)
        if params.clip_min is not None or params.clip_max is not None:
            x = np.clip(x, params.clip_min, params.clip_max)
        return x, state

    def tell(self, x, fitness, state, params):
        x = np.asarray(x, dtype=np.float64)
        fitness = np.asarray(fitness, dtype=np.float64).reshape(-1)
        if x.shape != (params.popsize, params.num_dims):
            raise ValueError(
                f"population shape {x.shape} != ({params.popsize}, {params.num_dims})"
            )
        if fitness.size != params.popsize:
            raise ValueError(f"got {fitness.size} fitness values for popsize {params.popsize}")
        fitness = self.sanitize_fitness(fitness, params)
        new_state = self._tell(x, fitness, state, params)
        idx = int(np.argmin(fitness))
        if fitness[idx] < state.best_fitness:
            new_state = new_state.replace(best_member=x[idx].copy(), best_fitness=float(fitness[idx]))
        else:
            new_state = new_state.replace(
                best_member=state.best_member, best_fitness=state.best_fitness
            )
        return new_state.replace(gen_counter=state.gen_counter + 1)

    @staticmethod
    def sanitize_fitness(fitness: np.ndarray, params) -> np.ndarray:
        """Replace NaN/inf by the worst finite value plus a fixed margin."""
        bad = ~np.isfinite(fitness)
        if not bad.any():
            return fitness
        if params.strict_fitness:
            raise ValueError(f"{int(bad.sum())} non-finite fitness values")
        finite = fitness[~bad]
        worst = finite.max() if finite.size else 0.0
        out = fitness.copy()
        out[bad] = worst + params.invalid_fitness_margin
        return out

    def scale_norm(self, state) -> float:
        return float(np.linalg.norm(np.atleast_1d(state.sigma)))

    # -- subclass hooks ----------------------------------------------------

    def _init_state(self, rng, params, base: dict):
        raise NotImplementedError

    def _ask(self, rng, state, params):
        raise NotImplementedError

    def _tell(self, x, fitness, state, params):
        raise NotImplementedError


def canonical_order(fitness: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Ascending fitness, ties broken by the rows' coordinates.

    Summing in this order makes updates independent of the input row order.
    """
    keys = [x[:, d] for d in range(x.shape[1] - 1, -1, -1)]
    return np.lexsort(keys + [fitness])


@dataclass
class GenerationLog:
    """Per-generation trace of a run. ``wall_time`` is informational only."""

    gen: list = field(default_factory=list)
    best_fitness: list = field(default_factory=list)
    gen_best: list = field(default_factory=list)
    gen_mean: list = field(default_factory=list)
    scale_norm: list = field(default_factory=list)
    wall_time: list = field(default_factory=list)
    test_gen: list = field(default_factory=list)
    test_fitness: list = field(default_factory=list)
    final_state: object = None
    seed: int | None = None

    COLUMNS = ("gen", "best_fitness", "gen_best", "gen_mean", "scale_norm", "wall_time")

    def append(self, gen, best_fitness, gen_best, gen_mean, scale_norm, wall_time):
        self.gen.append(int(gen))
        self.best_fitness.append(float(best_fitness))
        self.gen_best.append(float(gen_best))
        self.gen_mean.append(float(gen_mean))
        self.scale_norm.append(float(scale_norm))
        self.wall_time.append(float(wall_time))

    def __len__(self):
        return len(self.gen)

    def records(self):
        return list(zip(*(getattr(self, c) for c in self.COLUMNS)))

    def same_trajectory(self, other: "GenerationLog") -> bool:
        """Bit-equality of every column except wall time."""
        cols = ("gen", "best_fitness", "gen_best", "gen_mean", "scale_norm", "test_gen", "test_fitness")
        return all(
            np.array_equal(np.asarray(getattr(self, c)), np.asarray(getattr(other, c)), equal_nan=True)
            for c in cols
        )


def run_loop(
    strategy,
    problem,
    num_generations: int,
    seed: int = 0,
    params=None,
    init_mean=None,
    n_rollouts: int = 1,
    test_every: int = 0,
    test_rollouts: int = 128,
) -> GenerationLog:
    """Initialize, then run ``num_generations`` ask/evaluate/tell cycles."""
    from .problems import evaluate_batched

    if num_generations < 1:
        raise ValueError("num_generations must be >= 1")
    params = strategy.default_params if params is None else params
    rng, rng_init = jr.split(jr.prng_key(seed))
    state = strategy.initialize(rng_init, params, init_mean=init_mean)
    log = GenerationLog(seed=seed)
    start = time.perf_counter()
    for g in range(num_generations):
        rng, rng_ask, rng_eval, rng_test = jr.split(rng, 4)
        x, state = strategy.ask(rng_ask, state, params)
        try:
            fitness = evaluate_batched(problem, x, n_rollouts, rng_eval)
        except Exception as exc:
            raise EvaluationError(g, exc) from exc
        state = strategy.tell(x, fitness, state, params)
        log.append(
            g,
            state.best_fitness,
            np.min(fitness),
            np.mean(fitness),
            strategy.scale_norm(state),
            time.perf_counter() - start,
        )
        if test_every and (g + 1) % test_every == 0:
            test = evaluate_batched(problem, state.mean[None, :], test_rollouts, rng_test)
            log.test_gen.append(g)
            log.test_fitness.append(float(test[0]))
    log.final_state = state
    return log
