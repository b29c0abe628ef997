"""Run configuration, multi-seed execution, restarts and CSV logs."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import random as jr
from .core import GenerationLog, run_loop
from .problems import make_problem
from .strategies import get_strategy

CSV_HEADER = ("gen", "best_fitness", "gen_best", "gen_mean", "scale_norm", "wall_time_s")


# -- restarts ----------------------------------------------------------------


@dataclass(frozen=True)
class RestartCriteria:
    """Thresholds that trigger a restart; ``None`` disables a criterion."""

    fitness_spread_tol: float | None = None
    stagnation_generations: int | None = None
    scale_tol: float | None = None

    def __post_init__(self):
        values = (self.fitness_spread_tol, self.stagnation_generations, self.scale_tol)
        if all(v is None for v in values):
            raise ValueError("enable at least one restart criterion")
        if any(v is not None and v < 0 for v in values):
            raise ValueError("restart thresholds must be non-negative")


@dataclass(frozen=True)
class RestartState:
    inner: object
    init_mean: np.ndarray | None
    last_improvement: int = 0
    num_restarts: int = 0

    @property
    def mean(self):
        return self.inner.mean

    @property
    def best_member(self):
        return self.inner.best_member

    @property
    def best_fitness(self):
        return self.inner.best_fitness

    @property
    def gen_counter(self):
        return self.inner.gen_counter


class RestartWrapper:
    """Re-initialise the wrapped strategy when a restart criterion fires.

    The best-so-far archive and the generation counter survive restarts; the
    fresh state is seeded from a key split off the old state's ``rng``. The
    population size is never changed.
    """

    def __init__(self, strategy, criteria: RestartCriteria, copy_mean: bool = False):
        self.strategy = strategy
        self.criteria = criteria
        self.copy_mean = copy_mean
        self.name = f"restart({strategy.name})"

    def __getattr__(self, item):
        if item == "strategy":
            raise AttributeError(item)
        return getattr(self.strategy, item)

    @property
    def default_params(self):
        return self.strategy.default_params

    def initialize(self, rng, params=None, init_mean=None):
        inner = self.strategy.initialize(rng, params, init_mean=init_mean)
        return RestartState(inner, None if init_mean is None else np.asarray(init_mean, dtype=float))

    def ask(self, rng, state, params):
        x, inner = self.strategy.ask(rng, state.inner, params)
        return x, replace(state, inner=inner)

    def tell(self, x, fitness, state, params):
        inner = self.strategy.tell(x, fitness, state.inner, params)
        gen = inner.gen_counter
        last = gen if inner.best_fitness < state.inner.best_fitness else state.last_improvement
        if not self.should_restart(fitness, inner, gen - last, params):
            return replace(state, inner=inner, last_improvement=last)
        rng_new, _ = jr.split(inner.rng)
        mean = inner.mean if self.copy_mean else state.init_mean
        fresh = self.strategy.initialize(rng_new, params, init_mean=mean)
        fresh = fresh.replace(
            best_member=inner.best_member, best_fitness=inner.best_fitness, gen_counter=gen
        )
        return replace(state, inner=fresh, last_improvement=gen, num_restarts=state.num_restarts + 1)

    def should_restart(self, fitness, inner, stagnant_for: int, params) -> bool:
        c = self.criteria
        fitness = self.strategy.sanitize_fitness(np.asarray(fitness, dtype=np.float64), params)
        if c.fitness_spread_tol is not None and np.ptp(fitness) < c.fitness_spread_tol:
            return True
        if c.stagnation_generations is not None and stagnant_for >= c.stagnation_generations:
            return True
        return c.scale_tol is not None and self.strategy.scale_norm(inner) < c.scale_tol

    def scale_norm(self, state) -> float:
        return self.strategy.scale_norm(state.inner)


# -- configuration -------------------------------------------------------------


@dataclass
class RunConfig:
    strategy: str = "cma_es"
    problem: str = "sphere"
    popsize: int = 16
    dims: int = 2
    generations: int = 100
    seed: int = 0
    n_rollouts: int = 1
    strategy_params: dict = field(default_factory=dict)
    restart: dict | None = None
    init_mean: float | list | None = None
    hidden: list = field(default_factory=lambda: [16])
    max_steps: int = 500
    test_every: int = 0
    test_rollouts: int = 128
    out: str | None = None

    def __post_init__(self):
        for name in ("popsize", "dims", "generations", "n_rollouts", "max_steps", "test_rollouts"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        if self.test_every < 0:
            raise ValueError("test_every must be non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def build_run(config: RunConfig):
    """Instantiate ``(strategy, problem, params)`` for a config."""
    strategy_cls = get_strategy(config.strategy)
    if config.problem == "cartpole":
        problem = make_problem("cartpole", hidden=tuple(config.hidden), max_steps=config.max_steps)
    else:
        problem = make_problem(config.problem, config.dims)
    strategy = strategy_cls(config.popsize, problem.num_dims)
    params = strategy.default_params.replace(**config.strategy_params)
    if config.restart:
        opts = dict(config.restart)
        copy_mean = bool(opts.pop("copy_mean", False))
        strategy = RestartWrapper(strategy, RestartCriteria(**opts), copy_mean=copy_mean)
    return strategy, problem, params


def run_config(config: RunConfig) -> GenerationLog:
    strategy, problem, params = build_run(config)
    return run_loop(
        strategy,
        problem,
        config.generations,
        seed=config.seed,
        params=params,
        init_mean=config.init_mean,
        n_rollouts=config.n_rollouts,
        test_every=config.test_every,
        test_rollouts=config.test_rollouts,
    )


# -- multi-seed execution ------------------------------------------------------


@dataclass
class RunFailure:
    seed: int
    error: str

    def __bool__(self):
        return False


def _run_one(config: RunConfig):
    try:
        return run_config(config)
    except Exception as exc:  # reported per seed, siblings keep running
        return RunFailure(config.seed, f"{type(exc).__name__}: {exc}")


def multi_run(base: RunConfig, seeds, parallelism: int = 1) -> list:
    """One :class:`GenerationLog` (or :class:`RunFailure`) per seed, in seed order.

    Results do not depend on ``parallelism``.
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValueError("seeds must be non-empty")
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    configs = [replace(base, seed=s) for s in seeds]
    if parallelism == 1 or len(configs) == 1:
        return [_run_one(c) for c in configs]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_run_one, configs))


# -- CSV -------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_csv(log: GenerationLog, path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for gen, best, gbest, gmean, scale, wall in log.records():
                writer.writerow([gen, _fmt(best), _fmt(gbest), _fmt(gmean), _fmt(scale), _fmt(wall)])
    except OSError as exc:
        raise OSError(f"cannot write log to {path}: {exc}") from exc


def read_csv(path) -> GenerationLog:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OSError(f"cannot read log from {path}: {exc}") from exc
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{path} does not start with the expected header")
    log = GenerationLog()
    for row in rows[1:]:
        log.append(int(row[0]), *(float(v) for v in row[1:]))
    return log


def write_test_csv(log: GenerationLog, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("gen", "test_fitness"))
        for g, f in zip(log.test_gen, log.test_fitness):
            writer.writerow([g, _fmt(f)])
