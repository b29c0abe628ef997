"""Population-based baselines: particle swarm, differential evolution and a Gaussian GA.

On generation 0 PSO and DE ask for the initial swarm/population itself; from
then on they propose moved particles or trial vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import random as jr
from ..core import Strategy, StrategyParams, StrategyState, canonical_order
from ..optimizers import exp_decay
from .eod import num_elite


@dataclass(frozen=True, kw_only=True)
class PsoParams(StrategyParams):
    inertia: float = 0.729
    c_cognitive: float = 1.49445
    c_social: float = 1.49445
    sigma_init: float = 1.0  # spread of the initial swarm around the mean


@dataclass(frozen=True, kw_only=True)
class SwarmState(StrategyState):
    positions: np.ndarray
    velocities: np.ndarray
    pbest_x: np.ndarray
    pbest_f: np.ndarray
    gbest_x: np.ndarray
    gbest_f: float


def pso_velocity(x, v, pbest, gbest, r1, r2, inertia, c_cognitive, c_social):
    return inertia * v + c_cognitive * r1 * (pbest - x) + c_social * r2 * (gbest - x)


class PSO(Strategy):
    """Global-best PSO with per-dimension random coefficients and no velocity clamping."""

    name = "pso"
    params_class = PsoParams
    positive_fields = ("sigma_init",)

    def _init_state(self, rng, params, base):
        shape = (params.popsize, params.num_dims)
        x = base["mean"] + params.sigma_init * jr.normal(rng, shape)
        return SwarmState(
            **base,
            positions=x,
            velocities=np.zeros(shape),
            pbest_x=x,
            pbest_f=np.full(params.popsize, np.inf),
            gbest_x=base["mean"].copy(),
            gbest_f=np.inf,
        )

    def _ask(self, rng, state, params):
        if state.gen_counter == 0:
            return state.positions, state
        r = jr.uniform(rng, (2, params.popsize, params.num_dims))
        v = pso_velocity(
            state.positions, state.velocities, state.pbest_x, state.gbest_x,
            r[0], r[1], params.inertia, params.c_cognitive, params.c_social,
        )
        x = state.positions + v
        return x, state.replace(positions=x, velocities=v)

    def _tell(self, x, fitness, state, params):
        improved = fitness < state.pbest_f
        pbest_x = np.where(improved[:, None], x, state.pbest_x)
        pbest_f = np.where(improved, fitness, state.pbest_f)
        g = int(np.argmin(pbest_f))
        if pbest_f[g] < state.gbest_f:
            gbest_x, gbest_f = pbest_x[g].copy(), float(pbest_f[g])
        else:
            gbest_x, gbest_f = state.gbest_x, state.gbest_f
        return state.replace(
            positions=x, pbest_x=pbest_x, pbest_f=pbest_f,
            gbest_x=gbest_x, gbest_f=gbest_f, mean=gbest_x,
        )

    def scale_norm(self, state) -> float:
        return float(np.linalg.norm(state.positions.std(axis=0)))


@dataclass(frozen=True, kw_only=True)
class DeParams(StrategyParams):
    diff_w: float = 0.8
    cross_over_rate: float = 0.9
    sigma_init: float = 1.0  # spread of the initial population around the mean


@dataclass(frozen=True, kw_only=True)
class DeState(StrategyState):
    archive: np.ndarray
    fitness: np.ndarray


def de_donors(rng, popsize: int) -> np.ndarray:
    """For every target ``j`` three distinct indices ``a, b, c``, all different from ``j``."""
    u = jr.uniform(rng, (popsize, popsize))
    np.fill_diagonal(u, np.inf)
    return np.argsort(u, axis=1, kind="stable")[:, :3]


def de_trials(archive, donors, cross_mask, diff_w) -> np.ndarray:
    """rand/1/bin trial vectors; ``cross_mask`` marks coordinates taken from the mutant."""
    a, b, c = archive[donors[:, 0]], archive[donors[:, 1]], archive[donors[:, 2]]
    mutant = a + diff_w * (b - c)
    return np.where(cross_mask, mutant, archive)


class DE(Strategy):
    """Differential evolution, rand/1/bin with greedy one-to-one replacement.

    Selection is per slot: row ``j`` of the told population competes with
    archive member ``j``.
    """

    name = "de"
    params_class = DeParams
    positive_fields = ("sigma_init",)

    def validate_params(self, params):
        super().validate_params(params)
        if params.popsize < 4:
            raise ValueError(f"DE needs popsize >= 4, got {params.popsize}")
        if not 0 <= params.diff_w <= 2:
            raise ValueError("diff_w must lie in [0, 2]")
        if not 0 <= params.cross_over_rate <= 1:
            raise ValueError("cross_over_rate must lie in [0, 1]")

    def _init_state(self, rng, params, base):
        x = base["mean"] + params.sigma_init * jr.normal(rng, (params.popsize, params.num_dims))
        return DeState(**base, archive=x, fitness=np.full(params.popsize, np.inf))

    def _ask(self, rng, state, params):
        if state.gen_counter == 0:
            return state.archive, state
        n, d = params.popsize, params.num_dims
        rng_donor, rng_cross, rng_forced = jr.split(rng, 3)
        donors = de_donors(rng_donor, n)
        mask = jr.uniform(rng_cross, (n, d)) < params.cross_over_rate
        mask[np.arange(n), jr.randint(rng_forced, n, d)] = True
        return de_trials(state.archive, donors, mask, params.diff_w), state

    def _tell(self, x, fitness, state, params):
        accept = fitness <= state.fitness
        archive = np.where(accept[:, None], x, state.archive)
        archive_f = np.where(accept, fitness, state.fitness)
        return state.replace(archive=archive, fitness=archive_f, mean=archive[int(np.argmin(archive_f))])

    def scale_norm(self, state) -> float:
        return float(np.linalg.norm(state.archive.std(axis=0)))


@dataclass(frozen=True, kw_only=True)
class GaParams(StrategyParams):
    sigma_init: float = 0.1
    sigma_decay: float = 1.0
    sigma_limit: float = 0.01
    elite_ratio: float = 0.5


@dataclass(frozen=True, kw_only=True)
class GaState(StrategyState):
    elite_x: np.ndarray  # sorted best first
    elite_f: np.ndarray
    sigma: float


class GaussianGA(Strategy):
    """Truncation-selection GA with Gaussian mutation and one unmutated elite child."""

    name = "gaussian_ga"
    params_class = GaParams
    positive_fields = ("sigma_init", "sigma_decay")

    def validate_params(self, params):
        super().validate_params(params)
        if not 0 < params.elite_ratio <= 1:
            raise ValueError("elite_ratio must lie in (0, 1]")

    def _init_state(self, rng, params, base):
        mu = num_elite(params.elite_ratio, params.popsize)
        return GaState(
            **base,
            elite_x=np.tile(base["mean"], (mu, 1)),
            elite_f=np.full(mu, np.inf),
            sigma=float(params.sigma_init),
        )

    def _ask(self, rng, state, params):
        rng_parent, rng_mut = jr.split(rng)
        parents = jr.randint(rng_parent, params.popsize, state.elite_x.shape[0])
        z = jr.normal(rng_mut, (params.popsize, params.num_dims))
        children = state.elite_x[parents] + state.sigma * z
        children[0] = state.elite_x[0]
        return children, state

    def _tell(self, x, fitness, state, params):
        mu = state.elite_x.shape[0]
        pool_x = np.concatenate([state.elite_x, x])
        pool_f = np.concatenate([state.elite_f, fitness])
        order = canonical_order(pool_f, pool_x)
        keep = []
        for i in order:
            # a re-evaluated elite copy must not fill two archive slots
            if not any(np.array_equal(pool_x[i], pool_x[j]) for j in keep):
                keep.append(i)
                if len(keep) == mu:
                    break
        for i in order:
            if len(keep) == mu:
                break
            if i not in keep:
                keep.append(i)
        rank = {int(i): r for r, i in enumerate(order)}
        keep = np.array(sorted(keep, key=lambda i: rank[int(i)]))
        elite_x, elite_f = pool_x[keep], pool_f[keep]
        return state.replace(
            elite_x=elite_x,
            elite_f=elite_f,
            mean=elite_x[0],
            sigma=exp_decay(state.sigma, params.sigma_decay, params.sigma_limit),
        )

    def scale_norm(self, state) -> float:
        return float(state.sigma)
