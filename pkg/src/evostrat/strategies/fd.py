"""Finite-difference gradient strategies: OpenAI-ES, PGPE and ARS.

All three sample antithetic pairs. Rows ``2i`` and ``2i + 1`` of a population
are ``m + sigma * z_i`` and ``m - sigma * z_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .. import random as jr
from ..core import Strategy, StrategyParams, StrategyState, canonical_order
from ..optimizers import OptParams, OptState, decay_lrate, exp_decay, init_opt_state, opt_step
from ..shaping import shape_fitness


@dataclass(frozen=True, kw_only=True)
class FdParams(StrategyParams):
    sigma_init: float = 0.05
    sigma_decay: float = 0.999
    sigma_limit: float = 0.01
    lrate_init: float = 0.01
    lrate_decay: float = 0.999
    lrate_limit: float = 0.001
    optimizer: str = "adam"
    fitness_shaping: str = "centered_rank"
    weight_decay: float = 0.0
    momentum: float = 0.9
    beta_1: float = 0.9
    beta_2: float = 0.999
    eps: float = 1e-8

    @property
    def opt_params(self) -> OptParams:
        return OptParams(
            lrate_init=self.lrate_init,
            lrate_decay=self.lrate_decay,
            lrate_limit=self.lrate_limit,
            momentum=self.momentum,
            beta_1=self.beta_1,
            beta_2=self.beta_2,
            eps=self.eps,
        )


@dataclass(frozen=True, kw_only=True)
class FdState(StrategyState):
    sigma: float | np.ndarray
    noise: np.ndarray  # (popsize // 2, num_dims) standard normal directions of the last ask
    opt_state: OptState


def antithetic_population(mean, sigma, z) -> np.ndarray:
    x = np.empty((2 * z.shape[0], z.shape[1]))
    x[0::2] = mean + sigma * z
    x[1::2] = mean - sigma * z
    return x


def fd_gradient(shaped, eps, sigma) -> np.ndarray:
    """Monte-Carlo gradient ``1 / (N sigma) * sum_j f_j eps_j`` over all signed samples."""
    shaped = np.asarray(shaped, dtype=np.float64)
    return shaped @ eps / (shaped.size * sigma)


class _Antithetic(Strategy):
    antithetic = True
    params_class = FdParams
    positive_fields = ("sigma_init", "sigma_decay", "lrate_init", "lrate_decay")

    def _init_sigma(self, params):
        return float(params.sigma_init)

    def _init_state(self, rng, params, base):
        return FdState(
            **base,
            sigma=self._init_sigma(params),
            noise=np.zeros((params.popsize // 2, params.num_dims)),
            opt_state=init_opt_state(params.num_dims, params.opt_params),
        )

    def _ask(self, rng, state, params):
        z = jr.normal(rng, (params.popsize // 2, params.num_dims))
        x = antithetic_population(state.mean, state.sigma, z)
        return x, state.replace(noise=z)


class OpenAIES(_Antithetic):
    """Antithetic OpenAI-ES with an inner gradient optimizer.

    ``tell`` recovers the perturbations from the population itself, so any
    reordering of (population, fitness) rows gives the same update.
    """

    name = "openai_es"

    @property
    def comparison_based(self):
        return self.default_params.fitness_shaping == "centered_rank"

    def _tell(self, x, fitness, state, params):
        shaped = shape_fitness(fitness, x, params.fitness_shaping, params.weight_decay)
        order = canonical_order(shaped, x)
        eps = (x[order] - state.mean) / state.sigma
        grad = fd_gradient(shaped[order], eps, state.sigma)
        update, opt = opt_step(params.optimizer, grad, state.opt_state, params.opt_params)
        return state.replace(
            mean=state.mean + update,
            opt_state=decay_lrate(opt, params.opt_params),
            sigma=exp_decay(state.sigma, params.sigma_decay, params.sigma_limit),
        )


@dataclass(frozen=True, kw_only=True)
class PgpeParams(FdParams):
    sigma_init: float = 0.025
    sigma_lrate: float = 0.2
    sigma_max_change: float = 0.2


class PGPE(_Antithetic):
    """Parameter-exploring policy gradients with a per-dimension sigma.

    Uses the stored noise of the preceding ``ask``; telling a population that
    did not come from that ask is undefined.
    """

    name = "pgpe"
    params_class = PgpeParams
    comparison_based = False
    positive_fields = _Antithetic.positive_fields + ("sigma_lrate", "sigma_max_change")

    def _init_sigma(self, params):
        return np.full(params.num_dims, float(params.sigma_init))

    def _tell(self, x, fitness, state, params):
        shaped = shape_fitness(fitness, x, params.fitness_shaping, params.weight_decay)
        f_plus, f_minus = shaped[0::2], shaped[1::2]
        z = state.noise
        half = z.shape[0]
        grad_mean = ((f_plus - f_minus) / 2.0) @ z / half
        update, opt = opt_step(params.optimizer, grad_mean, state.opt_state, params.opt_params)

        baseline = shaped.mean()
        grad_sigma = (((f_plus + f_minus) / 2.0 - baseline) @ (z * z - 1.0)) * state.sigma / half
        max_change = params.sigma_max_change * state.sigma
        delta = np.clip(-params.sigma_lrate * grad_sigma, -max_change, max_change)
        sigma = exp_decay(state.sigma + delta, params.sigma_decay, params.sigma_limit)
        return state.replace(
            mean=state.mean + update,
            sigma=sigma,
            opt_state=decay_lrate(opt, params.opt_params),
        )


@dataclass(frozen=True, kw_only=True)
class ArsParams(FdParams):
    sigma_decay: float = 1.0
    lrate_init: float = 0.02
    lrate_decay: float = 1.0
    elite_ratio: float = 0.5
    fitness_shaping: str = "raw"


def ars_select(fitness, num_elite: int) -> np.ndarray:
    """Indices of the ``num_elite`` pairs with the lowest ``min(f+, f-)``."""
    fitness = np.asarray(fitness, dtype=np.float64)
    best_of_pair = np.minimum(fitness[0::2], fitness[1::2])
    return np.argsort(best_of_pair, kind="stable")[:num_elite]


class ARS(_Antithetic):
    """Augmented random search (V2: elite directions, reward-std normalisation).

    Direction selection is comparison-based; the step length is not, because
    it is divided by the standard deviation of the selected raw fitnesses.
    """

    name = "ars"
    params_class = ArsParams
    comparison_based = False

    def validate_params(self, params):
        super().validate_params(params)
        if not 0 < params.elite_ratio <= 1:
            raise ValueError("elite_ratio must lie in (0, 1]")

    @staticmethod
    def num_elite(params) -> int:
        return max(1, int(np.floor(params.elite_ratio * params.popsize / 2 + 0.5)))

    def _tell(self, x, fitness, state, params):
        shaped = shape_fitness(fitness, x, params.fitness_shaping, params.weight_decay)
        k = self.num_elite(params)
        elite = ars_select(shaped, k)
        f_plus, f_minus = shaped[0::2][elite], shaped[1::2][elite]
        sigma_r = np.concatenate([f_plus, f_minus]).std()
        lrate = state.opt_state.lrate
        mean = state.mean
        if sigma_r > 0:
            mean = mean - lrate / (k * sigma_r) * ((f_plus - f_minus) @ state.noise[elite])
        opt = decay_lrate(replace(state.opt_state, step=state.opt_state.step + 1), params.opt_params)
        return state.replace(
            mean=mean,
            opt_state=opt,
            sigma=exp_decay(state.sigma, params.sigma_decay, params.sigma_limit),
        )
