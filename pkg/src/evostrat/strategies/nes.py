"""Natural evolution strategies: separable (SNES) and exponential (xNES).

Both weight samples with the rank-based softmax utilities from
:func:`evostrat.shaping.snes_utilities` and are therefore comparison-based.
``tell`` recovers the standardized samples from the population, so the
population rows may be passed in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .. import random as jr
from ..core import Strategy, StrategyError, StrategyParams, StrategyState, canonical_order
from ..shaping import snes_utilities


@dataclass(frozen=True, kw_only=True)
class NesParams(StrategyParams):
    sigma_init: float = 0.05
    temperature: float = 12.0
    lrate_mean: float = 1.0
    lrate_sigma: float | None = None  # SNES: (3 + ln D) / (5 sqrt D); xNES: (9 + 3 ln D) / (5 D sqrt D)


def snes_sigma_lrate(num_dims: int) -> float:
    return (3.0 + math.log(num_dims)) / (5.0 * math.sqrt(num_dims))


def xnes_b_lrate(num_dims: int) -> float:
    return (9.0 + 3.0 * math.log(num_dims)) / (5.0 * num_dims * math.sqrt(num_dims))


@dataclass(frozen=True, kw_only=True)
class SnesState(StrategyState):
    sigma: np.ndarray


@dataclass(frozen=True, kw_only=True)
class XnesState(StrategyState):
    B: np.ndarray  # covariance factor, Sigma = B @ B.T

    @property
    def sigma(self):
        return np.sqrt(np.sum(self.B * self.B, axis=1))


class SNES(Strategy):
    name = "snes"
    params_class = NesParams
    positive_fields = ("sigma_init", "lrate_mean")

    def _init_state(self, rng, params, base):
        return SnesState(**base, sigma=np.full(params.num_dims, float(params.sigma_init)))

    def _ask(self, rng, state, params):
        s = jr.normal(rng, (params.popsize, params.num_dims))
        return state.mean + state.sigma * s, state

    def _tell(self, x, fitness, state, params):
        lrate_sigma = params.lrate_sigma or snes_sigma_lrate(params.num_dims)
        order = canonical_order(fitness, x)
        w = snes_utilities(params.popsize, params.temperature, fitness[order])
        s = (x[order] - state.mean) / state.sigma
        grad_mean = w @ s
        grad_sigma = w @ (s * s - 1.0)
        return state.replace(
            mean=state.mean + params.lrate_mean * state.sigma * grad_mean,
            sigma=state.sigma * np.exp(0.5 * lrate_sigma * grad_sigma),
        )


class XNES(Strategy):
    """Full-covariance NES; the step size lives inside the factor ``B``.

    ``B`` is a product of matrix exponentials, so it never loses rank in exact
    arithmetic. Without selection pressure its condition number still grows
    geometrically (faster for small populations), and once it passes about
    1e16 the search directions can no longer be recovered; ``tell`` then
    raises :class:`StrategyError`.
    """

    name = "xnes"
    params_class = NesParams
    positive_fields = ("sigma_init", "lrate_mean")

    def _init_state(self, rng, params, base):
        return XnesState(**base, B=float(params.sigma_init) * np.eye(params.num_dims))

    def _ask(self, rng, state, params):
        s = jr.normal(rng, (params.popsize, params.num_dims))
        return state.mean + s @ state.B.T, state

    def _tell(self, x, fitness, state, params):
        d = params.num_dims
        lrate_b = params.lrate_sigma or xnes_b_lrate(d)
        order = canonical_order(fitness, x)
        w = snes_utilities(params.popsize, params.temperature, fitness[order])
        try:
            s = np.linalg.solve(state.B, (x[order] - state.mean).T).T
        except np.linalg.LinAlgError as exc:
            raise StrategyError(
                f"factor B is singular (condition number {np.linalg.cond(state.B):.3g})"
            ) from exc
        grad_delta = w @ s
        grad_m = (s.T * w) @ s - w.sum() * np.eye(d)
        asym = np.max(np.abs(grad_m - grad_m.T))
        if asym > 1e-10 * max(1.0, np.max(np.abs(grad_m))):
            raise StrategyError(f"natural gradient for B is not symmetric (max asymmetry {asym:.3g})")
        grad_m = 0.5 * (grad_m + grad_m.T)
        return state.replace(
            mean=state.mean + params.lrate_mean * (state.B @ grad_delta),
            B=state.B @ expm(0.5 * lrate_b * grad_m),
        )

    def scale_norm(self, state) -> float:
        return float(np.linalg.norm(state.B))
