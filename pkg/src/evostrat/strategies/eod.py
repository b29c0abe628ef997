"""Distribution-estimation strategies: CMA-ES, Sep-CMA-ES and a Gaussian ES.

CMA constants and update equations follow the standard tutorial defaults
(positive log-decreasing recombination weights, cumulative step-size
adaptation, rank-one plus rank-mu covariance update). Active (negative)
weights are not used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import random as jr
from ..core import Strategy, StrategyError, StrategyParams, StrategyState, canonical_order
from ..optimizers import exp_decay


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def num_elite(elite_ratio: float, popsize: int) -> int:
    return max(1, round_half_up(elite_ratio * popsize))


@dataclass(frozen=True)
class CmaConstants:
    mu: int
    weights: np.ndarray
    mueff: float
    c_sigma: float
    d_sigma: float
    c_c: float
    c_1: float
    c_mu: float
    chi_n: float
    lazy_gap: int


def cma_constants(popsize: int, num_dims: int, mu: int | None = None, separable: bool = False) -> CmaConstants:
    n = num_dims
    if mu is None:
        mu = popsize // 2
        base = math.log((popsize + 1) / 2)
    else:
        base = math.log(mu + 0.5)
    raw = base - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mueff = 1.0 / np.sum(weights**2)
    c_sigma = (mueff + 2) / (n + mueff + 5)
    d_sigma = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + c_sigma
    c_c = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
    c_1 = 2 / ((n + 1.3) ** 2 + mueff)
    c_mu = min(1 - c_1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
    if separable:
        scale = (n + 2) / 3
        c_1 = c_1 * scale
        c_mu = min(1 - c_1, c_mu * scale)
    chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n**2))
    lazy_gap = max(1, int(1 / (10 * n * (c_1 + c_mu))))
    return CmaConstants(mu, weights, float(mueff), c_sigma, d_sigma, c_c, c_1, c_mu, chi_n, lazy_gap)


@dataclass(frozen=True, kw_only=True)
class CmaParams(StrategyParams):
    sigma_init: float = 1.0
    elite_ratio: float = 0.5
    c_m: float = 1.0


@dataclass(frozen=True, kw_only=True)
class CmaState(StrategyState):
    sigma: float
    C: np.ndarray  # full (D, D) matrix, or the (D,) diagonal for Sep-CMA-ES
    p_sigma: np.ndarray
    p_c: np.ndarray
    eigvecs: np.ndarray | None = None
    eigvals_sqrt: np.ndarray | None = None
    eigen_gen: int = 0
    consts: CmaConstants | None = None


def eigen_decompose(C: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(C, B, D)`` with ``C = B diag(D**2) B.T``.

    One repair attempt adds ``1e-14 * trace(C) / n`` to the diagonal.
    """
    for attempt in range(2):
        try:
            vals, vecs = np.linalg.eigh(C)
            if np.all(np.isfinite(vals)) and vals.min() > 0:
                return C, vecs, np.sqrt(vals)
        except np.linalg.LinAlgError:
            pass
        if attempt == 0:
            n = C.shape[0]
            C = C + (1e-14 * np.trace(C) / n) * np.eye(n)
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(C) if np.all(np.isfinite(C)) else np.inf
    raise StrategyError(
        f"covariance is not positive definite after repair (condition number {cond:.3g}, "
        f"trace {np.trace(C):.3g})"
    )


class CMAES(Strategy):
    name = "cma_es"
    params_class = CmaParams
    positive_fields = ("sigma_init", "c_m")

    def _mu(self, params):
        return None

    def _init_state(self, rng, params, base):
        consts = cma_constants(params.popsize, params.num_dims, self._mu(params))
        d = params.num_dims
        return CmaState(
            **base,
            sigma=float(params.sigma_init),
            C=np.eye(d),
            p_sigma=np.zeros(d),
            p_c=np.zeros(d),
            eigvecs=np.eye(d),
            eigvals_sqrt=np.ones(d),
            eigen_gen=0,
            consts=consts,
        )

    def _ask(self, rng, state, params):
        if state.gen_counter - state.eigen_gen >= state.consts.lazy_gap:
            C, B, D = eigen_decompose(state.C)
            state = state.replace(C=C, eigvecs=B, eigvals_sqrt=D, eigen_gen=state.gen_counter)
        z = jr.normal(rng, (params.popsize, params.num_dims))
        y = (z * state.eigvals_sqrt) @ state.eigvecs.T
        return state.mean + state.sigma * y, state

    def _tell(self, x, fitness, state, params):
        k = state.consts
        order = canonical_order(fitness, x)[: k.mu]
        y = (x[order] - state.mean) / state.sigma
        y_w = k.weights @ y
        mean = state.mean + params.c_m * state.sigma * y_w

        B, D = state.eigvecs, state.eigvals_sqrt
        inv_sqrt_c_y = B @ ((B.T @ y_w) / D)
        p_sigma = (1 - k.c_sigma) * state.p_sigma + math.sqrt(
            k.c_sigma * (2 - k.c_sigma) * k.mueff
        ) * inv_sqrt_c_y
        h_sigma, ps_norm = self._h_sigma(p_sigma, state.gen_counter + 1, params.num_dims, k)
        p_c = (1 - k.c_c) * state.p_c + h_sigma * math.sqrt(k.c_c * (2 - k.c_c) * k.mueff) * y_w
        delta_h = (1 - h_sigma) * k.c_c * (2 - k.c_c)
        C = self._update_cov(state.C, p_c, y, delta_h, k)
        sigma = state.sigma * math.exp((k.c_sigma / k.d_sigma) * (ps_norm / k.chi_n - 1))
        return state.replace(mean=mean, p_sigma=p_sigma, p_c=p_c, C=C, sigma=sigma)

    @staticmethod
    def _h_sigma(p_sigma, generation, num_dims, k):
        ps_norm = float(np.linalg.norm(p_sigma))
        threshold = (1.4 + 2 / (num_dims + 1)) * k.chi_n
        denom = math.sqrt(1 - (1 - k.c_sigma) ** (2 * generation))
        return float(ps_norm / denom < threshold), ps_norm

    @staticmethod
    def _update_cov(C, p_c, y, delta_h, k):
        rank_mu = (y.T * k.weights) @ y
        C = (1 + k.c_1 * delta_h - k.c_1 - k.c_mu * k.weights.sum()) * C
        C = C + k.c_1 * np.outer(p_c, p_c) + k.c_mu * rank_mu
        return 0.5 * (C + C.T)

    def scale_norm(self, state) -> float:
        diag = np.diag(state.C) if state.C.ndim == 2 else state.C
        return float(state.sigma * np.linalg.norm(np.sqrt(diag)))


@dataclass(frozen=True, kw_only=True)
class SepCmaParams(CmaParams):
    sigma_init: float = 0.05
    elite_ratio: float = 0.4


class SepCMAES(CMAES):
    """CMA-ES restricted to a diagonal covariance, with the (D + 2) / 3 learning-rate boost."""

    name = "sep_cma_es"
    params_class = SepCmaParams

    def validate_params(self, params):
        super().validate_params(params)
        if not 0 < params.elite_ratio <= 1:
            raise ValueError("elite_ratio must lie in (0, 1]")

    def _mu(self, params):
        return num_elite(params.elite_ratio, params.popsize)

    def _init_state(self, rng, params, base):
        consts = cma_constants(params.popsize, params.num_dims, self._mu(params), separable=True)
        d = params.num_dims
        return CmaState(
            **base,
            sigma=float(params.sigma_init),
            C=np.ones(d),
            p_sigma=np.zeros(d),
            p_c=np.zeros(d),
            consts=consts,
        )

    def _ask(self, rng, state, params):
        z = jr.normal(rng, (params.popsize, params.num_dims))
        return state.mean + state.sigma * np.sqrt(state.C) * z, state

    def _tell(self, x, fitness, state, params):
        k = state.consts
        order = canonical_order(fitness, x)[: k.mu]
        y = (x[order] - state.mean) / state.sigma
        y_w = k.weights @ y
        mean = state.mean + params.c_m * state.sigma * y_w

        p_sigma = (1 - k.c_sigma) * state.p_sigma + math.sqrt(
            k.c_sigma * (2 - k.c_sigma) * k.mueff
        ) * (y_w / np.sqrt(state.C))
        h_sigma, ps_norm = self._h_sigma(p_sigma, state.gen_counter + 1, params.num_dims, k)
        p_c = (1 - k.c_c) * state.p_c + h_sigma * math.sqrt(k.c_c * (2 - k.c_c) * k.mueff) * y_w
        delta_h = (1 - h_sigma) * k.c_c * (2 - k.c_c)
        C = (1 + k.c_1 * delta_h - k.c_1 - k.c_mu * k.weights.sum()) * state.C
        C = C + k.c_1 * p_c * p_c + k.c_mu * (k.weights @ (y * y))
        sigma = state.sigma * math.exp((k.c_sigma / k.d_sigma) * (ps_norm / k.chi_n - 1))
        return state.replace(mean=mean, p_sigma=p_sigma, p_c=p_c, C=C, sigma=sigma)


@dataclass(frozen=True, kw_only=True)
class GaussianEsParams(StrategyParams):
    sigma_init: float = 1.0
    sigma_decay: float = 0.999
    sigma_limit: float = 0.01
    elite_ratio: float = 0.5


@dataclass(frozen=True, kw_only=True)
class GaussianEsState(StrategyState):
    sigma: float


class GaussianES(Strategy):
    """Isotropic Gaussian ES: truncation selection, unweighted recombination, decaying sigma."""

    name = "gaussian_es"
    params_class = GaussianEsParams
    positive_fields = ("sigma_init", "sigma_decay")

    def validate_params(self, params):
        super().validate_params(params)
        if not 0 < params.elite_ratio <= 1:
            raise ValueError("elite_ratio must lie in (0, 1]")

    def _init_state(self, rng, params, base):
        return GaussianEsState(**base, sigma=float(params.sigma_init))

    def _ask(self, rng, state, params):
        z = jr.normal(rng, (params.popsize, params.num_dims))
        return state.mean + state.sigma * z, state

    def _tell(self, x, fitness, state, params):
        mu = num_elite(params.elite_ratio, params.popsize)
        elite = x[canonical_order(fitness, x)[:mu]]
        return state.replace(
            mean=elite.mean(axis=0),
            sigma=exp_decay(state.sigma, params.sigma_decay, params.sigma_limit),
        )
