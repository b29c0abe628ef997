"""Cart-pole balancing with the classic control constants, simulated in batches.

Force is +10 N when the policy's first output is positive and -10 N
otherwise. Every executed step earns reward 1, including the one that ends
the episode. Episodes with non-finite state terminate. Fitness is the
negated return.
"""

from __future__ import annotations

import math

import numpy as np

from .. import random as jr
from ..reshape import TreeLayout, unflatten_batch
from .mlp import MlpSpec, mlp_forward_batch

GRAVITY = 9.8
MASS_CART = 1.0
MASS_POLE = 0.1
TOTAL_MASS = MASS_CART + MASS_POLE
LENGTH = 0.5  # half the pole length
POLEMASS_LENGTH = MASS_POLE * LENGTH
FORCE_MAG = 10.0
TAU = 0.02
X_THRESHOLD = 2.4
THETA_THRESHOLD = 12 * 2 * math.pi / 360
OBS_DIM = 4


def cartpole_step(state: np.ndarray, force: np.ndarray) -> np.ndarray:
    """One explicit Euler step for a batch of states ``(M, 4)``."""
    x, x_dot, theta, theta_dot = state.T
    cos, sin = np.cos(theta), np.sin(theta)
    temp = (force + POLEMASS_LENGTH * theta_dot**2 * sin) / TOTAL_MASS
    theta_acc = (GRAVITY * sin - cos * temp) / (
        LENGTH * (4.0 / 3.0 - MASS_POLE * cos**2 / TOTAL_MASS)
    )
    x_acc = temp - POLEMASS_LENGTH * theta_acc * cos / TOTAL_MASS
    return np.stack(
        [x + TAU * x_dot, x_dot + TAU * x_acc, theta + TAU * theta_dot, theta_dot + TAU * theta_acc],
        axis=1,
    )


def initial_states(keys: np.ndarray) -> np.ndarray:
    return np.stack([jr.uniform(k, OBS_DIM, -0.05, 0.05) for k in keys]) if len(keys) else np.zeros((0, OBS_DIM))


def rollout_batch(flat_params, layout: TreeLayout, spec: MlpSpec, init: np.ndarray, max_steps: int) -> np.ndarray:
    """Episode returns for ``M`` (policy, initial state) pairs."""
    flat_params = np.atleast_2d(np.asarray(flat_params, dtype=np.float64))
    if layout.total_dims != spec.num_params or flat_params.shape[1] != layout.total_dims:
        raise ValueError("parameters, layout and network spec disagree on the parameter count")
    params = unflatten_batch(flat_params, layout)
    state = np.array(init, dtype=np.float64)
    alive = np.ones(state.shape[0], dtype=bool)
    returns = np.zeros(state.shape[0])
    for _ in range(max_steps):
        if not alive.any():
            break
        out = mlp_forward_batch(params, state, spec)
        force = np.where(out[:, 0] > 0, FORCE_MAG, -FORCE_MAG)
        with np.errstate(all="ignore"):
            nxt = cartpole_step(state, force)
        state = np.where(alive[:, None], nxt, state)
        returns += alive
        finite = np.all(np.isfinite(state), axis=1)
        with np.errstate(invalid="ignore"):
            done = (np.abs(state[:, 0]) > X_THRESHOLD) | (np.abs(state[:, 2]) > THETA_THRESHOLD)
        alive &= finite & ~done
    return returns


def cartpole_rollout(flat_params, layout, spec, rng, max_steps: int = 500, init_state=None) -> float:
    """Negated return of one episode; the start state is drawn from ``rng`` unless given."""
    if max_steps <= 0:
        return 0.0
    init = initial_states(np.asarray(rng)[None]) if init_state is None else np.asarray(init_state, float)[None]
    return -float(rollout_batch(flat_params, layout, spec, init, max_steps)[0])
