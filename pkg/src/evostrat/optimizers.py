"""Gradient optimizers used inside the finite-difference strategies.

Each ``*_step`` returns an additive update (to be added to the search mean)
together with a new :class:`OptState`; inputs are never modified.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class OptParams:
    lrate_init: float = 0.01
    lrate_decay: float = 0.999
    lrate_limit: float = 0.001
    momentum: float = 0.9
    beta_1: float = 0.9
    beta_2: float = 0.999
    eps: float = 1e-8
    max_speed: float | None = None  # ClipUp; defaults to 2 * lrate_init


@dataclass(frozen=True)
class OptState:
    lrate: float
    m: np.ndarray
    v: np.ndarray
    velocity: np.ndarray
    step: int = 0
    max_speed: float = 0.0


def init_opt_state(num_dims: int, params: OptParams = OptParams()) -> OptState:
    zeros = np.zeros(num_dims)
    max_speed = params.max_speed if params.max_speed is not None else 2.0 * params.lrate_init
    return OptState(
        lrate=params.lrate_init, m=zeros, v=zeros, velocity=zeros, step=0, max_speed=max_speed
    )


def _check(grad, opt: OptState) -> np.ndarray:
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != opt.m.shape:
        raise ValueError(f"gradient shape {grad.shape} does not match optimizer state {opt.m.shape}")
    return grad


def sgd_step(grad, opt: OptState, momentum: float = 0.0) -> tuple[np.ndarray, OptState]:
    """Classical momentum: ``v <- momentum * v - lr * g``; the update is ``v``."""
    grad = _check(grad, opt)
    velocity = momentum * opt.velocity - opt.lrate * grad
    return velocity, replace(opt, velocity=velocity, step=opt.step + 1)


def adam_step(
    grad, opt: OptState, beta_1: float = 0.9, beta_2: float = 0.999, eps: float = 1e-8
) -> tuple[np.ndarray, OptState]:
    grad = _check(grad, opt)
    t = opt.step + 1
    m = beta_1 * opt.m + (1.0 - beta_1) * grad
    v = beta_2 * opt.v + (1.0 - beta_2) * grad * grad
    m_hat = m / (1.0 - beta_1**t)
    v_hat = v / (1.0 - beta_2**t)
    update = -opt.lrate * m_hat / (np.sqrt(v_hat) + eps)
    return update, replace(opt, m=m, v=v, step=t)


def clipup_step(grad, opt: OptState, momentum: float = 0.9) -> tuple[np.ndarray, OptState]:
    """ClipUp: unit-normalised gradient, heavy-ball velocity, norm clipped to ``max_speed``."""
    grad = _check(grad, opt)
    norm = np.linalg.norm(grad)
    direction = grad / norm if norm > 0 else np.zeros_like(grad)
    velocity = momentum * opt.velocity + opt.lrate * direction
    speed = np.linalg.norm(velocity)
    if speed > opt.max_speed:
        velocity = velocity * (opt.max_speed / speed)
    return -velocity, replace(opt, velocity=velocity, step=opt.step + 1)


def exp_decay(value, decay: float, floor):
    """One schedule tick: ``max(value * decay, floor)``."""
    return np.maximum(np.asarray(value) * decay, floor) if np.ndim(value) else max(value * decay, floor)


OPTIMIZERS = ("sgd", "adam", "clipup")


def opt_step(name: str, grad, opt: OptState, params: OptParams) -> tuple[np.ndarray, OptState]:
    if name == "adam":
        return adam_step(grad, opt, params.beta_1, params.beta_2, params.eps)
    if name == "sgd":
        return sgd_step(grad, opt, params.momentum)
    if name == "clipup":
        return clipup_step(grad, opt, params.momentum)
    raise ValueError(f"unknown optimizer {name!r}; choose from {OPTIMIZERS}")


def decay_lrate(opt: OptState, params: OptParams) -> OptState:
    return replace(opt, lrate=exp_decay(opt.lrate, params.lrate_decay, params.lrate_limit))
