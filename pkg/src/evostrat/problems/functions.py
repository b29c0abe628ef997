"""Classic analytic benchmark functions, vectorised over leading axes.

Each takes ``x`` of shape ``(..., D)`` and returns shape ``(...)``.
"""

import numpy as np


def sphere(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sum(x * x, axis=-1)


def rosenbrock(x):
    x = np.asarray(x, dtype=np.float64)
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (tail - head * head) ** 2 + (1.0 - head) ** 2, axis=-1)


def rastrigin(x):
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[-1]
    return 10.0 * d + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x), axis=-1)


def ackley(x):
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[-1]
    term1 = -20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x, axis=-1) / d))
    term2 = -np.exp(np.sum(np.cos(2.0 * np.pi * x), axis=-1) / d)
    return term1 + term2 + 20.0 + np.e


def griewank(x):
    x = np.asarray(x, dtype=np.float64)
    idx = np.sqrt(np.arange(1, x.shape[-1] + 1))
    return 1.0 + np.sum(x * x, axis=-1) / 4000.0 - np.prod(np.cos(x / idx), axis=-1)
