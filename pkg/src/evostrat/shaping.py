"""Fitness shaping. Everything here keeps "lower is better"."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

Z_SCORE_EPS = 1e-8


def centered_rank(fitness) -> np.ndarray:
    """Map fitness onto [-0.5, 0.5]; the best (lowest) member gets -0.5.

    Tied members share their averaged rank.
    """
    fitness = np.asarray(fitness, dtype=np.float64)
    n = fitness.size
    if n < 1:
        raise ValueError("centered_rank needs at least one fitness value")
    if n == 1:
        return np.zeros(1)
    ranks = rankdata(fitness, method="average") - 1.0
    return ranks / (n - 1) - 0.5


def z_score(fitness) -> np.ndarray:
    fitness = np.asarray(fitness, dtype=np.float64)
    if fitness.size < 2:
        raise ValueError("z_score needs at least two fitness values")
    if np.all(fitness == fitness[0]):
        return np.zeros_like(fitness)
    centered = fitness - fitness.mean()
    return centered / (fitness.std() + Z_SCORE_EPS)


def weight_decay(fitness, population, coef: float) -> np.ndarray:
    """Add ``coef * ||x_j||^2`` to each fitness (an L2 penalty under minimization)."""
    fitness = np.asarray(fitness, dtype=np.float64)
    population = np.asarray(population, dtype=np.float64)
    if population.ndim != 2 or population.shape[0] != fitness.size:
        raise ValueError(
            f"population shape {population.shape} does not match {fitness.size} fitness values"
        )
    if coef < 0:
        raise ValueError("weight decay coefficient must be non-negative")
    if coef == 0:
        return fitness.copy()
    return fitness + coef * np.sum(population * population, axis=1)


def quality_ranks(fitness) -> np.ndarray:
    """Averaged ranks with the best member at ``N - 1`` and the worst at 0."""
    fitness = np.asarray(fitness, dtype=np.float64)
    return fitness.size - rankdata(fitness, method="average")


def snes_utilities(popsize: int, beta: float, fitness) -> np.ndarray:
    """Softmax utilities ``softmax(beta * (rank / N - 0.5))``.

    Weights are non-negative, sum to one and grow with member quality.
    """
    fitness = np.asarray(fitness, dtype=np.float64)
    if popsize < 2 or fitness.size != popsize:
        raise ValueError(f"need popsize >= 2 and {popsize} fitness values, got {fitness.size}")
    logits = beta * (quality_ranks(fitness) / popsize - 0.5)
    logits = logits - logits.max()
    w = np.exp(logits)
    return w / w.sum()


def shape_fitness(fitness, population, method: str = "centered_rank", decay_coef: float = 0.0) -> np.ndarray:
    """Weight decay first, then the named transform (``raw``, ``z_score``, ``centered_rank``)."""
    shaped = weight_decay(fitness, population, decay_coef)
    if method == "centered_rank":
        return centered_rank(shaped)
    if method == "z_score":
        return z_score(shaped)
    if method == "raw":
        return shaped
    raise ValueError(f"unknown fitness shaping {method!r}")
