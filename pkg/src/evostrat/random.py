"""Counter-based, splittable random keys built on Philox4x32-10.

A key is a ``uint32`` array of shape ``(2,)``. Every random draw is a pure
function of the key, so the same key yields the same numbers regardless of
process, thread or call order. Keys are never advanced in place: callers
``split`` a key and use the children, the way JAX does.
"""

from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)

# Fourth counter word separates the split stream from the sampling stream.
_SPLIT_DOMAIN = 0
_BITS_DOMAIN = 1


def philox4x32(counter, key, rounds: int = 10) -> np.ndarray:
    """Philox4x32 block function.

    Parameters
    ----------
    counter : array_like of uint32, shape (..., 4)
    key : array_like of uint32, shape (2,)

    Returns
    -------
    np.ndarray of uint32, shape (..., 4)
    """
    ctr = np.asarray(counter, dtype=np.uint64)
    if ctr.shape[-1] != 4:
        raise ValueError("counter must have trailing dimension 4")
    k0, k1 = (np.uint64(w) for w in np.asarray(key, dtype=np.uint64).reshape(2))
    c0, c1, c2, c3 = ctr[..., 0], ctr[..., 1], ctr[..., 2], ctr[..., 3]
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & _MASK32
            k1 = (k1 + _W1) & _MASK32
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0, lo0 = p0 >> _SHIFT32, p0 & _MASK32
        hi1, lo1 = p1 >> _SHIFT32, p1 & _MASK32
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return np.stack([c0, c1, c2, c3], axis=-1).astype(np.uint32)


def prng_key(seed: int) -> np.ndarray:
    """Build a key from a (possibly 64-bit) integer seed."""
    seed = int(seed)
    if seed < 0:
        seed &= (1 << 64) - 1
    return np.array([(seed >> 32) & 0xFFFFFFFF, seed & 0xFFFFFFFF], dtype=np.uint32)


def _check_key(key) -> np.ndarray:
    key = np.asarray(key)
    if key.shape != (2,) or key.dtype != np.uint32:
        raise TypeError(f"expected a uint32 key of shape (2,), got {key.dtype} {key.shape}")
    return key


def split(key, num: int = 2) -> np.ndarray:
    """Derive ``num`` child keys, shape ``(num, 2)``.

    The parent key should not be reused for sampling afterwards.
    """
    key = _check_key(key)
    if num < 1:
        raise ValueError(f"num must be >= 1, got {num}")
    ctr = np.zeros((num, 4), dtype=np.uint64)
    ctr[:, 0] = np.arange(num, dtype=np.uint64) & _MASK32
    ctr[:, 1] = np.arange(num, dtype=np.uint64) >> _SHIFT32
    ctr[:, 3] = _SPLIT_DOMAIN
    return philox4x32(ctr, key)[:, :2].copy()


def random_bits(key, count: int) -> np.ndarray:
    """``count`` raw uint32 words from the key's sampling stream."""
    key = _check_key(key)
    count = int(count)
    if count < 0:
        raise ValueError("count must be non-negative")
    nblocks = -(-count // 4)
    ctr = np.zeros((nblocks, 4), dtype=np.uint64)
    idx = np.arange(nblocks, dtype=np.uint64)
    ctr[:, 0] = idx & _MASK32
    ctr[:, 1] = idx >> _SHIFT32
    ctr[:, 3] = _BITS_DOMAIN
    return philox4x32(ctr, key).reshape(-1)[:count]


def _as_shape(shape) -> tuple[int, ...]:
    if isinstance(shape, (int, np.integer)):
        return (int(shape),)
    return tuple(int(s) for s in shape)


def _unit_doubles(key, count: int) -> np.ndarray:
    # 53-bit doubles in [0, 1) from pairs of words
    words = random_bits(key, 2 * count).astype(np.uint64).reshape(count, 2)
    a = words[:, 0] >> np.uint64(5)
    b = words[:, 1] >> np.uint64(6)
    return (a.astype(np.float64) * 67108864.0 + b.astype(np.float64)) / 9007199254740992.0


def uniform(key, shape=(), low: float = 0.0, high: float = 1.0) -> np.ndarray:
    """Uniform floats in ``[low, high)``."""
    shape = _as_shape(shape)
    n = int(np.prod(shape, dtype=np.int64))
    u = _unit_doubles(key, n)
    return (low + (high - low) * u).reshape(shape)


def normal(key, shape=()) -> np.ndarray:
    """Standard normal samples via the Box-Muller transform."""
    shape = _as_shape(shape)
    n = int(np.prod(shape, dtype=np.int64))
    npairs = -(-n // 2)
    u = _unit_doubles(key, 2 * npairs).reshape(npairs, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    theta = 2.0 * np.pi * u[:, 1]
    z = np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=-1)
    return z.reshape(-1)[:n].reshape(shape)


def randint(key, shape, high: int) -> np.ndarray:
    """Integers uniform on ``[0, high)``."""
    if high < 1:
        raise ValueError("high must be >= 1")
    u = uniform(key, shape)
    return np.minimum((u * high).astype(np.int64), high - 1)


def permutation(key, n: int) -> np.ndarray:
    """A uniformly random permutation of ``range(n)``."""
    return np.argsort(uniform(key, n), kind="stable")
