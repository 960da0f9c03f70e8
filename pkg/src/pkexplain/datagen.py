"""Seeded synthetic data generators for the desk-scale experiments.

All draws come from numpy's Philox engine, a 64-bit counter-based
generator, so outputs are reproducible bit-for-bit from the seed alone
on any platform.
"""

from __future__ import annotations

from math import ceil

import numpy as np

from .errors import InputError

TASKS = ("poly5", "poly10", "sqexp")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def gen_linear(n: int, d: int, noise_sigma: float = 0.1, seed: int = 0):
    """Standard-normal features with a linear response.

    Returns (X, y, w) where y = X w + noise and w is itself a seeded
    standard-normal draw.
    """
    if n < 1 or d < 1:
        raise InputError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if noise_sigma < 0:
        raise InputError(f"noise_sigma must be >= 0, got {noise_sigma}")
    rng = _rng(seed)
    w = rng.normal(size=d)
    X = rng.normal(size=(n, d))
    y = X @ w
    if noise_sigma > 0:
        y = y + rng.normal(scale=noise_sigma, size=n)
    return X, y, w


def gen_nonlinear(task: str, n: int, d: int, seed: int = 0):
    """Responses driven by only the first ceil(d/3) features.

    poly5/poly10: y = (sum of active features)^degree, standardized by
    the sample standard deviation. sqexp: y = exp(mean of squared
    active features), the 1/|S| scaling keeping the exponent bounded.
    Returns (X, y, active_index_array).
    """
    if task not in TASKS:
        raise InputError(f"task must be one of {TASKS}, got {task!r}")
    if d < 3:
        raise InputError(f"need d >= 3 so the active third is proper, got d={d}")
    if n < 1:
        raise InputError(f"need n >= 1, got n={n}")
    rng = _rng(seed)
    X = rng.normal(size=(n, d))
    active = np.arange(ceil(d / 3))
    t = X[:, active]
    if task == "sqexp":
        y = np.exp((t**2).sum(axis=1) / active.size)
    else:
        degree = 5 if task == "poly5" else 10
        y = t.sum(axis=1) ** degree
        sd = y.std()
        if sd > 0:
            y = y / sd
    return X, y, active


def gen_mmd_pair(n: int, d: int = 20, dof: float = 3.0, seed: int = 0):
    """Two samples that agree on the first half of the features.

    Both X and Z are standard normal on features 0..d/2-1; on the
    second half X stays normal while Z switches to Student-t
    (same mean, heavier tails). Returns (X, Z).
    """
    if n < 2:
        raise InputError(f"need n >= 2, got n={n}")
    if d < 2 or d % 2:
        raise InputError(f"d must be a positive even integer, got d={d}")
    if not dof > 2:
        raise InputError(
            f"Student-t dof must exceed 2 so the variance is finite, got {dof}"
        )
    rng = _rng(seed)
    half = d // 2
    X = rng.normal(size=(n, d))
    Z = np.empty((n, d))
    Z[:, :half] = rng.normal(size=(n, half))
    Z[:, half:] = rng.standard_t(dof, size=(n, half))
    return X, Z
