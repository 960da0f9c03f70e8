"""Brute-force Shapley values over an arbitrary value function.

Verification-only: evaluates all 2^d coalitions once each (no repeats)
and applies the weighted marginal-contribution definition directly, so
it is the ground truth the polynomial-time paths are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InputError, ResourceLimitError
from .esp import shapley_weights

_MAX_D = 20


@dataclass(frozen=True)
class ValueFunctionHandle:
    """A coalition game: fn maps a tuple of 0-based feature indices to a
    real value; batch_fn, when present, maps an (m, d) boolean mask
    matrix to m values in one call (same function, vectorized)."""

    fn: Callable[[tuple[int, ...]], float]
    d: int
    batch_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None


def _subset_of(mask: int, d: int) -> tuple[int, ...]:
    return tuple(j for j in range(d) if mask >> j & 1)


def shapley_bruteforce(v: ValueFunctionHandle, d: int | None = None):
    """phi_j = sum over coalitions S without j of mu(|S|) (v(S+j) - v(S)).

    Exactly 2^d evaluations of v.fn (coalitions keyed by bitmask).
    """
    from .attribution import Attribution

    d = v.d if d is None else int(d)
    if d != v.d:
        raise InputError(f"handle is for d={v.d} but d={d} was requested")
    if d < 1:
        raise InputError(f"d must be >= 1, got {d}")
    if d > _MAX_D:
        raise ResourceLimitError(
            f"brute force needs 2^{d} evaluations; the cap is d={_MAX_D}"
        )
    size = 1 << d
    vals = np.empty(size, dtype=np.float64)
    for mask in range(size):
        vals[mask] = float(v.fn(_subset_of(mask, d)))
    masks = np.arange(size, dtype=np.uint32)
    sizes = np.bitwise_count(masks).astype(np.intp)
    mu = shapley_weights(d).mu
    phi = np.empty(d, dtype=np.float64)
    for j in range(d):
        without = masks[(masks >> np.uint32(j)) & np.uint32(1) == 0]
        gain = vals[without | np.uint32(1 << j)] - vals[without]
        phi[j] = float(mu[sizes[without]] @ gain)
    return Attribution(phi, float(vals[size - 1]), float(vals[0]), "oracle")
