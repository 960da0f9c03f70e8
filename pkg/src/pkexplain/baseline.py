"""Regression-based Shapley estimator over a coalition value function.

Fits v(S) ~ v(empty) + sum_{j in S} phi_j by weighted least squares with
the constraint sum_j phi_j = v(full) - v(empty) enforced by eliminating
the last coefficient. Coalitions come either from paired sampling (size
s drawn proportional to (d-1)/(s(d-s)), uniform subset within the size,
complement appended) or from full enumeration of proper subsets.

Weight semantics: paired samples already follow the Shapley kernel law,
so each draw enters the regression with unit weight and duplicates
accumulate multiplicity; the complete design attaches the exact kernel
weight (d-1)/(C(d,s) s (d-s)) per mask. Both choices make the complete
design reproduce exact Shapley values and the sampled design converge
to them.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .attribution import Attribution
from .errors import InputError, RankDeficiencyError, ResourceLimitError
from .oracle import ValueFunctionHandle

# full enumeration materializes 2^d - 2 masks
_MAX_ENUM_D = 20


def shapley_kernel_weight(d: int, s: int) -> float:
    """Weight of a size-s proper coalition in the Shapley kernel."""
    if not 0 < s < d:
        raise InputError(f"coalition size must satisfy 0 < s < d, got s={s}, d={d}")
    return (d - 1) / (comb(d, s) * s * (d - s))


@dataclass(frozen=True)
class CoalitionSample:
    """Proper coalitions as a (m, d) 0/1 mask matrix plus per-mask
    regression weights."""

    masks: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        masks = np.asarray(self.masks)
        if masks.ndim != 2:
            raise InputError(f"masks must be 2-D, got shape {masks.shape}")
        masks = masks.astype(np.float64)
        if not np.isin(masks, (0.0, 1.0)).all():
            raise InputError("masks must contain only 0/1 entries")
        sizes = masks.sum(axis=1)
        if masks.shape[0] and not ((sizes > 0) & (sizes < masks.shape[1])).all():
            raise InputError("masks must be proper coalitions (not empty, not full)")
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (masks.shape[0],):
            raise InputError(
                f"need one weight per mask, got {weights.shape} for {masks.shape[0]} masks"
            )
        if masks.shape[0] and not (np.isfinite(weights).all() and (weights > 0).all()):
            raise InputError("weights must be positive and finite")
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "weights", weights)

    @property
    def m(self) -> int:
        return self.masks.shape[0]

    @property
    def d(self) -> int:
        return self.masks.shape[1]


def sample_coalitions_paired(d: int, m: int, seed: int = 0) -> CoalitionSample:
    """Draw m proper coalitions in complement pairs.

    Sizes follow the Shapley-kernel size marginal, so each mask is
    sampled proportional to its kernel weight and enters the regression
    with unit weight.
    """
    if d < 2:
        raise InputError(f"need d >= 2 for proper coalitions, got d={d}")
    if m < 2 or m % 2:
        raise InputError(f"m must be an even integer >= 2, got {m}")
    sizes = np.arange(1, d)
    p = (d - 1) / (sizes * (d - sizes))
    p /= p.sum()
    rng = np.random.Generator(np.random.Philox(seed))
    masks = np.zeros((m, d), dtype=np.float64)
    for i in range(0, m, 2):
        s = int(rng.choice(sizes, p=p))
        members = rng.permutation(d)[:s]
        masks[i, members] = 1.0
        masks[i + 1] = 1.0 - masks[i]
    return CoalitionSample(masks, np.ones(m))


def enumerate_coalitions(d: int) -> CoalitionSample:
    """All 2^d - 2 proper coalitions with exact Shapley-kernel weights."""
    if d < 2:
        raise InputError(f"need d >= 2 for proper coalitions, got d={d}")
    if d > _MAX_ENUM_D:
        raise ResourceLimitError(
            f"enumeration needs 2^{d} masks; supported up to d={_MAX_ENUM_D}"
        )
    codes = np.arange(1, 2**d - 1, dtype=np.uint64)
    masks = ((codes[:, None] >> np.arange(d, dtype=np.uint64)) & 1).astype(np.float64)
    sizes = masks.sum(axis=1).astype(np.int64)
    weights = np.array([shapley_kernel_weight(d, s) for s in range(1, d)])
    return CoalitionSample(masks, weights[sizes - 1])


def _evaluate(v: ValueFunctionHandle, masks: np.ndarray) -> np.ndarray:
    if v.batch_fn is not None:
        return np.asarray(v.batch_fn(masks), dtype=np.float64)
    out = np.empty(masks.shape[0])
    for i, row in enumerate(masks):
        out[i] = v.fn([j for j in range(masks.shape[1]) if row[j]])
    return out


def kernel_shap_regression(
    v: ValueFunctionHandle, d: int, coalitions: CoalitionSample
) -> Attribution:
    """Weighted-least-squares Shapley estimate from a coalition design."""
    if coalitions.m == 0:
        raise InputError("coalition sample is empty")
    if coalitions.d != d:
        raise InputError(f"coalitions have d={coalitions.d}, expected {d}")
    if v.d != d:
        raise InputError(f"value function has d={v.d}, expected {d}")
    v_empty = float(v.fn([]))
    v_full = float(v.fn(range(d)))
    delta = v_full - v_empty

    # aggregate duplicate masks; v is deterministic so this is exact
    uniq, inverse = np.unique(coalitions.masks, axis=0, return_inverse=True)
    w = np.bincount(inverse, weights=coalitions.weights, minlength=uniq.shape[0])
    vals = _evaluate(v, uniq)

    if d == 1:
        return Attribution(np.array([delta]), v_full, v_empty, "regression")

    # eliminate phi_{d-1} = delta - sum(others) and solve for the rest
    y = vals - v_empty - uniq[:, -1] * delta
    A = uniq[:, :-1] - uniq[:, -1:]
    sw = np.sqrt(w)
    beta, _, rank, _ = np.linalg.lstsq(A * sw[:, None], y * sw, rcond=None)
    if rank < d - 1:
        raise RankDeficiencyError(
            f"coalition design has rank {rank} < {d - 1}; "
            "add coalitions to identify all coefficients"
        )
    phi = np.append(beta, delta - beta.sum())
    return Attribution(phi, v_full, v_empty, "regression")


def relative_deviation(exact: Attribution, approx: Attribution, return_skipped: bool = False):
    """Sum over features of |phi_j - phihat_j| / |phi_j|.

    Features with exactly zero reference value are excluded; pass
    return_skipped=True to also get how many were dropped.
    """
    if exact.d != approx.d:
        raise InputError(f"attribution sizes differ: {exact.d} vs {approx.d}")
    denom = np.abs(exact.phi)
    keep = denom > 0.0
    diffs = np.abs(exact.phi - approx.phi)
    total = float((diffs[keep] / denom[keep]).sum())
    if return_skipped:
        return total, int((~keep).sum())
    return total
