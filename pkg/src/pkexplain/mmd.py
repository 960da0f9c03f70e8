"""Squared maximum mean discrepancy between two samples and its exact
per-feature Shapley attribution.

The estimator is the three-term pairwise form

    1/(n(n-1)) sum_{i != j} k(x_i, x_j) + 1/(m(m-1)) sum_{i != j} k(z_i, z_j)
    - 2/(nm) sum_{i,j} k(x_i, z_j)

and the coalition game replaces k by its restriction k_S. The weights of
the three sums cancel on the empty coalition (1 + 1 - 2), so v(empty) = 0
and the Shapley values decompose the statistic itself. Attribution runs
over a stack of per-feature pair-kernel arrays: within-sample pairs are
enumerated unordered with doubled weight (the kernel is symmetric),
cross pairs in full. Long stacks are processed in fixed-size blocks, an
exact split because every quantity is a plain weighted sum over pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .attribution import Attribution, weighted_stack_phi
from .errors import InputError
from .esp import shapley_weights
from .kernels import (
    ProductKernelSpec,
    _as_matrix,
    _as_subset,
    median_heuristic_bandwidths,
    product_gram,
    rowwise_feature_columns,
)
from .oracle import ValueFunctionHandle

# Pairs per processing block; keeps the (block, d) kernel stacks and the
# quadrature buffers bounded regardless of sample sizes.
PAIR_BLOCK = 4_000_000

_BACKENDS = ("stable", "newton")


@dataclass(frozen=True)
class TwoSample:
    """Two samples over the same d features plus the product kernel."""

    X: np.ndarray
    Z: np.ndarray
    kernel: ProductKernelSpec

    def __post_init__(self):
        X = _as_matrix(self.X, "X")
        Z = _as_matrix(self.Z, "Z")
        if X.shape[0] < 2 or Z.shape[0] < 2:
            raise InputError(
                "both samples need at least 2 rows for the i != j sums, "
                f"got {X.shape[0]} and {Z.shape[0]}"
            )
        if X.shape[1] != Z.shape[1]:
            raise InputError(
                f"samples disagree on d: {X.shape[1]} vs {Z.shape[1]} columns"
            )
        if X.shape[1] != self.kernel.d:
            raise InputError(
                f"samples have {X.shape[1]} columns but the kernel spec has d={self.kernel.d}"
            )
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Z", Z)

    @property
    def d(self) -> int:
        return self.X.shape[1]


def make_two_sample(X, Z, bandwidths="median", kind: str = "rbf", seed: int = 0) -> TwoSample:
    """Build a TwoSample; by default bandwidths come from the per-feature
    median heuristic over the pooled rows of X and Z."""
    Xm = _as_matrix(X, "X")
    Zm = _as_matrix(Z, "Z")
    if isinstance(bandwidths, str):
        if bandwidths != "median":
            raise InputError(f"bandwidths must be 'median' or a list, got {bandwidths!r}")
        if Xm.shape[1] != Zm.shape[1]:
            raise InputError(
                f"samples disagree on d: {Xm.shape[1]} vs {Zm.shape[1]} columns"
            )
        bws = median_heuristic_bandwidths(np.vstack([Xm, Zm]), seed=seed)
    else:
        bws = np.asarray(bandwidths, dtype=np.float64)
    spec = ProductKernelSpec.from_bandwidths(kind, bws)
    return TwoSample(Xm, Zm, spec)


def _three_term(Kxx: np.ndarray, Kzz: np.ndarray, Kxz: np.ndarray) -> float:
    n = Kxx.shape[0]
    m = Kzz.shape[0]
    sxx = (Kxx.sum() - np.trace(Kxx)) / (n * (n - 1))
    szz = (Kzz.sum() - np.trace(Kzz)) / (m * (m - 1))
    sxz = 2.0 * Kxz.mean()
    return float(sxx + szz - sxz)


def mmd_sq(ts: TwoSample) -> float:
    """The squared-MMD estimator with the full product kernel.

    Unbiased-style (diagonal excluded), so it may be negative.
    """
    return _three_term(
        product_gram(ts.kernel, ts.X),
        product_gram(ts.kernel, ts.Z),
        product_gram(ts.kernel, ts.X, ts.Z),
    )


def _restricted(ts: TwoSample, idx: list[int]) -> tuple[np.ndarray, np.ndarray, ProductKernelSpec]:
    sub = ProductKernelSpec(tuple(ts.kernel.per_feature[j] for j in idx))
    return ts.X[:, idx], ts.Z[:, idx], sub


def mmd_value_function(ts: TwoSample, S: Iterable[int]) -> float:
    """The estimator with k restricted to the coalition S; v(empty) = 0."""
    idx = _as_subset(S, ts.d)
    if not idx:
        return 0.0
    Xs, Zs, sub = _restricted(ts, idx)
    return _three_term(
        product_gram(sub, Xs), product_gram(sub, Zs), product_gram(sub, Xs, Zs)
    )


def _pair_chunks(
    ts: TwoSample, limit: int
) -> Iterator[tuple[np.ndarray, np.ndarray, float]]:
    """Yield (A, B, weight) row-pair chunks covering the three sums.

    Within-sample pairs appear once (i < j) at twice the ordered-pair
    weight; cross pairs appear once each at weight -2/(nm).
    """
    n, m = ts.X.shape[0], ts.Z.shape[0]
    for S, w in ((ts.X, 2.0 / (n * (n - 1))), (ts.Z, 2.0 / (m * (m - 1)))):
        rows = S.shape[0]
        start = 0
        while start < rows - 1:
            stop, count = start, 0
            while stop < rows - 1 and count + (rows - 1 - stop) <= limit:
                count += rows - 1 - stop
                stop += 1
            stop = max(stop, start + 1)
            i_idx = np.repeat(np.arange(start, stop), (rows - 1) - np.arange(start, stop))
            j_idx = np.concatenate([np.arange(i + 1, rows) for i in range(start, stop)])
            yield S[i_idx], S[j_idx], w
            start = stop
    per = max(1, limit // m)
    for i0 in range(0, n, per):
        rows = np.arange(i0, min(i0 + per, n))
        A = np.repeat(ts.X[rows], m, axis=0)
        B = np.tile(ts.Z, (rows.shape[0], 1))
        yield A, B, -2.0 / (n * m)


def explain_mmd(ts: TwoSample, backend: str = "stable") -> Attribution:
    """Exact Shapley attribution of the squared-MMD estimator."""
    if backend not in _BACKENDS:
        raise InputError(f"backend must be one of {_BACKENDS}, got {backend!r}")
    d = ts.d
    mu = shapley_weights(d)
    phi = np.zeros(d, dtype=np.float64)
    v_full = 0.0
    for A, B, w in _pair_chunks(ts, PAIR_BLOCK):
        Zp = rowwise_feature_columns(ts.kernel, A, B)
        weights = np.full(Zp.shape[0], w)
        phi += weighted_stack_phi(Zp.T, weights, mu, backend)
        v_full += w * float(np.prod(Zp, axis=1).sum())
    return Attribution(phi, v_full, 0.0, f"exact_{backend}")


def value_handle(ts: TwoSample) -> ValueFunctionHandle:
    """Oracle/baseline adapter over the MMD coalition game."""

    def fn(subset) -> float:
        return mmd_value_function(ts, subset)

    chunks = [
        (rowwise_feature_columns(ts.kernel, A, B, log=True), w)
        for A, B, w in _pair_chunks(ts, PAIR_BLOCK)
    ]

    def batch_fn(masks: np.ndarray) -> np.ndarray:
        M = np.asarray(masks, dtype=np.float64)
        out = np.zeros(M.shape[0], dtype=np.float64)
        empty = M.sum(axis=1) == 0
        for logZp, w in chunks:
            out += w * np.exp(M @ logZp.T).sum(axis=1)
        out[empty] = 0.0
        return out

    return ValueFunctionHandle(fn, ts.d, batch_fn)
