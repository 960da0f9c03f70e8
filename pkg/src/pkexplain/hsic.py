"""HSIC dependence estimation and its exact Shapley attribution over
features, including the two-multivariate-block variant.

The estimator is tr(K H L H)/(n-1)^2 with H = I - (1/n) 11^T. Centering
is applied as row/column mean subtraction, H is never materialized, and
M = H L H is formed once. Because K factorizes elementwise over the
per-feature Gram matrices K_j, the coalition game v(S) =
tr(M K_S)/(n-1)^2 is a weighted sum over the n^2 matrix entries of the
product of the selected K_j: the same shape as the predictor game, with
entry weights W = M/(n-1)^2 in place of the dual coefficients. K_empty
is the all-ones matrix, which centering annihilates, so v(empty) = 0
exactly and the attributions decompose the statistic itself.

The matrix path needs the d per-feature Grams, O(n^2 d) numbers; it is
processed in row blocks so peak memory stays bounded, and d is capped
(configurable) to keep the quadratic-in-d engine cost predictable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .attribution import Attribution, weighted_stack_phi
from .errors import InputError, ResourceLimitError
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

# Default cap on d for the matrix path (d Gram matrices of n^2 entries).
MATRIX_D_CAP = 256

# Matrix entries (pairs x features) per processing block.
ENTRY_BLOCK = 4_000_000

_BACKENDS = ("stable", "newton")


@dataclass(frozen=True)
class HsicInput:
    """Feature matrix with its product kernel and the target Gram L.

    L is validated as symmetric and stored in exactly symmetric form
    (tiny asymmetries from round-tripping are averaged away).
    """

    X: np.ndarray
    kernel_x: ProductKernelSpec
    L: np.ndarray

    def __post_init__(self):
        X = _as_matrix(self.X, "X")
        n = X.shape[0]
        if n < 2:
            raise InputError(f"need at least 2 rows, got {n}")
        if X.shape[1] != self.kernel_x.d:
            raise InputError(
                f"X has {X.shape[1]} columns but the kernel spec has d={self.kernel_x.d}"
            )
        L = np.asarray(self.L, dtype=np.float64)
        if L.shape != (n, n):
            raise InputError(f"target Gram must be {n}x{n}, got {L.shape}")
        if not np.all(np.isfinite(L)):
            raise InputError("target Gram contains non-finite entries")
        gap = float(np.abs(L - L.T).max())
        scale = max(1.0, float(np.abs(L).max()))
        if gap > 1e-8 * scale:
            raise InputError(f"target Gram is not symmetric (max asymmetry {gap:.3e})")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "L", (L + L.T) / 2.0)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def target_gram(y, kind: str = "rbf") -> np.ndarray:
    """Pairwise kernel matrix on targets.

    rbf bandwidths come from the per-column median heuristic; the
    categorical kernel is bandwidth-free. Accepts a vector or a matrix
    of targets; multi-column targets use a product kernel over columns.
    """
    Y = np.asarray(y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    Y = _as_matrix(Y, "y")
    if Y.shape[0] < 2:
        raise InputError(f"need at least 2 targets, got {Y.shape[0]}")
    if kind == "rbf":
        bws = median_heuristic_bandwidths(Y)
    elif kind == "categorical":
        bws = np.ones(Y.shape[1])
    else:
        raise InputError(f"target kernel must be 'rbf' or 'categorical', got {kind!r}")
    return product_gram(ProductKernelSpec.from_bandwidths(kind, bws), Y)


def center_gram(L: np.ndarray) -> np.ndarray:
    """M = H L H without materializing H; exactly symmetric for symmetric L."""
    rm = L.mean(axis=1)
    g = rm.mean()
    return L - rm[:, None] - rm[None, :] + g


def hsic(inp: HsicInput) -> float:
    """tr(K H L H)/(n-1)^2 with K the full product Gram of the features.

    The estimator is biased but nonnegative for PSD K and L.
    """
    K = product_gram(inp.kernel_x, inp.X)
    M = center_gram(inp.L)
    return float((K * M).sum() / (inp.n - 1) ** 2)


def hsic_value_function(inp: HsicInput, S: Iterable[int]) -> float:
    """tr(K_S H L H)/(n-1)^2 with K restricted to S; v(empty) = 0."""
    idx = _as_subset(S, inp.d)
    if not idx:
        return 0.0
    sub = ProductKernelSpec(tuple(inp.kernel_x.per_feature[j] for j in idx))
    K = product_gram(sub, inp.X[:, idx])
    M = center_gram(inp.L)
    return float((K * M).sum() / (inp.n - 1) ** 2)


def _entry_chunks(
    inp: HsicInput, limit: int, log: bool = False
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ((P, d) per-feature kernel stacks, entry weights) covering
    all n^2 Gram entries in row blocks."""
    n, d = inp.n, inp.d
    W = center_gram(inp.L) / (n - 1) ** 2
    per = max(1, limit // (n * d))
    for r0 in range(0, n, per):
        rows = np.arange(r0, min(r0 + per, n))
        A = np.repeat(inp.X[rows], n, axis=0)
        B = np.tile(inp.X, (rows.shape[0], 1))
        yield rowwise_feature_columns(inp.kernel_x, A, B, log=log), W[rows].ravel()


def explain_hsic(inp: HsicInput, backend: str = "stable", d_cap: int = MATRIX_D_CAP) -> Attribution:
    """Exact Shapley attribution of HSIC across the d features."""
    if backend not in _BACKENDS:
        raise InputError(f"backend must be one of {_BACKENDS}, got {backend!r}")
    d = inp.d
    if d > d_cap:
        raise ResourceLimitError(
            f"d={d} exceeds the matrix-path cap {d_cap}; raise d_cap or "
            "restrict to a feature subset"
        )
    mu = shapley_weights(d)
    phi = np.zeros(d, dtype=np.float64)
    for Zp, w in _entry_chunks(inp, ENTRY_BLOCK):
        phi += weighted_stack_phi(Zp.T, w, mu, backend)
    return Attribution(phi, hsic(inp), 0.0, f"exact_{backend}")


def explain_hsic_bivariate(
    X,
    Z,
    kernel_x: ProductKernelSpec,
    kernel_z: ProductKernelSpec,
    backend: str = "stable",
    d_cap: int = MATRIX_D_CAP,
) -> tuple[Attribution, Attribution]:
    """Attribute the dependence between two multivariate blocks twice:
    over X's features with Z's full Gram as target, and over Z's
    features with X's full Gram as target. Both games total the same
    HSIC value."""
    Xm = _as_matrix(X, "X")
    Zm = _as_matrix(Z, "Z")
    if Xm.shape[0] != Zm.shape[0]:
        raise InputError(
            f"both blocks need the same rows, got {Xm.shape[0]} and {Zm.shape[0]}"
        )
    side_x = HsicInput(Xm, kernel_x, product_gram(kernel_z, Zm))
    side_z = HsicInput(Zm, kernel_z, product_gram(kernel_x, Xm))
    return (
        explain_hsic(side_x, backend=backend, d_cap=d_cap),
        explain_hsic(side_z, backend=backend, d_cap=d_cap),
    )


def value_handle(inp: HsicInput) -> ValueFunctionHandle:
    """Oracle/baseline adapter over the HSIC coalition game."""

    def fn(subset) -> float:
        return hsic_value_function(inp, subset)

    chunks = list(_entry_chunks(inp, ENTRY_BLOCK, log=True))

    def batch_fn(masks: np.ndarray) -> np.ndarray:
        M = np.asarray(masks, dtype=np.float64)
        out = np.zeros(M.shape[0], dtype=np.float64)
        empty = M.sum(axis=1) == 0
        for logZp, w in chunks:
            out += np.exp(M @ logZp.T) @ w
        out[empty] = 0.0
        return out

    return ValueFunctionHandle(fn, inp.d, batch_fn)
