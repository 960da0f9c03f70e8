"""Per-feature base kernels, their products over feature subsets, and
bandwidth selection.

A product kernel is k(x, x') = prod_j k_j(x_j, x'_j) with one base kernel
per feature. All similarity values lie in (0, 1] for the continuous kinds
and in {0, 1} for the categorical kind; the empty feature subset always
evaluates to 1. Everything here is a pure function of its inputs, and
arrays are never mutated, so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InputError,
    InsufficientDataError,
    InvalidSpecError,
    InvalidSubsetError,
)

KINDS = ("rbf", "laplacian_rbf", "cauchy", "categorical")

# exp(_MISMATCH_LOG) is exactly 0.0 in float64, so batched log-domain
# evaluation of products containing a categorical mismatch stays finite
# and exponentiates back to the exact 0 the direct path produces.
_MISMATCH_LOG = -1.0e6

# Pairwise-median strategy thresholds: direct materialization below
# _DIRECT_LIMIT rows, exact counting search up to _EXACT_LIMIT, seeded
# subsampling beyond (bounded memory at every size).
_DIRECT_LIMIT = 2048
_EXACT_LIMIT = 20000
_SUBSAMPLE_PAIRS = 10000


@dataclass(frozen=True)
class BaseKernelSpec:
    """One feature's kernel: a kind from KINDS plus a bandwidth.

    The bandwidth is ignored by the categorical kind (equality of codes
    needs no scale) but must be a positive finite real for the rest.
    """

    kind: str
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpecError(
                f"unknown kernel kind {self.kind!r}; expected one of {KINDS}"
            )
        bw = float(self.bandwidth)
        if self.kind != "categorical" and not (math.isfinite(bw) and bw > 0.0):
            raise InvalidSpecError(
                f"bandwidth must be a positive finite real, got {self.bandwidth!r}"
            )
        object.__setattr__(self, "bandwidth", bw)


@dataclass(frozen=True)
class ProductKernelSpec:
    """Ordered per-feature base kernels whose product forms the kernel."""

    per_feature: tuple[BaseKernelSpec, ...]

    def __post_init__(self):
        pf = tuple(self.per_feature)
        if not pf:
            raise InvalidSpecError("product kernel needs at least one feature")
        for s in pf:
            if not isinstance(s, BaseKernelSpec):
                raise InvalidSpecError("per_feature entries must be BaseKernelSpec")
        object.__setattr__(self, "per_feature", pf)

    @property
    def d(self) -> int:
        return len(self.per_feature)

    @classmethod
    def from_bandwidths(cls, kind: str, bandwidths: Sequence[float]) -> "ProductKernelSpec":
        return cls(tuple(BaseKernelSpec(kind, float(b)) for b in bandwidths))


def kernel_spec_to_json(spec: ProductKernelSpec) -> dict:
    return {
        "features": [
            {"kind": s.kind, "bandwidth": s.bandwidth} for s in spec.per_feature
        ]
    }


def kernel_spec_from_json(blob: dict) -> ProductKernelSpec:
    if not isinstance(blob, dict) or "features" not in blob:
        raise InputError("kernel spec JSON must be an object with a 'features' list")
    feats = blob["features"]
    if not isinstance(feats, list) or not feats:
        raise InputError("kernel spec 'features' must be a non-empty list")
    out = []
    for i, f in enumerate(feats):
        if not isinstance(f, dict) or "kind" not in f:
            raise InputError(f"feature {i}: expected an object with a 'kind'")
        out.append(BaseKernelSpec(f["kind"], f.get("bandwidth", 1.0)))
    return ProductKernelSpec(tuple(out))


def _as_matrix(X, name: str = "X") -> np.ndarray:
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite entries")
    return arr


def _as_vector(x, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise InputError(f"{name} must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite entries")
    return arr


def _as_subset(subset: Iterable[int], d: int) -> list[int]:
    idx = []
    for j in subset:
        jj = int(j)
        if jj != j:
            raise InvalidSubsetError(f"subset index {j!r} is not an integer")
        if not 0 <= jj < d:
            raise InvalidSubsetError(f"subset index {jj} out of range for d={d}")
        idx.append(jj)
    return sorted(set(idx))


def _eval_kind(kind: str, bw, A, B, log: bool = False):
    """Evaluate one base-kernel kind on broadcastable arrays.

    Every code path that evaluates kernels funnels through here with the
    same operation order, so scalar, per-feature and grouped evaluation
    agree bitwise.
    """
    if kind == "rbf":
        t = A - B
        r = (t * t) * (-0.5) / (bw * bw)
        return r if log else np.exp(r)
    if kind == "laplacian_rbf":
        r = -np.abs(A - B) / bw
        return r if log else np.exp(r)
    if kind == "cauchy":
        t = A - B
        t = (t * t) / (bw * bw)
        return -np.log1p(t) if log else 1.0 / (1.0 + t)
    eq = A == B
    if log:
        return np.where(eq, 0.0, _MISMATCH_LOG)
    return np.asarray(eq, dtype=np.float64)


def eval_base(spec: BaseKernelSpec, a: float, b: float) -> float:
    """Similarity of two scalar feature values under one base kernel."""
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InputError(f"kernel inputs must be finite, got a={a!r}, b={b!r}")
    return float(_eval_kind(spec.kind, spec.bandwidth, a, b))


def eval_product(
    spec: ProductKernelSpec, x, x2, subset: Iterable[int]
) -> float:
    """Product of the base kernels over the given feature subset.

    The empty subset returns 1 (empty-product convention).
    """
    xv = _as_vector(x, "x")
    x2v = _as_vector(x2, "x2")
    if xv.shape[0] != spec.d or x2v.shape[0] != spec.d:
        raise InputError(
            f"points must have d={spec.d} entries, got {xv.shape[0]} and {x2v.shape[0]}"
        )
    out = 1.0
    for j in _as_subset(subset, spec.d):
        s = spec.per_feature[j]
        out *= float(_eval_kind(s.kind, s.bandwidth, xv[j], x2v[j]))
    return out


def _check_shapes(spec: ProductKernelSpec, X: np.ndarray, x: np.ndarray | None):
    if X.shape[1] != spec.d:
        raise InputError(f"X has {X.shape[1]} columns but the kernel spec has d={spec.d}")
    if x is not None and x.shape[0] != spec.d:
        raise InputError(f"x has {x.shape[0]} entries but the kernel spec has d={spec.d}")


def _group_by_kind(spec: ProductKernelSpec) -> list[tuple[str, np.ndarray]]:
    groups: dict[str, list[int]] = {}
    for j, s in enumerate(spec.per_feature):
        groups.setdefault(s.kind, []).append(j)
    return [(kind, np.asarray(cols, dtype=np.intp)) for kind, cols in groups.items()]


def _columns_impl(
    spec: ProductKernelSpec, X: np.ndarray, x: np.ndarray, log: bool
) -> np.ndarray:
    n, d = X.shape
    out = np.empty((n, d), dtype=np.float64)
    bws = np.asarray([s.bandwidth for s in spec.per_feature], dtype=np.float64)
    for kind, cols in _group_by_kind(spec):
        out[:, cols] = _eval_kind(
            kind, bws[cols][None, :], X[:, cols], x[cols][None, :], log=log
        )
    return out


def rowwise_feature_columns(spec: ProductKernelSpec, A, B, log: bool = False) -> np.ndarray:
    """(P, d) per-feature kernel values between paired rows of A and B.

    Entry (p, j) is k_j(A[p, j], B[p, j]); the workhorse behind pairwise
    statistics where each row of A is matched to the same row of B.
    """
    Am = _as_matrix(A, "A")
    Bm = _as_matrix(B, "B")
    if Am.shape != Bm.shape:
        raise InputError(f"paired inputs differ in shape: {Am.shape} vs {Bm.shape}")
    _check_shapes(spec, Am, None)
    out = np.empty_like(Am)
    bws = np.asarray([s.bandwidth for s in spec.per_feature], dtype=np.float64)
    for kind, cols in _group_by_kind(spec):
        out[:, cols] = _eval_kind(
            kind, bws[cols][None, :], Am[:, cols], Bm[:, cols], log=log
        )
    return out


def feature_kernel_columns(spec: ProductKernelSpec, X, x) -> np.ndarray:
    """n x d matrix whose column j is k_j(X[:, j], x_j) for every feature."""
    Xm = _as_matrix(X)
    xv = _as_vector(x)
    _check_shapes(spec, Xm, xv)
    return _columns_impl(spec, Xm, xv, log=False)


def log_feature_kernel_columns(spec: ProductKernelSpec, X, x) -> np.ndarray:
    """Log of feature_kernel_columns; categorical mismatches map to a
    constant whose exp is exactly 0, keeping log-domain sums finite."""
    Xm = _as_matrix(X)
    xv = _as_vector(x)
    _check_shapes(spec, Xm, xv)
    return _columns_impl(spec, Xm, xv, log=True)


def feature_kernel_vector(spec: ProductKernelSpec, j: int, X, x) -> np.ndarray:
    """Per-row base-kernel values of feature j between X and a point x."""
    Xm = _as_matrix(X)
    xv = _as_vector(x)
    _check_shapes(spec, Xm, xv)
    j = int(j)
    if not 0 <= j < spec.d:
        raise InputError(f"feature index {j} out of range for d={spec.d}")
    sub = ProductKernelSpec((spec.per_feature[j],))
    return _columns_impl(sub, Xm[:, [j]], xv[[j]], log=False)[:, 0]


def feature_kernel_matrix(spec: ProductKernelSpec, j: int, X) -> np.ndarray:
    """n x n Gram matrix of feature j's base kernel on X's column j."""
    Xm = _as_matrix(X)
    _check_shapes(spec, Xm, None)
    j = int(j)
    if not 0 <= j < spec.d:
        raise InputError(f"feature index {j} out of range for d={spec.d}")
    s = spec.per_feature[j]
    c = Xm[:, j]
    return _eval_kind(s.kind, s.bandwidth, c[:, None], c[None, :])


def product_gram(spec: ProductKernelSpec, X, X2=None) -> np.ndarray:
    """Full product-kernel Gram matrix between the rows of X and X2."""
    Xm = _as_matrix(X)
    X2m = Xm if X2 is None else _as_matrix(X2, "X2")
    _check_shapes(spec, Xm, None)
    _check_shapes(spec, X2m, None)
    G = np.ones((Xm.shape[0], X2m.shape[0]), dtype=np.float64)
    for j, s in enumerate(spec.per_feature):
        G *= _eval_kind(s.kind, s.bandwidth, Xm[:, j][:, None], X2m[:, j][None, :])
    return G


def _exact_pairwise_median(a_sorted: np.ndarray) -> float:
    """Median of all pairwise differences of a sorted column, materialized."""
    n = a_sorted.shape[0]
    i, j = np.triu_indices(n, k=1)
    return float(np.median(a_sorted[j] - a_sorted[i]))


def _count_diffs_le(a: np.ndarray, t: float) -> int:
    """Number of pairs i<j whose rounded difference a[j]-a[i] is <= t.

    Uses the same float64 subtraction as materializing the differences,
    so the counting path selects exactly the same order statistics.
    Vectorized bisection: for each j the qualifying i form a suffix.
    """
    n = a.shape[0]
    lo = np.zeros(n, dtype=np.intp)
    hi = np.arange(n, dtype=np.intp)  # first qualifying index lies in [0, j]
    while np.any(lo < hi):
        mid = (lo + hi) >> 1
        ok = (a - a[mid]) <= t
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid + 1)
    return int(np.sum(np.arange(n) - lo))


def _kth_pairwise_diff(a: np.ndarray, k: int) -> float:
    """Exact k-th smallest (1-based) pairwise difference of a sorted column."""
    lo, hi = 0.0, float(a[-1] - a[0])
    if hi == 0.0 or _count_diffs_le(a, 0.0) >= k:
        return 0.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return hi
        if _count_diffs_le(a, mid) >= k:
            hi = mid
        else:
            lo = mid


def _pairwise_median_by_counting(a_sorted: np.ndarray) -> float:
    """Exact pairwise-difference median in O(n log n) time, O(n) memory."""
    n = a_sorted.shape[0]
    m = n * (n - 1) // 2
    if m % 2 == 1:
        return _kth_pairwise_diff(a_sorted, (m + 1) // 2)
    x1 = _kth_pairwise_diff(a_sorted, m // 2)
    x2 = _kth_pairwise_diff(a_sorted, m // 2 + 1)
    return 0.5 * (x1 + x2)


def median_heuristic_bandwidths(X, seed: int = 0) -> np.ndarray:
    """Per-feature median of pairwise absolute differences.

    A zero median (constant or heavily tied column) falls back to 1.
    Exact up to _EXACT_LIMIT rows; beyond that a seeded subsample of
    _SUBSAMPLE_PAIRS pairs estimates the median with bounded memory.
    """
    Xm = _as_matrix(X)
    n, d = Xm.shape
    if n < 2:
        raise InsufficientDataError("median heuristic needs at least 2 rows")
    rng = np.random.Generator(np.random.Philox(seed))
    out = np.empty(d, dtype=np.float64)
    for jf in range(d):
        col = np.sort(Xm[:, jf])
        if n > _EXACT_LIMIT:
            i = rng.integers(0, n, size=_SUBSAMPLE_PAIRS)
            j = rng.integers(0, n - 1, size=_SUBSAMPLE_PAIRS)
            j = np.where(j >= i, j + 1, j)
            med = float(np.median(np.abs(col[i] - col[j])))
        elif n <= _DIRECT_LIMIT:
            med = _exact_pairwise_median(col)
        else:
            med = _pairwise_median_by_counting(col)
        out[jf] = med if med > 0.0 else 1.0
    return out
