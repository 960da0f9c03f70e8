"""Exact Shapley attribution for product-kernel decision functions
f(x) = sum_i alpha_i k(x, x_i) + bias.

The game is played over the functional-decomposition value function
v_x(S) = alpha^T k_S(X_S, x_S) with v(empty) = alpha^T 1; the bias is
feature-independent and deliberately excluded (reported alongside, never
attributed). phi_j = alpha^T ((z_j - 1) * sum_q mu(q) e_q(Z_without_j))
with z_j the per-feature kernel vector between the training rows and the
explained point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import InputError
from .esp import (
    ShapleyWeights,
    loo_psi_newton,
    shapley_weights,
    weighted_loo_esp_sums,
)
from .kernels import (
    ProductKernelSpec,
    _as_matrix,
    _as_subset,
    _as_vector,
    feature_kernel_columns,
    log_feature_kernel_columns,
)
from .oracle import ValueFunctionHandle

# Default backend switch: the per-feature Newton recursion wins on
# constant factors at small d, the leave-one-out engine on asymptotics.
_AUTO_STABLE_ABOVE = 20

BACKENDS = ("auto", "stable", "newton")


@dataclass(frozen=True)
class Attribution:
    """Per-feature Shapley values plus the game's boundary values."""

    phi: np.ndarray = field(repr=False)
    v_full: float
    v_empty: float
    method: str

    def __post_init__(self):
        object.__setattr__(
            self, "phi", np.asarray(self.phi, dtype=np.float64).reshape(-1)
        )

    @property
    def d(self) -> int:
        return self.phi.shape[0]

    def efficiency_gap(self) -> float:
        """sum(phi) - (v_full - v_empty); ~0 for the exact methods."""
        return float(self.phi.sum() - (self.v_full - self.v_empty))

    def to_json_dict(self) -> dict:
        return {
            "phi": [float(p) for p in self.phi],
            "v_full": float(self.v_full),
            "v_empty": float(self.v_empty),
            "method": self.method,
        }


@dataclass(frozen=True)
class FittedModel:
    """Coefficients, training features and kernel of a fitted predictor."""

    alpha: np.ndarray = field(repr=False)
    train_X: np.ndarray = field(repr=False)
    kernel: ProductKernelSpec
    bias: float = 0.0

    def __post_init__(self):
        alpha = _as_vector(self.alpha, "alpha")
        X = _as_matrix(self.train_X, "train_X")
        if alpha.shape[0] != X.shape[0]:
            raise InputError(
                f"alpha has {alpha.shape[0]} entries but train_X has {X.shape[0]} rows"
            )
        if X.shape[1] != self.kernel.d:
            raise InputError(
                f"train_X has {X.shape[1]} columns but the kernel spec has d={self.kernel.d}"
            )
        bias = float(self.bias)
        if not np.isfinite(bias):
            raise InputError("bias must be finite")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "train_X", X)
        object.__setattr__(self, "bias", bias)

    @property
    def d(self) -> int:
        return self.train_X.shape[1]

    @property
    def n_train(self) -> int:
        return self.train_X.shape[0]

    def predict(self, x) -> float | np.ndarray:
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim == 1:
            z = feature_kernel_columns(self.kernel, self.train_X, arr)
            return float(self.alpha @ np.prod(z, axis=1) + self.bias)
        X = _as_matrix(arr, "x")
        return np.array([self.predict(row) for row in X])


def baseline_value(model: FittedModel) -> float:
    """Value of the empty coalition: sum of the coefficients."""
    return float(model.alpha.sum())


def value_function(model: FittedModel, x, S: Iterable[int]) -> float:
    """v_x(S) = alpha^T prod_{j in S} k_j(X_j, x_j); empty S gives alpha^T 1."""
    xv = _as_vector(x)
    if xv.shape[0] != model.d:
        raise InputError(f"x has {xv.shape[0]} entries, expected d={model.d}")
    idx = _as_subset(S, model.d)
    if not idx:
        return baseline_value(model)
    z = feature_kernel_columns(model.kernel, model.train_X, xv)
    return float(model.alpha @ np.prod(z[:, idx], axis=1))


def _check_backend(backend: str, d: int) -> str:
    if backend not in BACKENDS:
        raise InputError(f"backend must be one of {BACKENDS}, got {backend!r}")
    if backend == "auto":
        return "stable" if d > _AUTO_STABLE_ABOVE else "newton"
    return backend


def weighted_stack_phi(
    Zs: np.ndarray, w: np.ndarray, mu: ShapleyWeights, mode: str
) -> np.ndarray:
    """Shapley values of a weighted sum of product games.

    Zs is (d, N): row j holds feature j's kernel values across N game
    terms (training rows, sample pairs, or Gram entries); w weights the
    terms. Returns phi with phi[j] = sum_p w_p (Zs[j,p]-1) psi[j,p].
    """
    psi = (
        weighted_loo_esp_sums(Zs, mu)
        if mode == "stable"
        else loo_psi_newton(Zs, mu)
    )
    return ((Zs - 1.0) * psi) @ w


def explain_instance(model: FittedModel, x, backend: str = "auto") -> Attribution:
    """Exact Shapley attribution of the decision function at one point."""
    xv = _as_vector(x)
    if xv.shape[0] != model.d:
        raise InputError(f"x has {xv.shape[0]} entries, expected d={model.d}")
    d = model.d
    mode = _check_backend(backend, d)
    mu = shapley_weights(d)
    z = feature_kernel_columns(model.kernel, model.train_X, xv)
    phi = weighted_stack_phi(z.T, model.alpha, mu, mode)
    v_full = float(model.alpha @ np.prod(z, axis=1))
    return Attribution(phi, v_full, baseline_value(model), f"exact_{mode}")


def explain_batch(model: FittedModel, X, backend: str = "auto") -> list[Attribution]:
    Xm = _as_matrix(X)
    if Xm.shape[1] != model.d:
        raise InputError(f"data has {Xm.shape[1]} columns, expected d={model.d}")
    return [explain_instance(model, row, backend) for row in Xm]


def normalized_attribution(attr: Attribution, n_train: int) -> Attribution:
    """Spread the empty-coalition value equally so the values sum to v_full."""
    n_train = int(n_train)
    if n_train < 1:
        raise InputError(f"n_train must be a positive integer, got {n_train}")
    shift = attr.v_empty / attr.d
    return Attribution(attr.phi + shift, attr.v_full, attr.v_empty, "normalized")


def value_handle(model: FittedModel, x) -> ValueFunctionHandle:
    """Adapter for the oracle and the regression baseline.

    The batch path evaluates v on many coalition masks at once in the
    log domain: v(S) = alpha^T exp(M_S log z), one matmul per batch.
    """
    xv = _as_vector(x)
    if xv.shape[0] != model.d:
        raise InputError(f"x has {xv.shape[0]} entries, expected d={model.d}")
    logz = log_feature_kernel_columns(model.kernel, model.train_X, xv)

    def fn(subset) -> float:
        return value_function(model, xv, subset)

    def batch_fn(masks: np.ndarray) -> np.ndarray:
        M = np.asarray(masks, dtype=np.float64)
        return np.exp(M @ logz.T) @ model.alpha

    return ValueFunctionHandle(fn, model.d, batch_fn)
