"""Elementwise elementary symmetric polynomials and Shapley weight vectors.

Two ESP backends: the Newton's-identity recursion (fast at small
collection sizes, numerically fragile at large ones because the
alternating sum cancels) and the characteristic-polynomial method, which
builds the coefficients of prod_i (x - z_i) with a global input scaling
and reads the ESPs off the coefficients. The coefficient update uses no
division and no elementwise powers; for nonnegative inputs its
alternating-sign storage makes every accumulation add magnitudes, so it
stays accurate at collection sizes where Newton's recursion has lost all
digits.

weighted_loo_esp_sums is the engine behind every attribution: it returns
the mu-weighted ESP sums of each leave-one-row-out subcollection. The
Shapley size weight is a Beta integral, mu(q) = int_0^1 t^q (1-t)^(p-q)
dt for a p+1-player game, which turns the weighted sum into
int_0^1 prod_{i != j} (1 + t (z_i - 1)) dt: a polynomial of degree p in
t, integrated exactly by Gauss-Legendre quadrature with ceil((p+1)/2)
nodes. Leaving row j out is a pointwise division by a factor bounded
below by 1 - t_k > 0, so for inputs in [0, 1] every operation multiplies
or adds nonnegative quantities of moderate size: no cancellation at any
collection size, and O(p^2 N) for the whole family against O(p^3 N) for
per-row recomputation.

Everything is pure float64; summation order within an elementwise slot is
fixed, so results do not depend on how callers parallelize.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError

_MAX_PLAYERS = 10000


@dataclass(frozen=True)
class ShapleyWeights:
    """mu[q] = q! (d-q-1)! / d! for q = 0..d-1."""

    d: int
    mu: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class EspTable:
    """Elementwise e_0..e_m of a collection of same-shaped arrays."""

    orders: list[np.ndarray]

    @property
    def max_order(self) -> int:
        return len(self.orders) - 1


def shapley_weights(d: int) -> ShapleyWeights:
    """Shapley coalition-size weights via the multiplicative recurrence.

    mu[0] = 1/d and mu[q+1] = mu[q] (q+1)/(d-q-1); no factorial is ever
    materialized, so d in the thousands is fine.
    """
    d = int(d)
    if not 1 <= d <= _MAX_PLAYERS:
        raise InputError(f"d must be in [1, {_MAX_PLAYERS}], got {d}")
    mu = np.empty(d, dtype=np.float64)
    mu[0] = 1.0 / d
    for q in range(d - 1):
        mu[q + 1] = mu[q] * (q + 1) / (d - q - 1)
    return ShapleyWeights(d, mu)


def _stack(values: Sequence[np.ndarray]) -> tuple[np.ndarray, tuple[int, ...]]:
    if len(values) == 0:
        raise InputError("need at least one input array")
    arrays = [np.asarray(v, dtype=np.float64) for v in values]
    shape = arrays[0].shape
    for a in arrays[1:]:
        if a.shape != shape:
            raise InputError(f"input arrays differ in shape: {shape} vs {a.shape}")
    flat = np.stack([a.reshape(-1) for a in arrays])
    return flat, shape


def _check_order(m, p: int) -> int:
    m = p if m is None else int(m)
    if not 0 <= m <= p:
        raise InputError(f"max_order must be in [0, {p}], got {m}")
    return m


def esp_newton(values: Sequence[np.ndarray], max_order: int | None = None) -> EspTable:
    """ESPs from power sums: e_q = (1/q) sum_{r=1}^{q} (-1)^(r-1) e_{q-r} p_r."""
    Z, shape = _stack(values)
    p = Z.shape[0]
    m = _check_order(max_order, p)
    n = Z.shape[1]
    power_sums = np.empty((m + 1, n), dtype=np.float64)
    Zr = np.ones_like(Z)
    for r in range(1, m + 1):
        Zr = Zr * Z
        power_sums[r] = Zr.sum(axis=0)
    e = [np.ones(n, dtype=np.float64)]
    for q in range(1, m + 1):
        acc = np.zeros(n, dtype=np.float64)
        sign = 1.0
        for r in range(1, q + 1):
            acc += sign * e[q - r] * power_sums[r]
            sign = -sign
        e.append(acc / q)
    return EspTable([a.reshape(shape) for a in e])


def _charpoly_coeffs(Zt: np.ndarray) -> np.ndarray:
    """Coefficients of prod_i (x - z_i), leading first, for scaled rows Zt.

    Row t holds the x^(p-t) coefficient, so C[q] = (-1)^q * e_q of the
    scaled inputs. Each update subtracts z_i times the previous row; with
    alternating-sign storage and nonnegative z the accumulations never
    cancel.
    """
    p, n = Zt.shape
    C = np.zeros((p + 1, n), dtype=np.float64)
    C[0] = 1.0
    for i in range(p):
        C[1 : i + 2] -= Zt[i] * C[0 : i + 1]
    return C


def _scale_of(Z: np.ndarray) -> float:
    s = float(Z.max()) if Z.size else 0.0
    return s if s > 0.0 else 1.0


def esp_stable(values: Sequence[np.ndarray], max_order: int | None = None) -> EspTable:
    """ESPs via the scaled characteristic polynomial.

    Inputs are divided by their global maximum s (1 if the maximum is not
    positive); e_q is recovered as (-1)^q times the matching coefficient
    times s^q.
    """
    Z, shape = _stack(values)
    p = Z.shape[0]
    m = _check_order(max_order, p)
    s = _scale_of(Z)
    C = _charpoly_coeffs(Z / s)
    orders = []
    spow = 1.0
    sign = 1.0
    for q in range(m + 1):
        orders.append((sign * spow) * C[q].reshape(shape))
        spow *= s
        sign = -sign
    return EspTable(orders)


def weighted_esp_sum(table: EspTable, weights: ShapleyWeights) -> np.ndarray:
    """sum_q mu[q] e_q, elementwise."""
    if len(table.orders) != weights.d:
        raise InputError(
            f"table has orders 0..{table.max_order} but weights expect 0..{weights.d - 1}"
        )
    acc = weights.mu[0] * table.orders[0]
    for q in range(1, weights.d):
        acc = acc + weights.mu[q] * table.orders[q]
    return acc


def loo_psi_newton(Z: np.ndarray, weights: ShapleyWeights) -> np.ndarray:
    """Per-row recomputation counterpart of weighted_loo_esp_sums.

    Runs the Newton's-identity recursion on each leave-one-row-out
    subcollection from scratch; O(p^3 N) overall, kept for cross-checks
    and for small p where it beats the quadrature on constant factors.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] < 1:
        raise InputError(f"Z must be a (p, N) array with p >= 1, got shape {Z.shape}")
    p, n = Z.shape
    if weights.d != p:
        raise InputError(f"weights are for d={weights.d} but Z has {p} rows")
    psi = np.empty((p, n), dtype=np.float64)
    for j in range(p):
        if p == 1:
            psi[j] = 1.0
            continue
        table = esp_newton([Z[i] for i in range(p) if i != j], p - 1)
        psi[j] = weighted_esp_sum(table, weights)
    return psi


def _gauss_legendre_01(k: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = _GL_CACHE.get(k, (None, None))
    if nodes is None:
        x, w = np.polynomial.legendre.leggauss(k)
        nodes, weights = 0.5 * (x + 1.0), 0.5 * w
        _GL_CACHE[k] = (nodes, weights)
    return nodes, weights


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def weighted_loo_esp_sums(Z: np.ndarray, weights: ShapleyWeights) -> np.ndarray:
    """psi[j] = sum_q mu[q] e_q(rows of Z with row j removed), for all j.

    Z is (p, N): p arrays flattened to length N, with entries in [0, 1]
    (kernel values). Evaluates the Beta-integral form
    int_0^1 prod_{i != j} (1 + t (z_i - 1)) dt exactly on a
    Gauss-Legendre grid; each node costs one full product plus one
    division per row, O(p N) per node over ceil(p/2) nodes.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] < 1:
        raise InputError(f"Z must be a (p, N) array with p >= 1, got shape {Z.shape}")
    p, n = Z.shape
    if weights.d != p:
        raise InputError(f"weights are for d={weights.d} but Z has {p} rows")
    zmin, zmax = float(Z.min()), float(Z.max())
    if zmin < 0.0 or zmax > 1.0:
        raise InputError(
            f"leave-one-out engine expects kernel values in [0, 1], got [{zmin}, {zmax}]"
        )
    # Integrand degree is p-1, so ceil(p/2) nodes integrate it exactly.
    nodes, wq = _gauss_legendre_01((p + 1) // 2)
    A = Z - 1.0
    psi = np.zeros((p, n), dtype=np.float64)
    B = np.empty_like(A)
    for t, w in zip(nodes, wq):
        np.multiply(A, t, out=B)
        B += 1.0
        G = np.prod(B, axis=0)
        np.divide(G, B, out=B)
        np.multiply(B, w, out=B)
        psi += B
    return psi
