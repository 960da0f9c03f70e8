"""Kernel ridge fitting plus CSV/JSON persistence for models and tables.

fit_krr keeps the artifact self-contained: any table can be turned into
a product-kernel predictor whose dual coefficients feed the attribution
engine. The solve is a dense Cholesky factorization with a reciprocal
condition estimate; systems beyond 1e12 are refused with a pointer to
the ridge parameter rather than silently returning noise.

Model files are JSON with a schema_version field. Floats go through
Python's shortest round-trip repr, so load(save(m)) reproduces alpha,
bias, and bandwidths bit-exactly. Training rows are stored inline by
default or in a sidecar CSV referenced by a path relative to the model
file.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
from scipy.linalg import cho_solve, cholesky, lapack

from .attribution import FittedModel
from .errors import (
    ConditioningError,
    InputError,
    InsufficientDataError,
    ParseError,
    SchemaError,
)
from .kernels import (
    ProductKernelSpec,
    _as_matrix,
    _as_vector,
    kernel_spec_from_json,
    kernel_spec_to_json,
    product_gram,
)

_SCHEMA_VERSION = 1
_RCOND_FLOOR = 1e-12


def fit_krr(X, y, kernel: ProductKernelSpec, ridge: float = 1e-8) -> FittedModel:
    """Solve (K + ridge*I) alpha = y for the dual coefficients.

    ridge=0 interpolates the training targets exactly when the Gram
    matrix is well conditioned.
    """
    X = _as_matrix(X, "X")
    yv = _as_vector(y, "y")
    n = X.shape[0]
    if yv.shape[0] != n:
        raise InputError(f"X has {n} rows but y has {yv.shape[0]} entries")
    if X.shape[1] != kernel.d:
        raise InputError(
            f"X has {X.shape[1]} columns but the kernel spec has d={kernel.d}"
        )
    ridge = float(ridge)
    if not ridge >= 0.0:
        raise InputError(f"ridge must be >= 0, got {ridge}")
    A = product_gram(kernel, X)
    A[np.diag_indices_from(A)] += ridge
    anorm = float(np.abs(A).sum(axis=0).max())
    try:
        factor = cholesky(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(
            "Gram matrix is not positive definite at this ridge; increase ridge"
        ) from exc
    rcond, info = lapack.dpocon(factor, anorm, uplo="L")
    if info != 0 or not np.isfinite(rcond) or rcond < _RCOND_FLOOR:
        raise ConditioningError(
            f"condition estimate {1.0 / max(rcond, 1e-300):.2e} exceeds 1e12; "
            "increase ridge"
        )
    alpha = cho_solve((factor, True), yv)
    return FittedModel(alpha, X, kernel, 0.0)


def load_table(path, target_column: str | None = None):
    """Parse a headered CSV into (X, y_or_None, feature_names).

    Feature cells must be numeric. The declared target column may be
    categorical; its values are encoded as float codes over the sorted
    distinct labels.
    """
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc})") from exc
    rows = [r for r in rows if r]
    if not rows:
        raise ParseError(f"{path}: line 1: file is empty, expected a header row")
    header = [c.strip() for c in rows[0]]
    if target_column is not None and target_column not in header:
        raise InputError(
            f"{path}: target column {target_column!r} not in header {header}"
        )
    if len(rows) == 1:
        raise InsufficientDataError(f"{path}: header only, no data rows")
    t_idx = header.index(target_column) if target_column is not None else None
    feat_idx = [i for i in range(len(header)) if i != t_idx]
    X = np.empty((len(rows) - 1, len(feat_idx)))
    raw_targets: list[str] = []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(
                f"{path}: line {line_no}: expected {len(header)} cells, got {len(row)}"
            )
        for out_j, j in enumerate(feat_idx):
            cell = row[j].strip()
            try:
                X[line_no - 2, out_j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: line {line_no}: non-numeric cell {cell!r} "
                    f"in column {header[j]!r}"
                ) from None
        if t_idx is not None:
            raw_targets.append(row[t_idx].strip())
    y = None
    if t_idx is not None:
        try:
            y = np.array([float(t) for t in raw_targets])
        except ValueError:
            codes = {label: float(c) for c, label in enumerate(sorted(set(raw_targets)))}
            y = np.array([codes[t] for t in raw_targets])
    names = [header[j] for j in feat_idx]
    return X, y, names


def _write_csv(path: Path, X: np.ndarray):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j}" for j in range(X.shape[1])])
        for row in X:
            writer.writerow([repr(float(v)) for v in row])


def save_model(model: FittedModel, path, train_X_path=None) -> None:
    """Write a model JSON; training rows go inline unless a sidecar CSV
    path is given (stored relative to the model file)."""
    path = Path(path)
    doc = {
        "schema_version": _SCHEMA_VERSION,
        "kernel": kernel_spec_to_json(model.kernel),
        "alpha": [float(a) for a in model.alpha],
        "bias": float(model.bias),
    }
    if train_X_path is None:
        doc["train_X"] = [[float(v) for v in row] for row in model.train_X]
    else:
        sidecar = Path(train_X_path)
        if not sidecar.is_absolute():
            sidecar = path.parent / sidecar
        _write_csv(sidecar, model.train_X)
        doc["train_X"] = str(Path(train_X_path))
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path) -> FittedModel:
    """Read a model JSON written by save_model."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object at top level")
    version = doc.get("schema_version")
    if version != _SCHEMA_VERSION:
        raise SchemaError(
            f"{path}: schema_version {version!r} not supported (expected {_SCHEMA_VERSION})"
        )
    for field in ("kernel", "alpha", "bias", "train_X"):
        if field not in doc:
            raise SchemaError(f"{path}: missing required field {field!r}")
    kernel = kernel_spec_from_json(doc["kernel"])
    alpha = np.asarray(doc["alpha"], dtype=np.float64)
    train = doc["train_X"]
    if isinstance(train, str):
        csv_path = Path(train)
        if not csv_path.is_absolute():
            csv_path = path.parent / csv_path
        X, _, _ = load_table(csv_path)
    else:
        X = np.asarray(train, dtype=np.float64)
    return FittedModel(alpha, X, kernel, float(doc["bias"]))
