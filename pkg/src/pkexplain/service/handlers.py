"""Request handlers shared by the HTTP routes and the CLI.

Each handler takes a schema object and returns a schema object; the
FastAPI layer only maps exceptions to status codes and the CLI only
maps them to exit codes, so both frontends run identical logic.
"""

from __future__ import annotations

import numpy as np

from .. import __version__
from ..attribution import FittedModel, explain_instance, normalized_attribution
from ..datagen import gen_linear, gen_mmd_pair, gen_nonlinear
from ..errors import InputError
from ..hsic import HsicInput, explain_hsic, explain_hsic_bivariate, target_gram
from ..kernels import (
    ProductKernelSpec,
    kernel_spec_from_json,
    kernel_spec_to_json,
    median_heuristic_bandwidths,
)
from ..mmd import TwoSample, explain_mmd
from ..model_io import fit_krr
from . import schemas


def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)


def _attr_doc(attr) -> schemas.AttributionDoc:
    return schemas.AttributionDoc(**attr.to_json_dict())


def model_from_doc(doc: schemas.ModelDoc) -> FittedModel:
    kernel = kernel_spec_from_json(doc.kernel.model_dump())
    return FittedModel(
        np.asarray(doc.alpha, dtype=np.float64),
        np.asarray(doc.train_X, dtype=np.float64),
        kernel,
        float(doc.bias),
    )


def model_to_doc(model: FittedModel) -> schemas.ModelDoc:
    return schemas.ModelDoc(
        schema_version=1,
        kernel=schemas.KernelSpecDoc(**kernel_spec_to_json(model.kernel)),
        alpha=[float(a) for a in model.alpha],
        bias=float(model.bias),
        train_X=[[float(v) for v in row] for row in model.train_X],
    )


def explain_rows(
    model: FittedModel, rows, backend: str = "auto", normalized: bool = False
) -> list[schemas.AttributionDoc]:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise InputError(f"data must be a 2-D array of rows, got shape {rows.shape}")
    docs = []
    for x in rows:
        attr = explain_instance(model, x, backend=backend)
        if normalized:
            attr = normalized_attribution(attr, model.n_train)
        docs.append(_attr_doc(attr))
    return docs


def explain(req: schemas.ExplainRequest) -> schemas.ExplainResponse:
    model = model_from_doc(req.model)
    return schemas.ExplainResponse(
        attributions=explain_rows(model, req.data, req.backend, req.normalized)
    )


def resolve_bandwidths(bandwidths, X: np.ndarray, scale: float = 1.0, seed: int = 0):
    """'median' -> per-feature heuristic on X; otherwise take the list."""
    if isinstance(bandwidths, str):
        bws = median_heuristic_bandwidths(X, seed=seed)
    else:
        bws = np.asarray(bandwidths, dtype=np.float64)
        if bws.shape != (X.shape[1],):
            raise InputError(
                f"expected {X.shape[1]} bandwidths, got shape {bws.shape}"
            )
    return bws * scale


def mmd(req: schemas.MmdRequest) -> schemas.AttributionDoc:
    X = np.asarray(req.x, dtype=np.float64)
    Z = np.asarray(req.z, dtype=np.float64)
    if X.ndim != 2 or Z.ndim != 2 or X.shape[1] != Z.shape[1]:
        raise InputError(
            f"x and z must be 2-D with matching columns, got {X.shape} and {Z.shape}"
        )
    bws = resolve_bandwidths(req.bandwidths, np.vstack([X, Z]), seed=req.seed)
    spec = ProductKernelSpec.from_bandwidths(req.kind, bws)
    return _attr_doc(explain_mmd(TwoSample(X, Z, spec), backend=req.backend))


def hsic(req: schemas.HsicRequest) -> schemas.HsicResponse:
    X = np.asarray(req.x, dtype=np.float64)
    if (req.y is None) == (req.z is None):
        raise InputError("provide exactly one of y (target) or z (second block)")
    if req.y is not None:
        Y = np.asarray(req.y, dtype=np.float64)
        spec = ProductKernelSpec.from_bandwidths(
            "rbf", median_heuristic_bandwidths(X)
        )
        inp = HsicInput(X, spec, target_gram(Y, req.target_kernel))
        return schemas.HsicResponse(
            x_attribution=_attr_doc(explain_hsic(inp, backend=req.backend))
        )
    Z = np.asarray(req.z, dtype=np.float64)
    kx = ProductKernelSpec.from_bandwidths("rbf", median_heuristic_bandwidths(X))
    kz = ProductKernelSpec.from_bandwidths("rbf", median_heuristic_bandwidths(Z))
    ax, az = explain_hsic_bivariate(X, Z, kx, kz, backend=req.backend)
    return schemas.HsicResponse(
        x_attribution=_attr_doc(ax), z_attribution=_attr_doc(az)
    )


def fit(req: schemas.FitRequest) -> schemas.ModelDoc:
    X = np.asarray(req.x, dtype=np.float64)
    y = np.asarray(req.y, dtype=np.float64)
    if X.ndim != 2:
        raise InputError(f"x must be a 2-D array of rows, got shape {X.shape}")
    bws = resolve_bandwidths(req.bandwidths, X, scale=req.bandwidth_scale)
    spec = ProductKernelSpec.from_bandwidths(req.kind, bws)
    return model_to_doc(fit_krr(X, y, spec, ridge=req.ridge))


def datagen_linear(req: schemas.GenLinearRequest) -> schemas.GenLinearResponse:
    X, y, w = gen_linear(req.n, req.d, req.noise_sigma, req.seed)
    return schemas.GenLinearResponse(
        x=X.tolist(), y=y.tolist(), coefficients=w.tolist()
    )


def datagen_nonlinear(req: schemas.GenNonlinearRequest) -> schemas.GenNonlinearResponse:
    X, y, active = gen_nonlinear(req.task, req.n, req.d, req.seed)
    return schemas.GenNonlinearResponse(
        x=X.tolist(), y=y.tolist(), active=[int(j) for j in active]
    )


def datagen_mmd_pair(req: schemas.GenMmdPairRequest) -> schemas.GenMmdPairResponse:
    X, Z = gen_mmd_pair(req.n, req.d, req.dof, req.seed)
    return schemas.GenMmdPairResponse(x=X.tolist(), z=Z.tolist())
