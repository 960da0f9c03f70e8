"""Pydantic request/response models for the HTTP surface.

Arrays travel as nested JSON lists; numpy conversion and numerical
validation happen in the handlers so the CLI (which skips HTTP) hits
the identical checks.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

Matrix = list[list[float]]
Vector = list[float]

Backend = Literal["auto", "stable", "newton"]
KernelKind = Literal["rbf", "laplacian_rbf", "cauchy", "categorical"]


class KernelFeature(BaseModel):
    kind: KernelKind
    bandwidth: float = 1.0


class KernelSpecDoc(BaseModel):
    features: list[KernelFeature]


class ModelDoc(BaseModel):
    """Inline model document; same schema as the model JSON files."""

    schema_version: int = 1
    kernel: KernelSpecDoc
    alpha: Vector
    bias: float = 0.0
    train_X: Matrix


class AttributionDoc(BaseModel):
    phi: Vector
    v_full: float
    v_empty: float
    method: str


class ExplainRequest(BaseModel):
    model: ModelDoc
    data: Matrix = Field(min_length=1)
    backend: Backend = "auto"
    normalized: bool = False


class ExplainResponse(BaseModel):
    attributions: list[AttributionDoc]


class MmdRequest(BaseModel):
    x: Matrix = Field(min_length=2)
    z: Matrix = Field(min_length=2)
    bandwidths: Union[Literal["median"], Vector] = "median"
    kind: KernelKind = "rbf"
    backend: Literal["stable", "newton"] = "stable"
    seed: int = 0


class HsicRequest(BaseModel):
    x: Matrix = Field(min_length=2)
    y: Optional[Matrix] = None
    z: Optional[Matrix] = None
    target_kernel: Literal["rbf", "categorical"] = "rbf"
    backend: Literal["stable", "newton"] = "stable"


class HsicResponse(BaseModel):
    x_attribution: AttributionDoc
    z_attribution: Optional[AttributionDoc] = None


class FitRequest(BaseModel):
    x: Matrix = Field(min_length=1)
    y: Vector = Field(min_length=1)
    kind: KernelKind = "rbf"
    bandwidths: Union[Literal["median"], Vector] = "median"
    bandwidth_scale: float = 1.0
    ridge: float = 1e-8


class GenLinearRequest(BaseModel):
    n: int
    d: int
    noise_sigma: float = 0.1
    seed: int = 0


class GenLinearResponse(BaseModel):
    x: Matrix
    y: Vector
    coefficients: Vector


class GenNonlinearRequest(BaseModel):
    task: Literal["poly5", "poly10", "sqexp"]
    n: int
    d: int
    seed: int = 0


class GenNonlinearResponse(BaseModel):
    x: Matrix
    y: Vector
    active: list[int]


class GenMmdPairRequest(BaseModel):
    n: int
    d: int = 20
    dof: float = 3.0
    seed: int = 0


class GenMmdPairResponse(BaseModel):
    x: Matrix
    z: Matrix


class HealthResponse(BaseModel):
    status: str
    version: str
