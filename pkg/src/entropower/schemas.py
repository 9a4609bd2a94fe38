"""Pydantic request/response models for the HTTP service.

Responses never carry non-finite floats: divergent entropy powers are
encoded as ``value = null`` plus ``divergent = true`` and the violated
condition in ``caveat``.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

Family = Literal["gaussian", "student-t", "student-r", "laplace", "uniform",
                 "grid"]
Setting = Literal["cc", "dd", "dc", "continuous_continuous",
                  "discrete_discrete", "discrete_continuous"]


class GridSpec(BaseModel):
    """Inline sampled-grid payload (row-major samples)."""

    origin: list[float]
    spacing: list[float]
    re: list[float]
    im: list[float] = Field(default_factory=list)
    shape: list[int] | None = None


class StateSpec(BaseModel):
    family: Family
    d: int = 1
    nu: float | None = None
    covariance: float | list[float] | list[list[float]] | None = None
    scale: float | list[list[float]] | None = None
    grid: GridSpec | None = None


class DiscreteSpec(BaseModel):
    kind: Literal["kronecker", "flat", "random", "explicit"] = "explicit"
    n: int | None = None
    position: int = 0
    seed: int = 0
    re: list[float] | None = None
    im: list[float] | None = None


class ClassifyRequest(BaseModel):
    alpha: float
    beta: float
    tol: float = 1e-12


class ClassifyResponse(BaseModel):
    region: str
    bound: float | None
    bound_exists: bool
    conjugate_alpha: float | None
    message: str


class BoundRequest(BaseModel):
    kind: Literal["general", "B", "conjugated", "maassen"] = "general"
    alpha: float | None = None
    beta: float | None = None
    setting: Setting | None = None
    n: int | None = None
    p: float | None = None


class BoundResponse(BaseModel):
    value: float | None
    description: str


class EntropyPowerModel(BaseModel):
    value: float | None
    divergent: bool
    method: str
    abs_error_estimate: float
    caveat: str | None


class NPowerRequest(BaseModel):
    state: StateSpec
    lam: float | str
    side: Literal["state", "conjugate"] = "state"
    convention: Literal["density", "amplitude"] = "density"
    method: Literal["auto", "quadrature"] = "auto"


class PairModel(BaseModel):
    alpha: float
    beta: float


class ProductReportModel(BaseModel):
    pair: PairModel
    n_alpha: EntropyPowerModel
    n_beta: EntropyPowerModel
    product: float
    bound: float | None
    satisfied: str
    margin: float | None
    tolerance: float
    region: str
    setting: str


class ProductRequest(BaseModel):
    setting: Setting = "cc"
    alpha: float
    beta: float
    state: StateSpec | None = None
    discrete: DiscreteSpec | None = None
    convention: Literal["density", "amplitude"] = "density"
    tol: float | None = None


class SweepPointModel(BaseModel):
    param: float
    n_alpha: float | None
    n_beta: float | None
    product: float | None
    bound: float | None
    region: str
    note: str | None


class SweepRequest(BaseModel):
    kind: Literal["lambda", "alpha_diagonal", "nu"]
    state: StateSpec | None = None
    alpha: float | None = None
    beta: float | None = None
    d: int = 1
    grid: list[float] | None = None
    convention: Literal["density", "amplitude"] = "density"


class SweepResponse(BaseModel):
    parameter: str
    grid: list[float]
    metadata: dict
    points: list[SweepPointModel]
    csv: str


class SampleSpec(BaseModel):
    n: int = 100
    on_c: int = 20
    in_s: int = 20
    seed: int = 0


class VerifyRequest(BaseModel):
    setting: Literal["cc", "dd"] = "cc"
    families: list[StateSpec] = Field(default_factory=list)
    discretes: list[DiscreteSpec] = Field(default_factory=list)
    pairs: list[PairModel] | None = None
    sample: SampleSpec | None = None
    tol: float | None = None
    prefilter: bool = True


class FamilyFilterModel(BaseModel):
    family: str
    used: int
    skipped: int


class VerifySummaryModel(BaseModel):
    total: int
    holds: int
    violated: int
    no_bound: int
    filtered: list[FamilyFilterModel]


class VerifyResponse(BaseModel):
    reports: list[ProductReportModel]
    summary: VerifySummaryModel


class CounterexampleRequest(BaseModel):
    alpha: float
    beta: float
    epsilon: float
    d: int = 1


class CounterexampleResponse(BaseModel):
    nu: float
    nu_star: float
    report: ProductReportModel


class HealthResponse(BaseModel):
    status: str
    version: str
