"""FastAPI service wrapping the core package.

Domain and precondition violations map to HTTP 422, numerical failures to
HTTP 500; every numeric in a response is finite (divergences are reported
as ``value = null`` with a caveat).
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .entropy import (
    EntropyPower, partner_power, renyi_power_continuous,
    renyi_power_quadrature,
)
from .errors import DomainError, NumericalError
from .regions import (
    BoundCase, IndexPair, Region, bound_B, bound_conjugated, bound_general,
    classify, conjugate_index, maassen_bound,
)
from .schemas import (
    BoundRequest, BoundResponse, ClassifyRequest, ClassifyResponse,
    CounterexampleRequest, CounterexampleResponse, DiscreteSpec,
    EntropyPowerModel, FamilyFilterModel, HealthResponse, NPowerRequest,
    PairModel, ProductReportModel, ProductRequest, SampleSpec,
    SweepPointModel, SweepRequest, SweepResponse, StateSpec, VerifyRequest,
    VerifyResponse, VerifySummaryModel,
)
from .states import (
    DiscreteState, ExponentialLaplace, Gaussian, SampledGrid, StudentR,
    StudentT, UniformBall, flat_state, kronecker_state,
    random_discrete_state, rescale,
)
from .verify import (
    ProductReport, counterexample, format_float, pair_computable,
    sample_pairs_in_d, sweep, uncertainty_product, verify_region,
)

_SETTING_ALIASES = {
    "cc": "continuous_continuous", "dd": "discrete_discrete",
    "dc": "discrete_continuous",
    "continuous_continuous": "continuous_continuous",
    "discrete_discrete": "discrete_discrete",
    "discrete_continuous": "discrete_continuous",
}

app = FastAPI(title="entropower", version=__version__)


@app.exception_handler(DomainError)
async def _domain_error(request: Request, exc: DomainError) -> JSONResponse:
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(NumericalError)
async def _numerical_error(request: Request,
                           exc: NumericalError) -> JSONResponse:
    return JSONResponse(status_code=500, content={"detail": str(exc)})


# ---------------------------------------------------------------------------
# payload construction
# ---------------------------------------------------------------------------


def build_state(spec: StateSpec):
    """Materialize a continuous state from its wire description."""
    if spec.family == "gaussian":
        cov = 1.0 if spec.covariance is None else spec.covariance
        state = Gaussian(spec.d, cov)
    elif spec.family == "student-t":
        if spec.nu is None:
            raise DomainError("student-t requires nu")
        state = StudentT(spec.d, spec.nu)
    elif spec.family == "student-r":
        if spec.nu is None:
            raise DomainError("student-r requires nu")
        state = StudentR(spec.d, spec.nu)
    elif spec.family == "laplace":
        if spec.d != 1:
            raise DomainError("laplace family is one-dimensional")
        state = ExponentialLaplace()
    elif spec.family == "uniform":
        state = UniformBall(spec.d)
    else:
        if spec.grid is None:
            raise DomainError("grid family requires the grid payload")
        g = spec.grid
        im = g.im if g.im else [0.0] * len(g.re)
        if len(im) != len(g.re):
            raise DomainError("grid re/im lengths differ")
        samples = np.asarray(g.re, dtype=float) + 1j * np.asarray(im)
        shape = tuple(g.shape) if g.shape else (len(g.re),)
        state = SampledGrid(spec.d, tuple(g.origin), tuple(g.spacing),
                            samples.reshape(shape))
    if spec.scale is not None:
        state = rescale(state, spec.scale)
    return state


def build_discrete(spec: DiscreteSpec) -> DiscreteState:
    if spec.kind == "kronecker":
        if spec.n is None:
            raise DomainError("kronecker requires n")
        return kronecker_state(spec.n, spec.position)
    if spec.kind == "flat":
        if spec.n is None:
            raise DomainError("flat requires n")
        return flat_state(spec.n)
    if spec.kind == "random":
        if spec.n is None:
            raise DomainError("random requires n")
        return random_discrete_state(spec.n, spec.seed)
    if spec.re is None:
        raise DomainError("explicit discrete state requires amplitudes")
    im = spec.im if spec.im is not None else [0.0] * len(spec.re)
    if len(im) != len(spec.re):
        raise DomainError("discrete re/im lengths differ")
    amp = np.asarray(spec.re, dtype=float) + 1j * np.asarray(im)
    return DiscreteState(amp)


def _setting_of(name: str) -> str:
    return _SETTING_ALIASES[name]


def power_model(power: EntropyPower) -> EntropyPowerModel:
    return EntropyPowerModel(
        value=None if power.is_divergent else power.value,
        divergent=power.is_divergent,
        method=power.method,
        abs_error_estimate=power.abs_error_estimate,
        caveat=power.caveat,
    )


def report_model(report: ProductReport) -> ProductReportModel:
    return ProductReportModel(
        pair=PairModel(alpha=report.pair.alpha, beta=report.pair.beta),
        n_alpha=power_model(report.n_alpha),
        n_beta=power_model(report.n_beta),
        product=report.product,
        bound=report.bound,
        satisfied=report.satisfied,
        margin=report.margin,
        tolerance=report.tolerance,
        region=report.region,
        setting=report.setting,
    )


# ---------------------------------------------------------------------------
# endpoints
# ---------------------------------------------------------------------------


@app.get("/health", response_model=HealthResponse)
async def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/classify", response_model=ClassifyResponse)
async def classify_endpoint(req: ClassifyRequest) -> ClassifyResponse:
    pair = IndexPair(req.alpha, req.beta)
    region = classify(pair, req.tol)
    bound = bound_general(pair)
    conj = conjugate_index(req.alpha) if req.alpha >= 0.5 else None
    if conj is not None and math.isinf(conj):
        conj = None
    if region is Region.D0:
        message = "no uncertainty bound exists in D0"
    else:
        message = f"constant lower bound {format_float(bound)}"
    return ClassifyResponse(region=region.value, bound=bound,
                            bound_exists=bound is not None,
                            conjugate_alpha=conj, message=message)


@app.post("/bound", response_model=BoundResponse)
async def bound_endpoint(req: BoundRequest) -> BoundResponse:
    if req.kind == "B":
        if req.alpha is None:
            raise DomainError("B bound requires alpha")
        return BoundResponse(value=bound_B(req.alpha),
                             description="conjugated-curve bound B(alpha)")
    if req.kind == "maassen":
        if req.n is None:
            raise DomainError("maassen bound requires n")
        return BoundResponse(value=maassen_bound(req.n),
                             description=f"(2n/(n+1))^2 at n = {req.n}")
    if req.kind == "conjugated":
        if req.setting is None:
            raise DomainError("conjugated bound requires the setting")
        case = BoundCase(_setting_of(req.setting), req.n)
        p = 2.0 if req.p is None else req.p
        return BoundResponse(value=bound_conjugated(case, p),
                             description=f"norm-inequality constant at p = {p}")
    if req.alpha is None or req.beta is None:
        raise DomainError("general bound requires alpha and beta")
    pair = IndexPair(req.alpha, req.beta)
    value = bound_general(pair)
    if value is None:
        return BoundResponse(value=None,
                             description="no bound exists in D0")
    return BoundResponse(value=value,
                         description=f"region {classify(pair).value}")


@app.post("/npower", response_model=EntropyPowerModel)
async def npower_endpoint(req: NPowerRequest) -> EntropyPowerModel:
    state = build_state(req.state)
    try:
        lam = float(req.lam)
    except ValueError:
        raise DomainError(f"cannot parse index {req.lam!r}") from None
    if req.method == "quadrature":
        if req.side != "state":
            raise DomainError("quadrature method applies to the state side")
        return power_model(renyi_power_quadrature(state, lam))
    if req.side == "conjugate":
        return power_model(partner_power(state, lam, req.convention))
    return power_model(renyi_power_continuous(state, lam, req.convention))


@app.post("/product", response_model=ProductReportModel)
async def product_endpoint(req: ProductRequest) -> ProductReportModel:
    setting = _setting_of(req.setting)
    pair = IndexPair(req.alpha, req.beta)
    if setting == "continuous_continuous":
        if req.state is None:
            raise DomainError("continuous product requires the state spec")
        state = build_state(req.state)
        case = BoundCase(setting)
    else:
        if req.discrete is None:
            raise DomainError(f"{setting} requires the discrete spec")
        state = build_discrete(req.discrete)
        case = BoundCase(setting, state.n) if setting == "discrete_discrete" \
            else BoundCase(setting)
    report = uncertainty_product(state, pair, case,
                                 convention=req.convention, tol=req.tol)
    return report_model(report)


@app.post("/sweep", response_model=SweepResponse)
async def sweep_endpoint(req: SweepRequest) -> SweepResponse:
    state = build_state(req.state) if req.state is not None else None
    pair = None
    if req.alpha is not None and req.beta is not None:
        pair = IndexPair(req.alpha, req.beta)
    result = sweep(req.kind, state=state, pair=pair, d=req.d,
                   grid=req.grid, convention=req.convention)
    points = [SweepPointModel(param=p.param, n_alpha=p.n_alpha,
                              n_beta=p.n_beta, product=p.product,
                              bound=p.bound, region=p.region, note=p.note)
              for p in result.points]
    return SweepResponse(parameter=result.parameter, grid=list(result.grid),
                         metadata=result.metadata, points=points,
                         csv=result.csv_text())


@app.post("/verify", response_model=VerifyResponse)
async def verify_endpoint(req: VerifyRequest) -> VerifyResponse:
    if req.pairs is not None:
        pairs = [IndexPair(p.alpha, p.beta) for p in req.pairs]
    else:
        sample = req.sample if req.sample is not None else SampleSpec()
        pairs = sample_pairs_in_d(sample.n, sample.on_c, sample.in_s,
                                  sample.seed)
    reports: list[ProductReport] = []
    filtered: list[FamilyFilterModel] = []
    if req.setting == "dd":
        if not req.discretes:
            raise DomainError("discrete verification requires discrete specs")
        for spec in req.discretes:
            state = build_discrete(spec)
            case = BoundCase("discrete_discrete", state.n)
            reports.extend(verify_region([state], pairs, case, req.tol))
            filtered.append(FamilyFilterModel(
                family=f"discrete(n={state.n})", used=len(pairs), skipped=0))
    else:
        if not req.families:
            raise DomainError("continuous verification requires family specs")
        for spec in req.families:
            state = build_state(spec)
            usable = [p for p in pairs if pair_computable(state, p)] \
                if req.prefilter else pairs
            reports.extend(verify_region([state], usable,
                                         BoundCase("continuous_continuous"),
                                         req.tol))
            filtered.append(FamilyFilterModel(
                family=type(state).__name__, used=len(usable),
                skipped=len(pairs) - len(usable)))
    counts = {"holds": 0, "violated": 0, "no-bound": 0}
    for report in reports:
        counts[report.satisfied] += 1
    summary = VerifySummaryModel(total=len(reports), holds=counts["holds"],
                                 violated=counts["violated"],
                                 no_bound=counts["no-bound"],
                                 filtered=filtered)
    return VerifyResponse(reports=[report_model(r) for r in reports],
                          summary=summary)


@app.post("/counterexample", response_model=CounterexampleResponse)
async def counterexample_endpoint(
        req: CounterexampleRequest) -> CounterexampleResponse:
    pair = IndexPair(req.alpha, req.beta)
    nu, report = counterexample(pair, req.epsilon, req.d)
    nu_star = req.d * (req.beta - 1.0) / req.beta if req.beta > 1.0 else 0.0
    return CounterexampleResponse(nu=nu, nu_star=nu_star,
                                  report=report_model(report))
