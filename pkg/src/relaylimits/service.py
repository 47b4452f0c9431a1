"""HTTP service exposing the relay-limits computations.

Endpoints wrap the core package one-to-one: point evaluations (outage,
capacity), ceilings and design rules, sweeps with CSV payloads, figure
recipes, and the randomized validation suite. Domain/usage errors map to
400, numerical (quadrature) failures to 500 with the achieved estimate.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .asymptotics import (
    CostModel,
    Unbounded,
    ceiling_report,
    evm_allocation,
    kappa_necessary,
    rate_to_threshold,
)
from .capacity import (
    capacity_af_approx,
    capacity_af_exact,
    capacity_af_upper,
    capacity_df_upper_closed,
    capacity_df_upper_exact,
)
from .model import Protocol, Scenario, db_to_linear
from .montecarlo import estimate_capacity, estimate_outage
from .outage import (
    is_precision_limited,
    outage_af_closed,
    outage_af_quadrature,
    outage_df_closed,
    outage_df_general,
)
from .quad import QuadratureError
from .schemas import (
    AllocationRequest,
    AllocationResponse,
    CapacityRequest,
    CapacityResponse,
    CeilingRequest,
    CeilingResponse,
    FigureRequest,
    FigureResponse,
    NecessaryKappaRequest,
    NecessaryKappaResponse,
    OutageRequest,
    OutageResponse,
    SweepResponse,
    SweepSpec,
    ValidateRequest,
    ValidationReport,
)
from .specfun import gamma_sf_int
from .sweeps import rows_to_csv, run_figure_recipe, run_sweep, run_validation

app = FastAPI(title="relaylimits", version=__version__)


@app.exception_handler(ValueError)
async def _domain_error(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(QuadratureError)
async def _numerical_error(request: Request, exc: QuadratureError) -> JSONResponse:
    return JSONResponse(
        status_code=500,
        content={
            "detail": str(exc),
            "kind": "numerical",
            "estimate": exc.estimate,
            "error_estimate": exc.error_estimate,
        },
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


def _resolve_x(x_lin: float | None, x_db: float | None) -> float:
    if (x_lin is None) == (x_db is None):
        raise ValueError("give exactly one of x_lin / x_db")
    x = x_lin if x_lin is not None else db_to_linear(x_db)
    if x < 0.0:
        raise ValueError(f"threshold must be >= 0, got {x}")
    return x


def _limiter(scenario: Scenario) -> float:
    return scenario.d if scenario.protocol is Protocol.AF else scenario.delta


@app.post("/outage", response_model=OutageResponse)
def outage(request: OutageRequest) -> OutageResponse:
    scenario = request.scenario.to_scenario()
    x = _resolve_x(request.x_lin, request.x_db)
    limiter = _limiter(scenario)
    saturated = limiter > 0.0 and x >= 1.0 / limiter
    if request.evaluator == "mc":
        est = estimate_outage(scenario, x, request.mc_samples, request.seed)
        return OutageResponse(
            value=est.value,
            x_lin=x,
            evaluator="mc",
            saturated=saturated,
            std_error=est.std_error,
            ci95=est.ci95,
            n_samples=est.n,
        )
    if scenario.protocol is Protocol.AF:
        if request.evaluator == "closed":
            value = outage_af_closed(scenario, x)
        else:
            value = outage_af_quadrature(scenario, x)
    else:
        if request.evaluator == "closed":
            value = outage_df_closed(scenario, x)
        else:
            cdfs = [
                (lambda t, a=h.alpha, b=h.beta: 1.0 - gamma_sf_int(t, a, b))
                for h in scenario.hops
            ]
            value = outage_df_general(cdfs, scenario.hops, x)
    return OutageResponse(
        value=value,
        x_lin=x,
        evaluator=request.evaluator,
        saturated=saturated,
        precision_limited=is_precision_limited(value),
    )


@app.post("/capacity", response_model=CapacityResponse)
def capacity(request: CapacityRequest) -> CapacityResponse:
    scenario = request.scenario.to_scenario()
    is_af = scenario.protocol is Protocol.AF
    if request.kind == "mc":
        est = estimate_capacity(scenario, request.mc_samples, request.seed, prelog=request.prelog)
        return CapacityResponse(
            value_bits=est.value,
            kind="mc",
            prelog=request.prelog,
            std_error=est.std_error,
            n_samples=est.n,
        )
    if request.kind == "exact":
        result = (
            capacity_af_exact(scenario, prelog=request.prelog)
            if is_af
            else capacity_df_upper_exact(scenario, prelog=request.prelog)
        )
    elif request.kind == "upper":
        result = (
            capacity_af_upper(scenario, prelog=request.prelog)
            if is_af
            else capacity_df_upper_closed(scenario, prelog=request.prelog)
        )
    else:
        if not is_af:
            raise ValueError("the approximation evaluator applies to AF scenarios")
        result = capacity_af_approx(scenario, prelog=request.prelog)
    return CapacityResponse(value_bits=result.value, kind=result.kind, prelog=result.prelog)


def _ceiling_response(protocol: Protocol, kappa1: float, kappa2: float, prelog: float) -> CeilingResponse:
    report = ceiling_report(protocol, kappa1, kappa2, prelog)
    unbounded = isinstance(report.sndr_ceiling, Unbounded)
    return CeilingResponse(
        protocol=report.protocol.value,
        unbounded=unbounded,
        sndr_ceiling=None if unbounded else report.sndr_ceiling,
        capacity_ceiling=None if unbounded else report.capacity_ceiling,
        prelog=prelog,
    )


@app.post("/ceilings", response_model=CeilingResponse)
def ceilings(request: CeilingRequest) -> CeilingResponse:
    return _ceiling_response(Protocol(request.protocol), request.kappa1, request.kappa2,
                             request.prelog)


@app.post("/design/allocation", response_model=AllocationResponse)
def allocation(request: AllocationRequest) -> AllocationResponse:
    if (request.cost_table_kappa is None) != (request.cost_table_cost is None):
        raise ValueError("cost table needs both cost_table_kappa and cost_table_cost")
    cost = None
    if request.cost_table_kappa is not None:
        cost = CostModel.from_table(request.cost_table_kappa, request.cost_table_cost)
    result = evm_allocation(request.t_max, cost, prelog=request.prelog)
    return AllocationResponse(
        evm_per_chain=result.evm_per_chain,
        kappa1=result.kappa1,
        kappa2=result.kappa2,
        af=_ceiling_response(Protocol.AF, result.kappa1, result.kappa2, request.prelog),
        df=_ceiling_response(Protocol.DF, result.kappa1, result.kappa2, request.prelog),
    )


@app.post("/design/necessary-kappa", response_model=NecessaryKappaResponse)
def necessary_kappa(request: NecessaryKappaRequest) -> NecessaryKappaResponse:
    if (request.x_lin is None) == (request.rate is None):
        raise ValueError("give exactly one of x_lin / rate")
    x = request.x_lin if request.x_lin is not None else rate_to_threshold(request.rate)
    return NecessaryKappaResponse(
        x_lin=x,
        af_kappa_max=kappa_necessary(Protocol.AF, x),
        df_kappa_max=kappa_necessary(Protocol.DF, x),
    )


@app.post("/sweep", response_model=SweepResponse)
def sweep(spec: SweepSpec) -> SweepResponse:
    rows = run_sweep(spec)
    return SweepResponse(row_count=len(rows), csv=rows_to_csv(rows))


@app.post("/figures/{figure_id}", response_model=FigureResponse)
def figure(figure_id: str, request: FigureRequest) -> FigureResponse:
    files = run_figure_recipe(figure_id, seed=request.seed)
    return FigureResponse(figure_id=figure_id, files=files)


@app.post("/validate", response_model=ValidationReport)
def validate(request: ValidateRequest) -> ValidationReport:
    return run_validation(request.n_scenarios, request.seed, request.mc_samples)
