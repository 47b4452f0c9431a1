"""Pydantic models for API requests and responses.

These are the wire-level counterparts of the core domain types: scenario
descriptions, sweep specifications, point-evaluation requests, and the
result envelopes. Scenario validation is delegated to the flat-document
parser in the model module so file and API inputs share one rule set.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from .model import Scenario, scenario_from_mapping

Evaluator = Literal[
    "closed",
    "quadrature",
    "mc",
    "capacity-exact",
    "capacity-upper",
    "capacity-approx",
]

SweepAxis = Literal["snr_db", "x_db", "kappa", "kappa_split"]


class HopSpec(BaseModel):
    p_watts: float = 1.0
    n_watts: float = 1.0
    alpha: int = 1
    beta: Optional[float] = None
    snr_db: Optional[float] = None
    kappa: Optional[float] = None
    kappa_t: Optional[float] = None
    kappa_r: Optional[float] = None


class ScenarioSpec(BaseModel):
    protocol: Literal["af", "df"]
    mode: Optional[Literal["fixed", "variable"]] = None
    hops: list[HopSpec] = Field(..., min_length=1)

    def to_scenario(self) -> Scenario:
        doc: dict = {"protocol": self.protocol}
        if self.mode is not None:
            doc["mode"] = self.mode
        for i, hop in enumerate(self.hops, start=1):
            for field in ("p_watts", "n_watts", "alpha", "beta", "snr_db",
                          "kappa", "kappa_t", "kappa_r"):
                value = getattr(hop, field)
                if value is not None:
                    doc[f"hop{i}.{field}"] = value
        return scenario_from_mapping(doc)

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "ScenarioSpec":
        return cls(
            protocol=scenario.protocol.value,
            mode=scenario.mode.value if scenario.mode else None,
            hops=[
                HopSpec(p_watts=h.p, n_watts=h.n, alpha=h.alpha, beta=h.beta, kappa=h.kappa)
                for h in scenario.hops
            ],
        )


class OutageRequest(BaseModel):
    """Outage query: scenario, threshold (linear or dB), evaluator choice."""

    scenario: ScenarioSpec
    x_lin: Optional[float] = None
    x_db: Optional[float] = None
    evaluator: Literal["closed", "quadrature", "mc"] = "closed"
    mc_samples: int = Field(default=1_000_000, ge=1000)
    seed: int = 0


class OutageResponse(BaseModel):
    value: float
    x_lin: float
    evaluator: str
    saturated: bool
    precision_limited: bool = False
    std_error: Optional[float] = None
    ci95: Optional[tuple[float, float]] = None
    n_samples: Optional[int] = None


class CapacityRequest(BaseModel):
    scenario: ScenarioSpec
    kind: Literal["exact", "upper", "approx", "mc"] = "exact"
    prelog: float = 0.5
    mc_samples: int = Field(default=1_000_000, ge=1000)
    seed: int = 0


class CapacityResponse(BaseModel):
    value_bits: float
    kind: str
    prelog: float
    std_error: Optional[float] = None
    n_samples: Optional[int] = None


class CeilingRequest(BaseModel):
    protocol: Literal["af", "df"]
    kappa1: float = Field(..., ge=0.0)
    kappa2: float = Field(..., ge=0.0)
    prelog: float = 0.5


class CeilingResponse(BaseModel):
    protocol: str
    unbounded: bool
    sndr_ceiling: Optional[float] = None  # null when unbounded
    capacity_ceiling: Optional[float] = None
    prelog: float


class AllocationRequest(BaseModel):
    t_max: float
    prelog: float = 0.5
    cost_table_kappa: Optional[list[float]] = None  # identity cost when omitted
    cost_table_cost: Optional[list[float]] = None


class AllocationResponse(BaseModel):
    evm_per_chain: float
    kappa1: float
    kappa2: float
    af: CeilingResponse
    df: CeilingResponse


class NecessaryKappaRequest(BaseModel):
    """Target threshold (linear) or rate in bits/channel use, not both."""

    x_lin: Optional[float] = None
    rate: Optional[float] = None


class NecessaryKappaResponse(BaseModel):
    x_lin: float
    af_kappa_max: float
    df_kappa_max: float
    condition: str = "necessary"  # sufficiency holds only asymptotically in SNR


class SweepSpec(BaseModel):
    """One axis swept over a base scenario, evaluated by chosen evaluators.

    SNR sweeps rescale the fading power (beta), never the transmit power, so
    impairment levels stay physically constant along the axis.
    """

    axis: SweepAxis
    start: float
    stop: float
    steps: int = Field(..., ge=2)
    scenario: ScenarioSpec
    evaluators: list[Evaluator] = Field(..., min_length=1)
    x_lin: Optional[float] = None
    x_db: Optional[float] = None
    snr_offsets_db: Optional[list[float]] = None  # per-hop additive offsets, snr_db axis
    kappa_total: Optional[float] = None  # required for the kappa_split axis
    mc_samples: int = Field(default=1_000_000, ge=1000)
    seed: int = 0
    figure_id: Optional[str] = None


class SweepResponse(BaseModel):
    row_count: int
    csv: str


class FigureRequest(BaseModel):
    seed: int = 0


class FigureResponse(BaseModel):
    figure_id: str
    files: dict[str, str]  # filename -> content


class ValidateRequest(BaseModel):
    n_scenarios: int = Field(default=200, ge=1)
    seed: int = 0
    mc_samples: int = Field(default=1_000_000, ge=1000)


class ValidationCase(BaseModel):
    description: str
    closed: float
    quadrature: Optional[float] = None
    mc: Optional[float] = None
    mc_std_error: Optional[float] = None
    saturated: bool = False
    passed: bool


class ValidationReport(BaseModel):
    n_cases: int
    passed: bool
    max_abs_closed_vs_quadrature: float
    max_mc_distance_se: float  # worst |closed - mc| / SE over Wald-comparable cases
    n_saturated: int
    failures: list[ValidationCase]
