"""Domain model of the impaired dual-hop link.

Hardware profiles (per-transceiver error vector magnitudes), hops, scenarios,
relay amplification gains, SNDR-denominator coefficient extraction, and
instantaneous end-to-end SNDR evaluation. Everything here is linear-scale;
dB conversion happens only at the serialization/CLI boundary.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .specfun import FACTORIAL_CAP

__all__ = [
    "GainMode",
    "Protocol",
    "HardwareProfile",
    "Hop",
    "Scenario",
    "AfCoefficients",
    "ScenarioFormatError",
    "aggregate_kappa",
    "af_gain",
    "af_coefficients",
    "instantaneous_sndr",
    "beta_for_target_snr",
    "db_to_linear",
    "linear_to_db",
    "scenario_from_mapping",
    "scenario_to_mapping",
    "load_scenario",
]


class Protocol(str, Enum):
    AF = "af"
    DF = "df"


class GainMode(str, Enum):
    FIXED = "fixed"
    VARIABLE = "variable"


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0.0:
        raise ValueError(f"dB conversion requires a positive value, got {value}")
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class HardwareProfile:
    """Transmit/receive EVM pair of one hop's transceiver chain."""

    kappa_t: float
    kappa_r: float

    def __post_init__(self):
        if self.kappa_t < 0.0 or self.kappa_r < 0.0:
            raise ValueError(f"EVMs must be >= 0, got ({self.kappa_t}, {self.kappa_r})")

    @property
    def kappa(self) -> float:
        return aggregate_kappa(self)


def aggregate_kappa(profile: HardwareProfile) -> float:
    """Aggregate impairment level sqrt(kappa_t^2 + kappa_r^2) of one hop."""
    return math.hypot(profile.kappa_t, profile.kappa_r)


@dataclass(frozen=True)
class Hop:
    """One hop: transmit power, receiver noise power, fading shape/scale, EVM.

    The channel gain is Gamma(alpha, beta) distributed (Nakagami-m fading in
    power units); average fading power alpha*beta, average SNR P*alpha*beta/N.
    """

    p: float  # transmit power, watts
    n: float  # receiver noise power, watts
    alpha: int  # integer fading shape
    beta: float  # fading scale, power units
    kappa: float = 0.0  # aggregate EVM

    def __post_init__(self):
        if self.p <= 0.0:
            raise ValueError(f"hop power must be > 0, got {self.p}")
        if self.n <= 0.0:
            raise ValueError(f"hop noise power must be > 0, got {self.n}")
        if int(self.alpha) != self.alpha or self.alpha < 1:
            raise ValueError(f"fading shape must be an integer >= 1, got {self.alpha}")
        if self.alpha > FACTORIAL_CAP:
            raise ValueError(f"fading shape {self.alpha} above supported cap {FACTORIAL_CAP}")
        if self.beta <= 0.0:
            raise ValueError(f"fading scale must be > 0, got {self.beta}")
        if self.kappa < 0.0:
            raise ValueError(f"aggregate EVM must be >= 0, got {self.kappa}")

    @property
    def avg_fading_power(self) -> float:
        return self.alpha * self.beta

    @property
    def avg_snr(self) -> float:
        return self.p * self.alpha * self.beta / self.n

    def with_snr(self, snr_linear: float) -> "Hop":
        """Same hop rescaled to the target average SNR by changing beta."""
        return replace(self, beta=beta_for_target_snr(self, snr_linear))


def beta_for_target_snr(hop: Hop, target_snr: float) -> float:
    """Fading scale giving exactly target_snr with P, N, alpha held fixed."""
    if target_snr <= 0.0:
        raise ValueError(f"target SNR must be > 0, got {target_snr}")
    return hop.n * target_snr / (hop.p * hop.alpha)


@dataclass(frozen=True)
class Scenario:
    """Relay link: ordered hops plus protocol (AF requires exactly 2 hops).

    `mode` is the gain mode attached by scenario files for AF links; every
    operation also accepts an explicit mode that takes precedence.
    """

    hops: tuple[Hop, ...]
    protocol: Protocol
    mode: GainMode | None = None

    def __post_init__(self):
        object.__setattr__(self, "hops", tuple(self.hops))
        if len(self.hops) < 2:
            raise ValueError("scenario needs at least 2 hops")
        if self.protocol is Protocol.AF and len(self.hops) != 2:
            raise ValueError(f"AF scenarios take exactly 2 hops, got {len(self.hops)}")

    @property
    def kappas(self) -> tuple[float, ...]:
        return tuple(h.kappa for h in self.hops)

    @property
    def d(self) -> float:
        """AF distortion constant k1^2 + k2^2 + k1^2*k2^2."""
        if len(self.hops) != 2:
            raise ValueError("d is defined for two-hop scenarios only")
        k1sq = self.hops[0].kappa ** 2
        k2sq = self.hops[1].kappa ** 2
        return k1sq + k2sq + k1sq * k2sq

    @property
    def delta(self) -> float:
        """DF distortion constant max_i kappa_i^2."""
        return max(h.kappa**2 for h in self.hops)

    def resolve_mode(self, mode: GainMode | None) -> GainMode:
        resolved = mode if mode is not None else self.mode
        if resolved is None:
            raise ValueError("AF operation needs a gain mode (fixed or variable)")
        return GainMode(resolved)

    def with_snrs(self, snrs_linear: Sequence[float]) -> "Scenario":
        if len(snrs_linear) != len(self.hops):
            raise ValueError("one SNR per hop required")
        return replace(self, hops=tuple(h.with_snr(s) for h, s in zip(self.hops, snrs_linear)))

    def with_kappas(self, kappas: Sequence[float]) -> "Scenario":
        if len(kappas) != len(self.hops):
            raise ValueError("one kappa per hop required")
        return replace(self, hops=tuple(replace(h, kappa=k) for h, k in zip(self.hops, kappas)))

    def scaled_snr(self, factor: float) -> "Scenario":
        """All hops' beta multiplied by factor (fading-power SNR scaling)."""
        return replace(self, hops=tuple(replace(h, beta=h.beta * factor) for h in self.hops))


@dataclass(frozen=True)
class AfCoefficients:
    """The (b1, b2, c, d) tuple parameterizing every AF formula."""

    b1: float
    b2: float
    c: float
    d: float

    def __post_init__(self):
        for name in ("b1", "b2", "c", "d"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"coefficient {name} must be finite and >= 0, got {v}")


def af_gain(scenario: Scenario, mode: GainMode | None = None, rho1: float | None = None) -> float:
    """Relay amplification factor satisfying the relay power constraint.

    Fixed gain uses the average first-hop fading power; variable gain uses
    the instantaneous first-hop gain rho1 (required in that mode).
    """
    if scenario.protocol is not Protocol.AF:
        raise ValueError("relay gain is an AF-protocol quantity")
    mode = scenario.resolve_mode(mode)
    hop1, hop2 = scenario.hops
    if mode is GainMode.FIXED:
        effective_rho1 = hop1.avg_fading_power
    else:
        if rho1 is None:
            raise ValueError("variable gain mode requires the instantaneous gain rho1")
        effective_rho1 = rho1
    return math.sqrt(hop2.p / (hop1.p * effective_rho1 * (1.0 + hop1.kappa**2) + hop1.n))


def af_coefficients(scenario: Scenario, mode: GainMode | None = None) -> AfCoefficients:
    """SNDR-denominator coefficients (b1, b2, c, d) for the chosen gain mode."""
    if scenario.protocol is not Protocol.AF:
        raise ValueError("AF coefficients are undefined for DF scenarios")
    mode = scenario.resolve_mode(mode)
    hop1, hop2 = scenario.hops
    b2 = hop1.n * (1.0 + hop2.kappa**2) / hop1.p
    if mode is GainMode.FIXED:
        g = af_gain(scenario, mode)
        return AfCoefficients(b1=0.0, b2=b2, c=hop2.n / (hop1.p * g * g), d=scenario.d)
    b1 = hop2.n * (1.0 + hop1.kappa**2) / hop2.p
    c = hop1.n * hop2.n / (hop1.p * hop2.p)
    return AfCoefficients(b1=b1, b2=b2, c=c, d=scenario.d)


def instantaneous_sndr(scenario: Scenario, rhos, mode: GainMode | None = None):
    """End-to-end SNDR for given per-hop channel gains.

    AF: rho1*rho2 / (rho1*rho2*d + rho1*b1 + rho2*b2 + c), bounded by 1/d.
    DF: min_i P_i*rho_i / (P_i*rho_i*kappa_i^2 + N_i), bounded by 1/delta.
    Accepts scalars or numpy arrays (elementwise).
    """
    if len(rhos) != len(scenario.hops):
        raise ValueError("one channel gain per hop required")
    if scenario.protocol is Protocol.AF:
        coef = af_coefficients(scenario, mode)
        rho1, rho2 = rhos
        product = rho1 * rho2
        return product / (product * coef.d + rho1 * coef.b1 + rho2 * coef.b2 + coef.c)
    per_hop = [
        hop.p * rho / (hop.p * rho * hop.kappa**2 + hop.n)
        for hop, rho in zip(scenario.hops, rhos)
    ]
    return np.minimum.reduce(per_hop) if any(isinstance(r, np.ndarray) for r in rhos) else min(per_hop)


# ---------------------------------------------------------------------------
# Scenario files: a flat key-value document (JSON object). Per-hop keys are
# prefixed hop1., hop2., ... Exactly one of {beta, snr_db} and one of
# {kappa, kappa_t+kappa_r} must be present per hop.
# ---------------------------------------------------------------------------

_HOP_KEY = re.compile(r"^hop(\d+)\.(\w+)$")
_HOP_FIELDS = {"p_watts", "n_watts", "alpha", "beta", "snr_db", "kappa", "kappa_t", "kappa_r"}


class ScenarioFormatError(ValueError):
    """Malformed scenario document; message names the offending key."""


def scenario_from_mapping(doc: Mapping) -> Scenario:
    """Build a Scenario from the flat key-value document."""
    try:
        protocol = Protocol(str(doc["protocol"]).lower())
    except KeyError:
        raise ScenarioFormatError("missing key: protocol") from None
    except ValueError:
        raise ScenarioFormatError(f"unknown protocol: {doc['protocol']!r}") from None

    mode = None
    if "mode" in doc and doc["mode"] is not None:
        try:
            mode = GainMode(str(doc["mode"]).lower())
        except ValueError:
            raise ScenarioFormatError(f"unknown mode: {doc['mode']!r}") from None

    per_hop: dict[int, dict[str, float]] = {}
    for key in doc:
        if key in ("protocol", "mode"):
            continue
        match = _HOP_KEY.match(str(key))
        if not match:
            raise ScenarioFormatError(f"unrecognized key: {key!r}")
        index, field = int(match.group(1)), match.group(2)
        if field not in _HOP_FIELDS:
            raise ScenarioFormatError(f"unrecognized hop field: {key!r}")
        per_hop.setdefault(index, {})[field] = float(doc[key])

    if not per_hop:
        raise ScenarioFormatError("no hop keys present (expected hop1.*, hop2.*, ...)")
    count = max(per_hop)
    if sorted(per_hop) != list(range(1, count + 1)):
        raise ScenarioFormatError(f"hop indices must be contiguous from 1, got {sorted(per_hop)}")

    hops = []
    for i in range(1, count + 1):
        fields = per_hop[i]
        prefix = f"hop{i}"
        for required in ("p_watts", "n_watts", "alpha"):
            if required not in fields:
                raise ScenarioFormatError(f"missing key: {prefix}.{required}")
        has_beta, has_snr = "beta" in fields, "snr_db" in fields
        if has_beta == has_snr:
            raise ScenarioFormatError(f"{prefix}: exactly one of beta / snr_db required")
        has_kappa = "kappa" in fields
        has_pair = "kappa_t" in fields or "kappa_r" in fields
        if has_kappa == has_pair or (has_pair and not ("kappa_t" in fields and "kappa_r" in fields)):
            raise ScenarioFormatError(f"{prefix}: exactly one of kappa / kappa_t+kappa_r required")
        kappa = (
            fields["kappa"]
            if has_kappa
            else aggregate_kappa(HardwareProfile(fields["kappa_t"], fields["kappa_r"]))
        )
        alpha = fields["alpha"]
        if int(alpha) != alpha:
            raise ScenarioFormatError(f"{prefix}.alpha must be an integer, got {alpha}")
        try:
            hop = Hop(p=fields["p_watts"], n=fields["n_watts"], alpha=int(alpha),
                      beta=fields.get("beta", 1.0), kappa=kappa)
            if has_snr:
                hop = hop.with_snr(db_to_linear(fields["snr_db"]))
        except ValueError as exc:
            raise ScenarioFormatError(f"{prefix}: {exc}") from None
        hops.append(hop)

    try:
        return Scenario(hops=tuple(hops), protocol=protocol, mode=mode)
    except ValueError as exc:
        raise ScenarioFormatError(str(exc)) from None


def scenario_to_mapping(scenario: Scenario) -> dict:
    """Canonical flat document (beta + kappa spelling) for a scenario."""
    doc: dict = {"protocol": scenario.protocol.value}
    if scenario.mode is not None:
        doc["mode"] = scenario.mode.value
    for i, hop in enumerate(scenario.hops, start=1):
        doc[f"hop{i}.p_watts"] = hop.p
        doc[f"hop{i}.n_watts"] = hop.n
        doc[f"hop{i}.alpha"] = hop.alpha
        doc[f"hop{i}.beta"] = hop.beta
        doc[f"hop{i}.kappa"] = hop.kappa
    return doc


def load_scenario(path) -> Scenario:
    """Read a scenario from a JSON file holding the flat document."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioFormatError(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ScenarioFormatError("scenario document must be a JSON object")
    return scenario_from_mapping(doc)
