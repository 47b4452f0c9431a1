"""Seeded stochastic oracles for the closed-form results.

Counter-based (Philox) substreams keyed by (seed, stream index) make every
estimate bit-reproducible and independent of how work is chunked or farmed
out. Channel gains are drawn by the exact sum-of-exponentials construction
valid for integer fading shapes. Signal-level simulation draws the actual
complex baseband quantities (signal, distortion, noise, channel) so the
aggregate-impairment model can be validated against the split transmit /
receive model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GainMode, HardwareProfile, Hop, Scenario, af_gain, instantaneous_sndr

__all__ = [
    "CHUNK_SIZE",
    "Estimate",
    "SignalSample",
    "HopSignalStats",
    "ChainSindrEstimate",
    "substream",
    "sample_channel_gain",
    "simulate_hop_signal",
    "simulate_af_chain_sindr",
    "estimate_outage",
    "estimate_capacity",
]

CHUNK_SIZE = 1 << 16
_Z95 = 1.96  # conventional two-sided 95% normal quantile
_WILSON_COUNT = 10  # switch to Wilson CI when successes or failures drop below


def substream(seed: int, stream: int) -> np.random.Generator:
    """Deterministic generator for (seed, stream); streams never overlap."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_channel_gain(alpha: int, beta: float, rng: np.random.Generator, size=None):
    """Gamma(alpha, beta) channel gains as beta * sum of alpha unit exponentials."""
    if int(alpha) != alpha or alpha < 1:
        raise ValueError(f"integer shape alpha >= 1 required, got {alpha}")
    if beta <= 0.0:
        raise ValueError(f"scale beta > 0 required, got {beta}")
    n = 1 if size is None else size
    u = rng.random((n, int(alpha)))
    gains = -np.log1p(-u).sum(axis=1) * beta  # 1-u is in (0, 1], so log is finite
    return float(gains[0]) if size is None else gains


@dataclass(frozen=True)
class Estimate:
    """Monte-Carlo estimate with standard error and a 95% confidence interval."""

    value: float
    std_error: float
    n: int
    ci95: tuple[float, float]


def _wald_ci(value: float, std_error: float) -> tuple[float, float]:
    return (value - _Z95 * std_error, value + _Z95 * std_error)


def _wilson_ci(successes: int, n: int) -> tuple[float, float]:
    z2 = _Z95 * _Z95
    phat = successes / n
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2.0 * n)) / denom
    half = _Z95 * math.sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom
    # endpoints are exact at the boundaries (algebraically 0 and 1)
    lo = 0.0 if successes == 0 else max(center - half, 0.0)
    hi = 1.0 if successes == n else min(center + half, 1.0)
    return (lo, hi)


def _chunk_sizes(n: int):
    full, rest = divmod(n, CHUNK_SIZE)
    sizes = [CHUNK_SIZE] * full
    if rest:
        sizes.append(rest)
    return sizes


def estimate_outage(
    scenario: Scenario, x: float, n: int, seed: int, mode: GainMode | None = None
) -> Estimate:
    """Empirical outage probability Pr{sndr <= x} from n fading draws.

    Work proceeds in fixed-size chunks, one Philox substream per chunk, so
    the result is identical no matter how chunks are distributed.
    """
    if n < 1000:
        raise ValueError(f"at least 1000 samples required, got {n}")
    if x < 0.0:
        raise ValueError(f"threshold must be >= 0, got {x}")
    successes = 0
    for stream, size in enumerate(_chunk_sizes(n)):
        rng = substream(seed, stream)
        gains = [sample_channel_gain(h.alpha, h.beta, rng, size=size) for h in scenario.hops]
        sndr = instantaneous_sndr(scenario, gains, mode)
        successes += int(np.count_nonzero(sndr <= x))
    phat = successes / n
    std_error = math.sqrt(phat * (1.0 - phat) / n)
    if min(successes, n - successes) < _WILSON_COUNT:
        ci = _wilson_ci(successes, n)
    else:
        ci = _wald_ci(phat, std_error)
    return Estimate(value=phat, std_error=std_error, n=n, ci95=ci)


def estimate_capacity(
    scenario: Scenario,
    n: int,
    seed: int,
    mode: GainMode | None = None,
    prelog: float = 0.5,
) -> Estimate:
    """Empirical ergodic capacity: sample mean of prelog*log2(1 + sndr)."""
    if n < 1000:
        raise ValueError(f"at least 1000 samples required, got {n}")
    total = 0.0
    total_sq = 0.0
    for stream, size in enumerate(_chunk_sizes(n)):
        rng = substream(seed, stream)
        gains = [sample_channel_gain(h.alpha, h.beta, rng, size=size) for h in scenario.hops]
        sndr = instantaneous_sndr(scenario, gains, mode)
        values = prelog * np.log2(1.0 + sndr)
        total += float(values.sum())
        total_sq += float(np.square(values).sum())
    mean = total / n
    variance = max(total_sq - n * mean * mean, 0.0) / (n - 1)
    std_error = math.sqrt(variance / n)
    return Estimate(value=mean, std_error=std_error, n=n, ci95=_wald_ci(mean, std_error))


# ---------------------------------------------------------------------------
# Signal-level simulation of the distortion model
# ---------------------------------------------------------------------------


def _complex_normal(rng: np.random.Generator, variance, size: int) -> np.ndarray:
    scale = np.sqrt(np.asarray(variance) / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


@dataclass(frozen=True)
class SignalSample:
    """One batch of the aggregated single-distortion channel y = h(s+eta)+nu."""

    s: np.ndarray
    h: np.ndarray
    eta: np.ndarray
    nu: np.ndarray
    y: np.ndarray

    @classmethod
    def draw(cls, hop: Hop, n: int, rng: np.random.Generator) -> "SignalSample":
        rho = sample_channel_gain(hop.alpha, hop.beta, rng, size=n)
        phase = rng.random(n) * 2.0 * np.pi
        h = np.sqrt(rho) * np.exp(1j * phase)
        s = _complex_normal(rng, hop.p, n)
        eta = _complex_normal(rng, hop.kappa**2 * hop.p, n)
        nu = _complex_normal(rng, hop.n, n)
        return cls(s=s, h=h, eta=eta, nu=nu, y=h * (s + eta) + nu)


@dataclass(frozen=True)
class HopSignalStats:
    """Conditional distortion-power statistics of one simulated hop.

    Ratios are distortion power over |h|^2 * P per channel draw; the split
    model target is kappa_t^2 + kappa_r^2 and the aggregate model target is
    kappa^2 (equal by construction of the aggregate level).
    """

    n: int
    target: float  # kappa_t^2 + kappa_r^2
    split_ratio_mean: float
    split_ratio_se: float
    aggregate_ratio_mean: float
    aggregate_ratio_se: float

    def split_matches_target(self, sigmas: float = 5.0) -> bool:
        return abs(self.split_ratio_mean - self.target) <= sigmas * self.split_ratio_se

    def models_agree(self, sigmas: float = 5.0) -> bool:
        gap = abs(self.split_ratio_mean - self.aggregate_ratio_mean)
        return gap <= sigmas * math.hypot(self.split_ratio_se, self.aggregate_ratio_se)


def simulate_hop_signal(
    hop: Hop,
    n: int,
    rng: np.random.Generator,
    profile: HardwareProfile | None = None,
) -> HopSignalStats:
    """Simulate the split transmit/receive distortion model on one hop.

    Draws signal, both distortion noises, receiver noise, and the fading
    channel; reports the per-draw conditional distortion power ratio for the
    split model and for the equivalent aggregated single-noise model. When no
    explicit EVM profile is given the hop's aggregate level is split evenly.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    if profile is None:
        even = hop.kappa / math.sqrt(2.0)
        profile = HardwareProfile(kappa_t=even, kappa_r=even)
    kappa_sq = profile.kappa_t**2 + profile.kappa_r**2

    rho = sample_channel_gain(hop.alpha, hop.beta, rng, size=n)
    phase = rng.random(n) * 2.0 * np.pi
    h = np.sqrt(rho) * np.exp(1j * phase)
    gain_power = np.abs(h) ** 2

    eta_t = _complex_normal(rng, profile.kappa_t**2 * hop.p, n)
    eta_r = _complex_normal(rng, profile.kappa_r**2 * hop.p * gain_power, n)
    split_ratio = np.abs(h * eta_t + eta_r) ** 2 / (hop.p * gain_power)

    eta = _complex_normal(rng, kappa_sq * hop.p, n)
    aggregate_ratio = np.abs(h * eta) ** 2 / (hop.p * gain_power)

    def mean_se(values: np.ndarray) -> tuple[float, float]:
        if n == 1:
            return float(values[0]), 0.0
        return float(values.mean()), float(values.std(ddof=1) / math.sqrt(n))

    split_mean, split_se = mean_se(split_ratio)
    agg_mean, agg_se = mean_se(aggregate_ratio)
    return HopSignalStats(
        n=n,
        target=kappa_sq,
        split_ratio_mean=split_mean,
        split_ratio_se=split_se,
        aggregate_ratio_mean=agg_mean,
        aggregate_ratio_se=agg_se,
    )


@dataclass(frozen=True)
class ChainSindrEstimate:
    """Empirical end-to-end SINR of the simulated AF chain at fixed gains."""

    value: float
    std_error: float
    n: int
    formula_value: float

    def matches_formula(self, sigmas: float = 5.0) -> bool:
        return abs(self.value - self.formula_value) <= sigmas * self.std_error


def simulate_af_chain_sindr(
    scenario: Scenario,
    rho1: float,
    rho2: float,
    n: int,
    rng: np.random.Generator,
    mode: GainMode | None = None,
) -> ChainSindrEstimate:
    """Simulate the two-hop AF signal chain conditioned on the channel gains.

    Composes relay amplification of the noisy, distorted first-hop signal
    with second-hop distortion and noise, and estimates signal power over
    distortion-plus-noise power. The relay distortion variance follows the
    amplified signal's conditional power, which for variable gain equals the
    relay power constraint.
    """
    if n < 1000:
        raise ValueError(f"at least 1000 samples required, got {n}")
    mode = scenario.resolve_mode(mode)
    hop1, hop2 = scenario.hops
    g = af_gain(scenario, mode, rho1=rho1)
    h1 = math.sqrt(rho1)
    h2 = math.sqrt(rho2)

    s1 = _complex_normal(rng, hop1.p, n)
    eta1 = _complex_normal(rng, hop1.kappa**2 * hop1.p, n)
    nu1 = _complex_normal(rng, hop1.n, n)
    relay_out_power = g * g * (hop1.p * rho1 * (1.0 + hop1.kappa**2) + hop1.n)
    eta2 = _complex_normal(rng, hop2.kappa**2 * relay_out_power, n)
    nu2 = _complex_normal(rng, hop2.n, n)

    signal = g * h1 * h2 * s1
    rest = g * h1 * h2 * eta1 + g * h2 * nu1 + h2 * eta2 + nu2

    sig_power = np.abs(signal) ** 2
    rest_power = np.abs(rest) ** 2
    a, b = float(sig_power.mean()), float(rest_power.mean())
    ratio = a / b
    var_a = float(sig_power.var(ddof=1))
    var_b = float(rest_power.var(ddof=1))
    # delta-method standard error for the independent-ratio estimator
    se = ratio * math.sqrt(var_a / (n * a * a) + var_b / (n * b * b))
    formula = float(instantaneous_sndr(scenario, [rho1, rho2], mode))
    return ChainSindrEstimate(value=ratio, std_error=se, n=n, formula_value=formula)
