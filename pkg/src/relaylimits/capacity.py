"""Ergodic capacity of AF and DF relaying under hardware impairments.

Exact values come from deterministic quadrature of the defining expectation
over the Gamma fading gains; bounds come from the Jensen argument applied to
the SNDR written as psi/(psi*d + 1). Expectations are integrated in
standardized gain units (rho = beta*u) so behaviour is SNR-scale invariant.

The half prelog accounts for the two-slot relay transmission and is exposed
as a parameter on every evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import GainMode, Protocol, Scenario, af_coefficients
from .quad import integrate_semi_infinite
from .specfun import gamma_pdf_int

__all__ = [
    "CapacityResult",
    "capacity_af_exact",
    "capacity_af_upper",
    "capacity_af_approx",
    "capacity_df_upper_exact",
    "capacity_df_upper_closed",
]

DEFAULT_PRELOG = 0.5
_INNER_TOL_FRACTION = 1e-4  # inner quadrature gets this share of the budget
_INNER_ABS_FLOOR = 1e-14


@dataclass(frozen=True)
class CapacityResult:
    """Capacity figure in bits per channel use with its evaluation kind."""

    value: float
    kind: str  # "exact-quadrature" | "upper-bound" | "approximation"
    prelog: float = DEFAULT_PRELOG


def _gamma_expectation_2d(func, alpha1, alpha2, epsrel: float) -> float:
    """E{func(u1, u2)} for independent standardized Gamma(alpha_i, 1) gains."""
    inner_rel = epsrel * _INNER_TOL_FRACTION

    def outer(u1: float) -> float:
        if u1 <= 0.0:
            return 0.0
        w1 = gamma_pdf_int(u1, alpha1, 1.0)
        if w1 == 0.0:
            return 0.0
        inner = integrate_semi_infinite(
            lambda u2: func(u1, u2) * gamma_pdf_int(u2, alpha2, 1.0) if u2 > 0.0 else 0.0,
            epsrel=inner_rel,
            epsabs=_INNER_ABS_FLOOR,
        )
        return w1 * inner

    return integrate_semi_infinite(outer, epsrel=epsrel, epsabs=_INNER_ABS_FLOOR)


def capacity_af_exact(
    scenario: Scenario,
    mode: GainMode | None = None,
    prelog: float = DEFAULT_PRELOG,
    epsrel: float = 1e-7,
) -> CapacityResult:
    """Ergodic AF capacity prelog*E{log2(1 + sndr)} by 2-D quadrature."""
    coef = af_coefficients(scenario, mode)
    hop1, hop2 = scenario.hops
    beta1, beta2 = hop1.beta, hop2.beta

    def integrand(u1: float, u2: float) -> float:
        rho1, rho2 = beta1 * u1, beta2 * u2
        product = rho1 * rho2
        sndr = product / (product * coef.d + rho1 * coef.b1 + rho2 * coef.b2 + coef.c)
        return math.log1p(sndr)

    mean_log = _gamma_expectation_2d(integrand, hop1.alpha, hop2.alpha, epsrel)
    return CapacityResult(value=prelog * mean_log / math.log(2.0), kind="exact-quadrature",
                          prelog=prelog)


def capacity_af_upper(
    scenario: Scenario,
    mode: GainMode | None = None,
    prelog: float = DEFAULT_PRELOG,
    epsrel: float = 1e-8,
) -> CapacityResult:
    """Jensen upper bound prelog*log2(1 + J/(J*d + 1)).

    J = E{rho1*rho2 / (rho1*b1 + rho2*b2 + c)} is evaluated by deterministic
    quadrature of its defining expectation.
    """
    coef = af_coefficients(scenario, mode)
    hop1, hop2 = scenario.hops
    beta1, beta2 = hop1.beta, hop2.beta

    def psi(u1: float, u2: float) -> float:
        rho1, rho2 = beta1 * u1, beta2 * u2
        return rho1 * rho2 / (rho1 * coef.b1 + rho2 * coef.b2 + coef.c)

    j_moment = _gamma_expectation_2d(psi, hop1.alpha, hop2.alpha, epsrel)
    value = prelog * math.log2(1.0 + j_moment / (j_moment * coef.d + 1.0))
    return CapacityResult(value=value, kind="upper-bound", prelog=prelog)


def capacity_af_approx(
    scenario: Scenario, mode: GainMode | None = None, prelog: float = DEFAULT_PRELOG
) -> CapacityResult:
    """First-moment-ratio closed form; empirically an upper bound, and
    asymptotically exact in the high-SNR regime."""
    coef = af_coefficients(scenario, mode)
    hop1, hop2 = scenario.hops
    m1 = hop1.alpha * hop1.beta
    m2 = hop2.alpha * hop2.beta
    value = prelog * math.log2(
        1.0 + m1 * m2 / (m1 * m2 * coef.d + m1 * coef.b1 + m2 * coef.b2 + coef.c)
    )
    return CapacityResult(value=value, kind="approximation", prelog=prelog)


def _hop_capacity_quadrature(hop, prelog: float, epsrel: float) -> float:
    kappa_sq = hop.kappa**2
    snr_scale = hop.p * hop.beta / hop.n  # per-unit standardized gain

    def integrand(u: float) -> float:
        if u <= 0.0:
            return 0.0
        ratio = snr_scale * u
        sndr = ratio / (ratio * kappa_sq + 1.0)
        return math.log1p(sndr) * gamma_pdf_int(u, hop.alpha, 1.0)

    mean_log = integrate_semi_infinite(integrand, epsrel=epsrel, epsabs=_INNER_ABS_FLOOR)
    return prelog * mean_log / math.log(2.0)


def capacity_df_upper_exact(
    scenario: Scenario, prelog: float = DEFAULT_PRELOG, epsrel: float = 1e-8
) -> CapacityResult:
    """Min over hops of prelog*E{log2(1 + per-hop SNDR)}, each by quadrature."""
    if scenario.protocol is not Protocol.DF:
        raise ValueError("DF capacity bound requires a DF scenario")
    value = min(_hop_capacity_quadrature(h, prelog, epsrel) for h in scenario.hops)
    return CapacityResult(value=value, kind="exact-quadrature", prelog=prelog)


def capacity_df_upper_closed(scenario: Scenario, prelog: float = DEFAULT_PRELOG) -> CapacityResult:
    """Closed Jensen bound min_i prelog*log2(1 + SNR_i/(SNR_i*kappa_i^2 + 1))."""
    if scenario.protocol is not Protocol.DF:
        raise ValueError("DF capacity bound requires a DF scenario")
    value = min(
        prelog * math.log2(1.0 + h.avg_snr / (h.avg_snr * h.kappa**2 + 1.0))
        for h in scenario.hops
    )
    return CapacityResult(value=value, kind="upper-bound", prelog=prelog)
