"""Outage probabilities of the impaired relay link.

Closed forms for Nakagami-m fading (AF: a finite triple sum over integer-order
Bessel K terms; DF: a product of Gamma survival functions), general-fading
evaluation by adaptive quadrature, the ratio-form cdf building block, and the
double-binomial Bessel integral identity used for verification.

AF outage saturates at exactly 1 for thresholds x >= 1/d and DF at x >= 1/delta
(ties included). Values below PRECISION_FLOOR come out of a 1 - S subtraction
and sit at the double-precision cancellation floor; treat them as
order-of-magnitude indicators rather than exact probabilities.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

from .model import AfCoefficients, GainMode, Hop, Protocol, Scenario, af_coefficients
from .quad import integrate_semi_infinite
from .specfun import bessel_k_scaled, factorial, gamma_pdf_int, gamma_sf_int

__all__ = [
    "PRECISION_FLOOR",
    "is_precision_limited",
    "ratio_cdf",
    "product_ratio_cdf_closed",
    "product_ratio_cdf_quadrature",
    "outage_af_closed",
    "outage_af_quadrature",
    "outage_df_closed",
    "outage_df_general",
    "lemma4_integral",
]

# Below this, the trailing 1 - S subtraction has consumed all mantissa bits.
PRECISION_FLOOR = 1e-12


def is_precision_limited(p_out: float) -> bool:
    return 0.0 < p_out < PRECISION_FLOOR


def _clamp_probability(p: float) -> float:
    return min(max(p, 0.0), 1.0)


def ratio_cdf(f_rho: Callable[[float], float], c1: float, c2: float, c3: float, x: float) -> float:
    """Cdf of c1*rho / (c2*rho + c3) at x, for rho >= 0 with cdf f_rho.

    Saturates at 1 for x >= c1/c2; the c2 = 0 case degenerates to
    f_rho(c3*x/c1).
    """
    if c1 <= 0.0 or c3 <= 0.0 or c2 < 0.0:
        raise ValueError(f"need c1 > 0, c3 > 0, c2 >= 0; got ({c1}, {c2}, {c3})")
    if x < 0.0:
        raise ValueError(f"threshold must be >= 0, got {x}")
    if c2 > 0.0 and x >= c1 / c2:
        return 1.0
    return f_rho(c3 * x / (c1 - c2 * x))


def _log_factorial(n: int) -> float:
    return math.log(factorial(n))


def _af_closed_rayleigh(coef: AfCoefficients, omega1: float, omega2: float, x: float) -> float:
    """Single-Bessel outage expression for Rayleigh fading (alpha1=alpha2=1)."""
    big_x = x / (1.0 - coef.d * x)
    shift = big_x * (coef.b1 / omega2 + coef.b2 / omega1)
    radicand = coef.b1 * coef.b2 * big_x * big_x + coef.c * big_x
    root = math.sqrt(radicand)
    arg = 2.0 * root / math.sqrt(omega1 * omega2)
    log_term = (
        math.log(2.0)
        - 0.5 * (math.log(omega1) + math.log(omega2))
        + math.log(root)
        - shift
        - arg
        + math.log(bessel_k_scaled(1, arg))
    )
    return _clamp_probability(1.0 - math.exp(log_term))


def product_ratio_cdf_closed(
    coef: AfCoefficients, alpha1: int, beta1: float, alpha2: int, beta2: float, x: float
) -> float:
    """Cdf of rho1*rho2/(rho1*rho2*d + rho1*b1 + rho2*b2 + c) at x.

    Independent rho_i ~ Gamma(alpha_i, beta_i) with integer shapes. The sum
    runs over positive terms only and combines the exponential prefactor with
    exponentially scaled Bessel values in log space, so it stays accurate out
    to the saturation point. b1 = 0 (fixed relay gain) is handled by the
    analytic limit: only the highest second-shape index survives.
    """
    if x < 0.0:
        raise ValueError(f"threshold must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if coef.d > 0.0 and x >= 1.0 / coef.d:
        return 1.0
    if alpha1 == 1 and alpha2 == 1:
        return _af_closed_rayleigh(coef, beta1, beta2, x)
    return _af_closed_triple_sum(coef, alpha1, beta1, alpha2, beta2, x)


def _af_closed_triple_sum(
    coef: AfCoefficients, alpha1: int, beta1: float, alpha2: int, beta2: float, x: float
) -> float:
    """General integer-shape sum; valid for any alphas including (1, 1)."""
    big_x = x / (1.0 - coef.d * x)
    shift = big_x * (coef.b1 / beta2 + coef.b2 / beta1)
    bsum = coef.b1 * coef.b2 + coef.c / big_x
    arg = 2.0 * big_x * math.sqrt(bsum / (beta1 * beta2))
    log_x = math.log(big_x)
    log_bsum = math.log(bsum)
    log_beta1 = math.log(beta1)
    log_beta2 = math.log(beta2)
    fixed_gain = coef.b1 == 0.0
    log_b1 = 0.0 if fixed_gain else math.log(coef.b1)
    log_b2 = math.log(coef.b2)

    n_values = (alpha2 - 1,) if fixed_gain else tuple(range(alpha2))
    total = 0.0
    for j in range(alpha1):
        for n in n_values:
            for k in range(j + 1):
                order = abs(n - k + 1)
                log_coef = (
                    (0.0 if fixed_gain else (alpha2 - n - 1) * log_b1)
                    + (j - k) * log_b2
                    + 0.5 * (k - n - 1 - 2 * j) * log_beta1
                    + 0.5 * (n - k + 1 - 2 * alpha2) * log_beta2
                    - _log_factorial(k)
                    - _log_factorial(j - k)
                    - _log_factorial(n)
                    - _log_factorial(alpha2 - n - 1)
                )
                log_term = (
                    log_coef
                    + (alpha2 + j) * log_x
                    + 0.5 * (n + k + 1) * log_bsum
                    - shift
                    - arg
                    + math.log(bessel_k_scaled(order, arg))
                )
                total += math.exp(log_term)
    return _clamp_probability(1.0 - 2.0 * total)


def product_ratio_cdf_quadrature(
    coef: AfCoefficients,
    cdf1: Callable[[float], float],
    pdf2: Callable[[float], float],
    x: float,
    epsrel: float = 1e-9,
    scale2: float = 1.0,
) -> float:
    """Same cdf by adaptive quadrature, for arbitrary gain distributions.

    Integrates the survival form over the second-hop gain. `scale2` rescales
    the integration variable (pass the second hop's fading scale so the
    integrand peaks at order unity regardless of SNR).
    """
    if x < 0.0:
        raise ValueError(f"threshold must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if coef.d > 0.0 and x >= 1.0 / coef.d:
        return 1.0
    big_x = x / (1.0 - coef.d * x)
    numerator = coef.b1 * coef.b2 * big_x * big_x + coef.c * big_x
    base = coef.b2 * big_x
    offset = coef.b1 * big_x

    def integrand(v: float) -> float:
        z = scale2 * v
        if z <= 0.0:
            return 0.0
        return (1.0 - cdf1(base + numerator / z)) * pdf2(z + offset) * scale2

    # epsabs floor: survival error is outage error, so 1e-13 absolute is ample
    survival = integrate_semi_infinite(integrand, epsrel=epsrel, epsabs=1e-13)
    return _clamp_probability(1.0 - survival)


def outage_af_closed(scenario: Scenario, x: float, mode: GainMode | None = None) -> float:
    """Closed-form AF outage probability at SNDR threshold x (linear)."""
    coef = af_coefficients(scenario, mode)
    hop1, hop2 = scenario.hops
    return product_ratio_cdf_closed(coef, hop1.alpha, hop1.beta, hop2.alpha, hop2.beta, x)


def outage_af_quadrature(
    scenario: Scenario,
    x: float,
    mode: GainMode | None = None,
    cdf1: Callable[[float], float] | None = None,
    pdf2: Callable[[float], float] | None = None,
    epsrel: float = 1e-9,
) -> float:
    """AF outage probability by adaptive quadrature of the survival integral.

    Defaults to the scenario's Nakagami-m gain distributions; pass explicit
    cdf1/pdf2 callbacks for arbitrary fading on either hop. Convergence for
    heavy-tailed custom distributions is not guaranteed; non-convergence
    raises QuadratureError rather than returning a bad estimate.
    """
    coef = af_coefficients(scenario, mode)
    hop1, hop2 = scenario.hops
    scale2 = 1.0
    if cdf1 is None:
        cdf1 = lambda t: 1.0 - gamma_sf_int(t, hop1.alpha, hop1.beta)
    if pdf2 is None:
        pdf2 = lambda t: gamma_pdf_int(t, hop2.alpha, hop2.beta)
        scale2 = hop2.beta
    return product_ratio_cdf_quadrature(coef, cdf1, pdf2, x, epsrel=epsrel, scale2=scale2)


def outage_df_closed(scenario: Scenario, x: float) -> float:
    """Closed-form DF outage probability; supports M >= 2 hops."""
    if scenario.protocol is not Protocol.DF:
        raise ValueError("closed-form DF outage requires a DF scenario")
    if x < 0.0:
        raise ValueError(f"threshold must be >= 0, got {x}")
    delta = scenario.delta
    if delta > 0.0 and x >= 1.0 / delta:
        return 1.0
    survival = 1.0
    for hop in scenario.hops:
        arg = hop.n * x / (hop.p * (1.0 - hop.kappa**2 * x))
        survival *= gamma_sf_int(arg, hop.alpha, hop.beta)
    return _clamp_probability(1.0 - survival)


def outage_df_general(
    cdfs: Sequence[Callable[[float], float]], hops: Sequence[Hop], x: float
) -> float:
    """DF outage for arbitrary per-hop gain cdfs (one cdf per hop, M >= 1)."""
    if len(cdfs) != len(hops) or not hops:
        raise ValueError("need one gain cdf per hop")
    if x < 0.0:
        raise ValueError(f"threshold must be >= 0, got {x}")
    delta = max(h.kappa**2 for h in hops)
    if delta > 0.0 and x >= 1.0 / delta:
        return 1.0
    survival = 1.0
    for cdf, hop in zip(cdfs, hops):
        survival *= 1.0 - cdf(hop.n * x / (hop.p * (1.0 - hop.kappa**2 * x)))
    return _clamp_probability(1.0 - survival)


def lemma4_integral(p1: int, p2: int, c1: float, c2: float, c3: float, c4: float) -> float:
    """Integral of (t+c1)^p1 (1/t+c2)^p2 e^{-(c3/t + c4 t)} over t in [0, inf).

    Evaluated by the exact double binomial sum of Bessel K terms; c3, c4 must
    be positive, c1, c2 may be any reals, p1, p2 nonnegative integers.
    """
    if p1 < 0 or p2 < 0 or int(p1) != p1 or int(p2) != p2:
        raise ValueError(f"powers must be nonnegative integers, got ({p1}, {p2})")
    if c3 <= 0.0 or c4 <= 0.0:
        raise ValueError(f"need c3 > 0 and c4 > 0, got ({c3}, {c4})")
    arg = 2.0 * math.sqrt(c3 * c4)
    ratio = c3 / c4
    damp = math.exp(-arg)
    total = 0.0
    for n in range(p1 + 1):
        for k in range(p2 + 1):
            weight = math.comb(p1, n) * math.comb(p2, k) * c1 ** (p1 - n) * c2 ** (p2 - k)
            if weight == 0.0:
                continue
            total += (
                weight
                * ratio ** (0.5 * (n - k + 1))
                * bessel_k_scaled(abs(n - k + 1), arg)
                * damp
            )
    return 2.0 * total
