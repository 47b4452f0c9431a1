"""Special functions used by the closed-form link-performance expressions.

Self-contained: integer-order modified Bessel functions of the second kind
(plain and exponentially scaled), factorials, and Gamma-distribution
cdf/pdf/survival for integer shape. No dependency on scipy so that the
quadrature-based test oracles stay independent of this code.
"""

from __future__ import annotations

import math

__all__ = [
    "FACTORIAL_CAP",
    "BesselOverflowError",
    "factorial",
    "bessel_k_int",
    "bessel_k_scaled",
    "gamma_cdf_int",
    "gamma_pdf_int",
    "gamma_sf_int",
]

# Shapes above this cap are rejected rather than silently losing precision.
FACTORIAL_CAP = 64

_FACTORIALS = [float(math.factorial(n)) for n in range(FACTORIAL_CAP + 1)]

_EULER_GAMMA = 0.5772156649015328606
_SERIES_CROSSOVER = 2.0  # K0/K1: power series below, continued fraction above
_CF_MAX_ITER = 10000


class BesselOverflowError(OverflowError):
    """K_nu(z) is not representable in double precision (tiny z, large nu)."""


def factorial(n: int) -> float:
    """n! as a float, from a precomputed exact-integer table (n <= 64)."""
    if n < 0:
        raise ValueError(f"factorial of negative n={n}")
    if n > FACTORIAL_CAP:
        raise ValueError(f"factorial cap is {FACTORIAL_CAP}, got n={n}")
    return _FACTORIALS[n]


def _k01_series_scaled(z: float) -> tuple[float, float]:
    """e^z*K0(z), e^z*K1(z) by the ascending power series (z <= 2)."""
    q = 0.25 * z * z
    log_half_z = math.log(0.5 * z)

    # I0, I1 and the companion log-series sums.
    term_i0 = 1.0
    i0 = 1.0
    k0_sum = 0.0  # sum_{k>=1} q^k/(k!)^2 * H_k
    term_i1 = 1.0  # q^k / (k! (k+1)!)
    i1_sum = 1.0
    k1_sum = -2.0 * _EULER_GAMMA  # k=0 term of (H_k + H_{k+1} - 2*gamma) + 1
    k1_sum += 1.0
    harmonic = 0.0
    k = 0
    while True:
        k += 1
        term_i0 *= q / (k * k)
        harmonic += 1.0 / k
        i0 += term_i0
        k0_sum += term_i0 * harmonic
        term_i1 *= q / (k * (k + 1))
        i1_sum += term_i1
        k1_sum += term_i1 * (2.0 * harmonic + 1.0 / (k + 1) - 2.0 * _EULER_GAMMA)
        if term_i0 < 1e-18 * i0 and k > 3:
            break
        if k > 200:  # unreachable for z <= 2; defensive
            break

    k0 = -(log_half_z + _EULER_GAMMA) * i0 + k0_sum
    i1 = 0.5 * z * i1_sum
    k1 = 1.0 / z + log_half_z * i1 - 0.25 * z * k1_sum
    scale = math.exp(z)
    return k0 * scale, k1 * scale


def _k01_cf_scaled(z: float) -> tuple[float, float]:
    """e^z*K0(z), e^z*K1(z) by Steed's continued fraction (z >= 2).

    Standard CF2 evaluation for order 0; accurate to machine precision on
    this branch, with the same z ~ 2 crossover as the series.
    """
    eps = 1e-16
    a1 = 0.25
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _CF_MAX_ITER + 1):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < eps:
            break
    h = a1 * h
    k0 = math.sqrt(math.pi / (2.0 * z)) / s
    k1 = k0 * (z + 0.5 - h) / z
    return k0, k1


def bessel_k_scaled(nu: int, z: float) -> float:
    """Exponentially scaled modified Bessel function e^z * K_|nu|(z).

    Stable at large z where K_nu itself underflows. Uses the ascending
    series below z = 2, a continued fraction above, and the upward
    recurrence K_{v+1} = K_{v-1} + (2v/z) K_v for higher integer orders.
    """
    if z <= 0.0:
        raise ValueError(f"bessel K requires z > 0, got z={z}")
    n = abs(int(nu))
    if z <= _SERIES_CROSSOVER:
        k_lo, k_hi = _k01_series_scaled(z)
    else:
        k_lo, k_hi = _k01_cf_scaled(z)
    if n == 0:
        return k_lo
    two_over_z = 2.0 / z
    for order in range(1, n):
        k_lo, k_hi = k_hi, k_lo + order * two_over_z * k_hi
        if math.isinf(k_hi):
            raise BesselOverflowError(
                f"K_{n}({z!r}) overflows double precision (reached order {order + 1})"
            )
    return k_hi


def bessel_k_int(nu: int, z: float) -> float:
    """Modified Bessel function of the second kind K_|nu|(z) for integer nu.

    Raises BesselOverflowError instead of returning inf when the value is
    not representable (very small z combined with large |nu|).
    """
    scaled = bessel_k_scaled(nu, z)
    value = scaled * math.exp(-z)
    if math.isinf(value):
        raise BesselOverflowError(f"K_{abs(int(nu))}({z!r}) overflows double precision")
    return value


def _check_gamma_args(x: float, alpha: int, beta: float) -> None:
    if alpha < 1 or int(alpha) != alpha:
        raise ValueError(f"integer shape alpha >= 1 required, got {alpha}")
    if alpha > FACTORIAL_CAP:
        raise ValueError(f"shape alpha={alpha} above factorial cap {FACTORIAL_CAP}")
    if beta <= 0.0:
        raise ValueError(f"scale beta > 0 required, got {beta}")
    if x < 0.0:
        raise ValueError(f"x >= 0 required, got {x}")


def gamma_sf_int(x: float, alpha: int, beta: float) -> float:
    """Survival function of Gamma(alpha, beta) with integer shape.

    Computed directly as sum_{j=0}^{alpha-1} e^{-x/b} (x/b)^j / j!, which is
    a sum of positive terms and therefore free of cancellation near 1.
    """
    _check_gamma_args(x, alpha, beta)
    w = x / beta
    term = math.exp(-w)
    total = term
    for j in range(1, int(alpha)):
        term *= w / j
        total += term
    return min(total, 1.0)


def gamma_cdf_int(x: float, alpha: int, beta: float) -> float:
    """Cdf of Gamma(alpha, beta) with integer shape: 1 - gamma_sf_int."""
    return 1.0 - gamma_sf_int(x, alpha, beta)


def gamma_pdf_int(x: float, alpha: int, beta: float) -> float:
    """Pdf of Gamma(alpha, beta) with integer shape alpha."""
    _check_gamma_args(x, alpha, beta)
    a = int(alpha)
    if x == 0.0:
        return 1.0 / beta if a == 1 else 0.0
    # log form avoids overflow of x^(a-1) and beta^a at extreme scales
    return math.exp(
        (a - 1) * math.log(x) - x / beta - math.log(_FACTORIALS[a - 1]) - a * math.log(beta)
    )
