"""Adaptive quadrature on the half line.

Semi-infinite integrals are mapped through z = t/(1-t) onto [0, 1) and then
handed to adaptive Gauss-Kronrod (scipy's QUADPACK) with a subdivision cap.
Non-convergence raises instead of returning a silently wrong number.
"""

from __future__ import annotations

from typing import Callable

from scipy.integrate import quad

__all__ = ["QuadratureError", "integrate_semi_infinite", "integrate_unit_interval"]

DEFAULT_REL_TOL = 1e-9
SUBDIVISION_CAP = 10_000


class QuadratureError(RuntimeError):
    """Quadrature failed to converge; carries the achieved estimate."""

    def __init__(self, message: str, estimate: float, error_estimate: float):
        super().__init__(f"{message} (estimate={estimate!r}, error~{error_estimate:.3e})")
        self.estimate = estimate
        self.error_estimate = error_estimate


def integrate_unit_interval(
    f: Callable[[float], float],
    epsrel: float = DEFAULT_REL_TOL,
    epsabs: float = 0.0,
) -> float:
    """Adaptive Gauss-Kronrod integral of f over (0, 1)."""
    result = quad(f, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel, limit=SUBDIVISION_CAP, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3:  # QUADPACK appended a warning message
        # Accept anyway if the achieved error estimate meets the request
        # (e.g. roundoff detection on an integral that is essentially zero).
        if abserr > max(epsabs, epsrel * abs(value)):
            raise QuadratureError(str(result[3]), value, abserr)
    return value


def integrate_semi_infinite(
    f: Callable[[float], float],
    epsrel: float = DEFAULT_REL_TOL,
    epsabs: float = 0.0,
) -> float:
    """Adaptive integral of f over [0, inf) via the z = t/(1-t) substitution."""

    def mapped(t: float) -> float:
        u = 1.0 - t
        if u <= 0.0:  # deep subdivision can round a node onto t = 1
            return 0.0
        z = t / u
        return f(z) / (u * u)

    return integrate_unit_interval(mapped, epsrel=epsrel, epsabs=epsabs)
