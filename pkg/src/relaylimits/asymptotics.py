"""High-SNR limits and hardware design rules.

SNDR and capacity ceilings, the equal-EVM allocation rule under a convex
hardware-cost budget, necessary impairment-level conditions for a target
SNDR threshold, and the rate-to-threshold mapping. The necessary conditions
are exactly that: sufficiency holds only asymptotically in SNR, so finite-SNR
designs should stay conservative.

Infinite ceilings (ideal hardware) are reported as the explicit UNBOUNDED
sentinel, never as a floating-point infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .model import Protocol

__all__ = [
    "UNBOUNDED",
    "Unbounded",
    "CeilingReport",
    "CostModel",
    "EvmAllocation",
    "sndr_ceiling",
    "capacity_ceiling",
    "ceiling_report",
    "evm_allocation",
    "kappa_necessary",
    "rate_to_threshold",
]

DEFAULT_PRELOG = 0.5


class Unbounded:
    """Sentinel for ceilings that grow without bound (all-ideal hardware)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "unbounded"


UNBOUNDED = Unbounded()


def _check_kappas(kappa1: float, kappa2: float) -> None:
    if kappa1 < 0.0 or kappa2 < 0.0:
        raise ValueError(f"impairment levels must be >= 0, got ({kappa1}, {kappa2})")


def sndr_ceiling(protocol: Protocol, kappa1: float, kappa2: float) -> float | Unbounded:
    """Deterministic high-SNR limit of the end-to-end SNDR.

    AF: 1/(k1^2 + k2^2 + k1^2 k2^2); DF: 1/max(k1^2, k2^2). UNBOUNDED when
    both hops are ideal.
    """
    _check_kappas(kappa1, kappa2)
    protocol = Protocol(protocol)
    k1sq, k2sq = kappa1 * kappa1, kappa2 * kappa2
    limiter = k1sq + k2sq + k1sq * k2sq if protocol is Protocol.AF else max(k1sq, k2sq)
    if limiter == 0.0:
        return UNBOUNDED
    return 1.0 / limiter


def capacity_ceiling(
    protocol: Protocol, kappa1: float, kappa2: float, prelog: float = DEFAULT_PRELOG
) -> float | Unbounded:
    """High-SNR capacity limit prelog*log2(1 + sndr ceiling).

    The DF value is an upper limit rather than an exact limit.
    """
    gamma_star = sndr_ceiling(protocol, kappa1, kappa2)
    if isinstance(gamma_star, Unbounded):
        return UNBOUNDED
    return prelog * math.log2(1.0 + gamma_star)


@dataclass(frozen=True)
class CeilingReport:
    protocol: Protocol
    sndr_ceiling: float | Unbounded
    capacity_ceiling: float | Unbounded
    prelog: float = DEFAULT_PRELOG


def ceiling_report(
    protocol: Protocol, kappa1: float, kappa2: float, prelog: float = DEFAULT_PRELOG
) -> CeilingReport:
    return CeilingReport(
        protocol=Protocol(protocol),
        sndr_ceiling=sndr_ceiling(protocol, kappa1, kappa2),
        capacity_ceiling=capacity_ceiling(protocol, kappa1, kappa2, prelog),
        prelog=prelog,
    )


class CostModel:
    """Hardware cost as a strictly monotone, convex function of EVM.

    The default is the identity cost (a total-EVM budget). Decreasing convex
    costs model the usual price-of-quality curve; both orientations are
    accepted as long as the function is strictly monotone, which is validated
    by sampling at construction.
    """

    def __init__(
        self,
        zeta: Callable[[float], float],
        zeta_inverse: Callable[[float], float],
        domain: tuple[float, float] = (0.0, 1.0),
        validate: bool = True,
    ):
        self.zeta = zeta
        self.zeta_inverse = zeta_inverse
        self.domain = domain
        if validate:
            self._validate()

    def _validate(self) -> None:
        lo, hi = self.domain
        samples = [lo + (hi - lo) * i / 32.0 for i in range(33)]
        values = [self.zeta(k) for k in samples]
        increasing = all(b > a for a, b in zip(values, values[1:]))
        decreasing = all(b < a for a, b in zip(values, values[1:]))
        if not (increasing or decreasing):
            raise ValueError("cost function must be strictly monotone on its domain")
        for k in samples[1:-1]:
            if abs(self.zeta_inverse(self.zeta(k)) - k) > 1e-6 * max(1.0, abs(k)):
                raise ValueError("zeta_inverse is not the inverse of zeta")

    @classmethod
    def identity(cls) -> "CostModel":
        return cls(zeta=lambda k: k, zeta_inverse=lambda c: c, domain=(0.0, 1.0), validate=False)

    @classmethod
    def from_table(cls, kappas: Sequence[float], costs: Sequence[float]) -> "CostModel":
        """Piecewise-linear cost from (kappa, cost) samples; monotonicity checked."""
        if len(kappas) != len(costs) or len(kappas) < 2:
            raise ValueError("cost table needs at least two (kappa, cost) pairs")
        pairs = sorted(zip(kappas, costs))
        ks = [p[0] for p in pairs]
        cs = [p[1] for p in pairs]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("kappa grid must be strictly increasing")
        increasing = all(b > a for a, b in zip(cs, cs[1:]))
        decreasing = all(b < a for a, b in zip(cs, cs[1:]))
        if not (increasing or decreasing):
            raise ValueError("cost table must be strictly monotone")

        def interp(grid, values, t):
            if t < grid[0] or t > grid[-1]:
                raise ValueError(f"value {t} outside table range [{grid[0]}, {grid[-1]}]")
            for a, b, va, vb in zip(grid, grid[1:], values, values[1:]):
                if t <= b:
                    return va + (vb - va) * (t - a) / (b - a)
            return values[-1]

        inv_grid = cs if increasing else list(reversed(cs))
        inv_values = ks if increasing else list(reversed(ks))
        return cls(
            zeta=lambda k: interp(ks, cs, k),
            zeta_inverse=lambda c: interp(inv_grid, inv_values, c),
            domain=(ks[0], ks[-1]),
            validate=False,
        )


@dataclass(frozen=True)
class EvmAllocation:
    """Equal-EVM design: the cost-budget-optimal transceiver quality split."""

    evm_per_chain: float  # each of the four transmit/receive chains
    kappa1: float  # aggregate per-hop impairment level
    kappa2: float
    af: CeilingReport
    df: CeilingReport


def evm_allocation(
    t_max: float, cost: CostModel | None = None, prelog: float = DEFAULT_PRELOG
) -> EvmAllocation:
    """Ceiling-maximizing EVM split of a total hardware-cost budget.

    All four chains get zeta^{-1}(t_max / 4); the aggregate per-hop level is
    sqrt(2) times that.
    """
    cost = cost or CostModel.identity()
    try:
        evm = cost.zeta_inverse(t_max / 4.0)
    except ValueError as exc:
        raise ValueError(f"budget t_max={t_max} not allocatable: {exc}") from None
    if not math.isfinite(evm) or evm < 0.0:
        raise ValueError(f"budget t_max={t_max} maps to invalid EVM {evm}")
    kappa = math.sqrt(2.0) * evm
    return EvmAllocation(
        evm_per_chain=evm,
        kappa1=kappa,
        kappa2=kappa,
        af=ceiling_report(Protocol.AF, kappa, kappa, prelog),
        df=ceiling_report(Protocol.DF, kappa, kappa, prelog),
    )


def kappa_necessary(protocol: Protocol, x: float) -> float:
    """Largest per-hop impairment level that can possibly support threshold x.

    Assumes the symmetric design kappa1 = kappa2. Necessary only; at finite
    SNR the admissible level is strictly smaller.
    """
    if x <= 0.0:
        raise ValueError(f"threshold must be > 0, got {x}")
    protocol = Protocol(protocol)
    if protocol is Protocol.AF:
        return math.sqrt(math.sqrt(1.0 / x + 1.0) - 1.0)
    return 1.0 / math.sqrt(x)


def rate_to_threshold(rate: float) -> float:
    """SNDR threshold equivalent to a target rate in bits/channel use: 2^(2R)-1."""
    if rate < 0.0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    return 2.0 ** (2.0 * rate) - 1.0
