"""Capacity evaluators: goldens, Jensen ordering, ceilings, MC agreement."""

import math

import numpy as np
import pytest

from relaylimits.capacity import (
    capacity_af_approx,
    capacity_af_exact,
    capacity_af_upper,
    capacity_df_upper_closed,
    capacity_df_upper_exact,
)
from relaylimits.model import GainMode, Hop, Protocol, Scenario, db_to_linear
from relaylimits.montecarlo import estimate_capacity
from conftest import af_scenario, df_scenario

# Frozen quadrature goldens (cross-checked against Monte-Carlo below):
# variable gain, shapes (2,2), both hops 30 dB, impairment level 0.15
GOLDEN_AF_EXACT = 2.2046286432300537
GOLDEN_AF_UPPER = 2.223316727626681
# DF bound, shapes (2,2), hops at 30/20 dB, impairment level 0.15
GOLDEN_DF_EXACT = 2.3834590092093397
# J-moment-bound regression values: shapes (3,3), 20 dB, impairment 0.1
GOLDEN_UPPER_A33_FIXED = 2.3151783079870225
GOLDEN_UPPER_A33_VARIABLE = 2.2876501385135968


def test_af_golden_values():
    sc = af_scenario(alpha=2, snr_db=30.0, kappa=0.15)
    exact = capacity_af_exact(sc, GainMode.VARIABLE)
    upper = capacity_af_upper(sc, GainMode.VARIABLE)
    assert exact.value == pytest.approx(GOLDEN_AF_EXACT, abs=2e-6)
    assert upper.value == pytest.approx(GOLDEN_AF_UPPER, abs=2e-7)
    assert exact.kind == "exact-quadrature"
    assert upper.kind == "upper-bound"


def test_af_exact_matches_monte_carlo():
    sc = af_scenario(alpha=2, snr_db=30.0, kappa=0.15)
    est = estimate_capacity(sc, 1_000_000, seed=9, mode=GainMode.VARIABLE)
    assert abs(est.value - GOLDEN_AF_EXACT) <= 3.0 * est.std_error


def test_upper_bound_regression_values():
    sc = af_scenario(alpha=3, snr_db=20.0, kappa=0.1)
    assert capacity_af_upper(sc, GainMode.FIXED).value == pytest.approx(
        GOLDEN_UPPER_A33_FIXED, abs=2e-7
    )
    assert capacity_af_upper(sc, GainMode.VARIABLE).value == pytest.approx(
        GOLDEN_UPPER_A33_VARIABLE, abs=2e-7
    )


def test_jensen_ordering_random_scenarios():
    rng = np.random.default_rng(31)
    for trial in range(100):
        alpha1, alpha2 = (int(a) for a in rng.integers(1, 5, size=2))
        h1 = Hop(1.0, 1.0, alpha1, db_to_linear(rng.uniform(0, 30)) / alpha1,
                 float(rng.uniform(0, 0.3)))
        h2 = Hop(1.0, 1.0, alpha2, db_to_linear(rng.uniform(0, 30)) / alpha2,
                 float(rng.uniform(0, 0.3)))
        sc = Scenario(hops=(h1, h2), protocol=Protocol.AF)
        mode = GainMode.FIXED if trial % 2 else GainMode.VARIABLE
        exact = capacity_af_exact(sc, mode).value
        upper = capacity_af_upper(sc, mode).value
        assert upper >= exact - 1e-6


def test_approx_upper_bounds_exact_on_reference_regime():
    # empirical property in the reference operating regime, not a theorem
    for kappa in (0.05, 0.15):
        for snr_db in (0.0, 10.0, 20.0, 30.0, 40.0):
            sc = af_scenario(alpha=2, snr_db=snr_db, kappa=kappa)
            exact = capacity_af_exact(sc, GainMode.VARIABLE).value
            approx = capacity_af_approx(sc, GainMode.VARIABLE).value
            assert approx >= exact - 1e-6


def test_approx_closed_form_arithmetic():
    sc = af_scenario(alpha=2, snr_db=25.0, kappa=0.1, mode="variable")
    from relaylimits.model import af_coefficients

    coef = af_coefficients(sc)
    m1 = sc.hops[0].avg_fading_power
    m2 = sc.hops[1].avg_fading_power
    expected = 0.5 * math.log2(
        1.0 + m1 * m2 / (m1 * m2 * coef.d + m1 * coef.b1 + m2 * coef.b2 + coef.c)
    )
    assert capacity_af_approx(sc).value == pytest.approx(expected, rel=1e-14)


def test_all_three_converge_to_ceiling_under_beta_scaling():
    base = af_scenario(alpha=2, snr_db=0.0, kappa=0.05)
    ceiling = 0.5 * math.log2(1.0 + 1.0 / base.d)
    previous_gap = math.inf
    for k in (2, 4, 6, 8):
        sc = base.scaled_snr(10.0**k)
        exact = capacity_af_exact(sc, GainMode.VARIABLE).value
        gap = ceiling - exact
        assert gap < previous_gap or gap < 1e-6
        previous_gap = gap
    sc8 = base.scaled_snr(1e8)
    assert abs(capacity_af_exact(sc8, GainMode.VARIABLE).value - ceiling) < 1e-3
    assert abs(capacity_af_upper(sc8, GainMode.VARIABLE).value - ceiling) < 1e-3
    assert abs(capacity_af_approx(sc8, GainMode.VARIABLE).value - ceiling) < 1e-3


def test_ceiling_dominance_for_heavy_impairments():
    sc = af_scenario(alpha=2, snr_db=40.0, kappa=3.1)  # 1/d < 0.01
    assert 1.0 / sc.d < 0.01
    value = capacity_af_exact(sc, GainMode.VARIABLE).value
    assert value < 0.5 * math.log2(1.01)


def test_vanishing_snr():
    sc = af_scenario(alpha=2, snr_db=-60.0, kappa=0.1)
    assert capacity_af_exact(sc, GainMode.VARIABLE).value < 1e-4


def test_upper_bound_degenerate_coefficient_limit():
    # b1 -> 0 (fixed gain), c -> 0 (vanishing second-hop noise):
    # the J-moment collapses to E{rho1}/b2
    h1 = Hop(p=1.0, n=1.0, alpha=2, beta=25.0, kappa=0.1)
    h2 = Hop(p=1.0, n=1e-9, alpha=2, beta=25.0, kappa=0.1)
    sc = Scenario(hops=(h1, h2), protocol=Protocol.AF)
    from relaylimits.model import af_coefficients

    coef = af_coefficients(sc, GainMode.FIXED)
    j_limit = h1.avg_fading_power / coef.b2
    expected = 0.5 * math.log2(1.0 + j_limit / (j_limit * coef.d + 1.0))
    assert capacity_af_upper(sc, GainMode.FIXED).value == pytest.approx(expected, rel=1e-4)


def test_df_examples_and_ordering():
    sc = df_scenario(alpha=2, snr_db=30.0, kappa=0.15, snr2_db=20.0)
    exact = capacity_df_upper_exact(sc)
    closed = capacity_df_upper_closed(sc)
    assert exact.value == pytest.approx(GOLDEN_DF_EXACT, abs=2e-6)
    assert closed.value >= exact.value
    # the end-to-end min-SNDR capacity sits below the min-of-expectations bound
    est = estimate_capacity(sc, 1_000_000, seed=4)
    assert est.value <= exact.value + 3.0 * est.std_error

    # per-hop Monte-Carlo of the bound itself agrees within 3 SE
    from relaylimits.montecarlo import sample_channel_gain, substream

    per_hop = []
    for stream, hop in enumerate(sc.hops):
        rho = sample_channel_gain(hop.alpha, hop.beta, substream(4, 100 + stream), size=500_000)
        values = 0.5 * np.log2(1.0 + hop.p * rho / (hop.p * rho * hop.kappa**2 + hop.n))
        per_hop.append((values.mean(), values.std(ddof=1) / math.sqrt(values.size)))
    mc_bound, se = min(per_hop)
    assert abs(mc_bound - exact.value) <= 3.0 * se

    # symmetric hops: the per-hop values coincide, min is either
    sym = df_scenario(alpha=2, snr_db=25.0, kappa=0.1)
    from relaylimits.capacity import _hop_capacity_quadrature

    per_hop = [_hop_capacity_quadrature(h, 0.5, 1e-8) for h in sym.hops]
    assert per_hop[0] == pytest.approx(per_hop[1], rel=1e-12)
    assert capacity_df_upper_exact(sym).value == pytest.approx(per_hop[0], rel=1e-12)


def test_df_closed_arithmetic_and_limits():
    sc = Scenario(
        hops=(Hop(1.0, 1.0, 1, 100.0, 0.1), Hop(1.0, 1.0, 1, 100.0, 0.1)),
        protocol=Protocol.DF,
    )
    assert capacity_df_upper_closed(sc).value == pytest.approx(0.5 * math.log2(51.0), rel=1e-14)
    # SNR -> infinity saturates at prelog*log2(1 + 1/max kappa^2)
    big = df_scenario(alpha=2, snr_db=120.0, kappa=0.1)
    limit = 0.5 * math.log2(1.0 + 1.0 / 0.01)
    assert capacity_df_upper_closed(big).value == pytest.approx(limit, abs=1e-4)


def test_df_jensen_ordering_random():
    rng = np.random.default_rng(77)
    for _ in range(100):
        alpha = int(rng.integers(1, 5))
        sc = df_scenario(alpha=alpha, snr_db=float(rng.uniform(0, 35)),
                         kappa=float(rng.uniform(0, 0.3)),
                         snr2_db=float(rng.uniform(0, 35)))
        assert capacity_df_upper_closed(sc).value >= capacity_df_upper_exact(sc).value - 1e-9


def test_df_ideal_reduction():
    sc = df_scenario(alpha=2, snr_db=15.0, kappa=0.0)
    from relaylimits.quad import integrate_semi_infinite
    from relaylimits.specfun import gamma_pdf_int

    hop = sc.hops[0]
    classical = 0.5 / math.log(2.0) * integrate_semi_infinite(
        lambda u: math.log1p(hop.p * hop.beta * u / hop.n) * gamma_pdf_int(u, hop.alpha, 1.0)
        if u > 0
        else 0.0,
        epsrel=1e-10,
    )
    assert capacity_df_upper_exact(sc).value == pytest.approx(classical, rel=1e-7)


def test_prelog_parameter():
    sc = af_scenario(alpha=2, snr_db=20.0, kappa=0.1)
    half = capacity_af_approx(sc, GainMode.VARIABLE, prelog=0.5).value
    full = capacity_af_approx(sc, GainMode.VARIABLE, prelog=1.0).value
    assert full == pytest.approx(2.0 * half, rel=1e-14)
    assert capacity_df_upper_closed(df_scenario(), prelog=1.0).prelog == 1.0


def test_df_evaluators_reject_af():
    with pytest.raises(ValueError):
        capacity_df_upper_exact(af_scenario())
    with pytest.raises(ValueError):
        capacity_df_upper_closed(af_scenario())
