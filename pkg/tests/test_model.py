"""Domain model: hardware profiles, hops, gains, SNDR, scenario documents."""

import json
import math

import numpy as np
import pytest

from relaylimits.model import (
    AfCoefficients,
    GainMode,
    HardwareProfile,
    Hop,
    Protocol,
    Scenario,
    ScenarioFormatError,
    af_coefficients,
    af_gain,
    aggregate_kappa,
    beta_for_target_snr,
    db_to_linear,
    instantaneous_sndr,
    linear_to_db,
    load_scenario,
    scenario_from_mapping,
    scenario_to_mapping,
)
from conftest import af_scenario, df_scenario


def test_aggregate_kappa_examples():
    assert abs(aggregate_kappa(HardwareProfile(0.1, 0.1)) - 0.1 * math.sqrt(2.0)) < 1e-12
    assert aggregate_kappa(HardwareProfile(0.08, 0.0)) == 0.08
    assert aggregate_kappa(HardwareProfile(0.0, 0.0)) == 0.0
    assert aggregate_kappa(HardwareProfile(0.1, 0.1)) >= 0.1  # >= max component
    with pytest.raises(ValueError):
        HardwareProfile(-0.1, 0.1)


def test_hop_derived_quantities():
    hop = Hop(p=2.0, n=0.5, alpha=3, beta=4.0, kappa=0.1)
    assert hop.avg_fading_power == 12.0
    assert hop.avg_snr == 2.0 * 12.0 / 0.5


def test_hop_validation():
    with pytest.raises(ValueError):
        Hop(p=0.0, n=1.0, alpha=1, beta=1.0)
    with pytest.raises(ValueError):
        Hop(p=1.0, n=-1.0, alpha=1, beta=1.0)
    with pytest.raises(ValueError):
        Hop(p=1.0, n=1.0, alpha=0, beta=1.0)
    with pytest.raises(ValueError):
        Hop(p=1.0, n=1.0, alpha=1, beta=0.0)
    with pytest.raises(ValueError):
        Hop(p=1.0, n=1.0, alpha=1, beta=1.0, kappa=-0.2)


def test_beta_for_target_snr_examples():
    assert beta_for_target_snr(Hop(p=1.0, n=1.0, alpha=2, beta=1.0), 100.0) == 50.0
    # dB input converted at the boundary, then inverted
    assert beta_for_target_snr(Hop(p=2.0, n=0.5, alpha=1, beta=1.0), db_to_linear(10.0)) == 2.5
    hop = Hop(p=3.0, n=0.7, alpha=4, beta=1.0)
    target = 123.456
    assert hop.with_snr(target).avg_snr == pytest.approx(target, rel=1e-15)
    with pytest.raises(ValueError):
        beta_for_target_snr(hop, 0.0)


def test_af_gain_examples():
    # degenerate no-noise variable gain: G = sqrt(P2/(P1*rho1)) with kappa=0
    sc = Scenario(
        hops=(Hop(p=1.0, n=1e-300, alpha=1, beta=1.0), Hop(p=1.0, n=1.0, alpha=1, beta=1.0)),
        protocol=Protocol.AF,
    )
    assert af_gain(sc, GainMode.VARIABLE, rho1=4.0) == pytest.approx(0.5, rel=1e-12)

    sc = af_scenario(alpha=1, snr_db=10.0, kappa=0.1)  # alpha*beta = 10, P=N=1
    assert af_gain(sc, GainMode.FIXED) == pytest.approx(math.sqrt(1.0 / 11.1), rel=1e-12)
    # variable gain at rho1 = mean fading power coincides with fixed gain
    assert af_gain(sc, GainMode.VARIABLE, rho1=10.0) == af_gain(sc, GainMode.FIXED)
    with pytest.raises(ValueError):
        af_gain(sc, GainMode.VARIABLE)
    with pytest.raises(ValueError):
        af_gain(df_scenario(), GainMode.FIXED)


def test_af_coefficients_examples():
    ideal = af_scenario(alpha=1, snr_db=0.0, kappa=0.0)  # P=N=1, any beta
    coef = af_coefficients(ideal, GainMode.VARIABLE)
    assert (coef.b1, coef.b2, coef.c, coef.d) == (1.0, 1.0, 1.0, 0.0)

    impaired = af_scenario(alpha=1, snr_db=0.0, kappa=0.1)
    coef = af_coefficients(impaired, GainMode.VARIABLE)
    assert coef.b1 == pytest.approx(1.01, rel=1e-12)
    assert coef.b2 == pytest.approx(1.01, rel=1e-12)
    assert coef.c == 1.0
    assert coef.d == pytest.approx(0.0201, rel=1e-12)

    fixed = af_scenario(alpha=1, snr_db=10.0, kappa=0.1)  # alpha*beta = 10
    coef = af_coefficients(fixed, GainMode.FIXED)
    assert coef.b1 == 0.0
    assert coef.b2 == pytest.approx(1.01, rel=1e-12)
    assert coef.c == pytest.approx(11.1, rel=1e-12)
    assert coef.d == pytest.approx(0.0201, rel=1e-12)
    with pytest.raises(ValueError):
        af_coefficients(df_scenario(), GainMode.FIXED)


def test_af_coefficients_validation():
    with pytest.raises(ValueError):
        AfCoefficients(b1=-1.0, b2=1.0, c=1.0, d=0.0)
    with pytest.raises(ValueError):
        AfCoefficients(b1=math.inf, b2=1.0, c=1.0, d=0.0)


def test_instantaneous_sndr_examples():
    df = df_scenario(alpha=1, snr_db=10.0, kappa=0.1)
    assert instantaneous_sndr(df, [10.0, 20.0]) == pytest.approx(10.0 / 1.1, rel=1e-12)

    ideal = af_scenario(alpha=1, snr_db=0.0, kappa=0.0)  # b1=b2=c=1, d=0
    assert instantaneous_sndr(ideal, [1.0, 1.0], GainMode.VARIABLE) == pytest.approx(1.0 / 3.0)


def test_af_sndr_approaches_ceiling_monotonically():
    sc = af_scenario(kappa=0.1)
    ceiling = 1.0 / sc.d
    previous = 0.0
    for k in range(1, 9):
        rho = 10.0**k
        value = instantaneous_sndr(sc, [rho, rho], GainMode.VARIABLE)
        assert previous < value < ceiling
        previous = value
    assert ceiling - previous < 1e-4 * ceiling


def test_sndr_hard_ceilings_random():
    rng = np.random.default_rng(10)
    sc = af_scenario(kappa=0.17, mode="variable")
    df = df_scenario(kappa=0.12)
    rho = rng.gamma(2.0, 50.0, size=(2, 2000))
    assert np.all(instantaneous_sndr(sc, [rho[0], rho[1]]) < 1.0 / sc.d)
    assert np.all(instantaneous_sndr(df, [rho[0], rho[1]]) < 1.0 / df.delta)


def test_ideal_reduction_bit_identical():
    # kappa=0 must reproduce the classical formulas exactly
    sc = af_scenario(alpha=2, snr_db=17.0, kappa=0.0)
    coef = af_coefficients(sc, GainMode.VARIABLE)
    hop1, hop2 = sc.hops
    rho1, rho2 = 3.7, 9.2
    classical = (rho1 * rho2) / (
        rho1 * hop2.n / hop2.p + rho2 * hop1.n / hop1.p + hop1.n * hop2.n / (hop1.p * hop2.p)
    )
    assert instantaneous_sndr(sc, [rho1, rho2], GainMode.VARIABLE) == classical
    assert coef.d == 0.0

    df = df_scenario(alpha=2, snr_db=17.0, kappa=0.0)
    assert instantaneous_sndr(df, [rho1, rho2]) == min(rho1, rho2) * 1.0


def test_variable_gain_symmetry():
    # swapping hops and gains leaves the variable-gain SNDR unchanged
    h1 = Hop(p=1.5, n=0.8, alpha=2, beta=30.0, kappa=0.12)
    h2 = Hop(p=0.9, n=1.1, alpha=3, beta=55.0, kappa=0.05)
    fwd = Scenario(hops=(h1, h2), protocol=Protocol.AF)
    rev = Scenario(hops=(h2, h1), protocol=Protocol.AF)
    a = instantaneous_sndr(fwd, [4.0, 7.0], GainMode.VARIABLE)
    b = instantaneous_sndr(rev, [7.0, 4.0], GainMode.VARIABLE)
    assert a == pytest.approx(b, rel=1e-14)


def test_d_and_delta_symmetric_in_hardware():
    sc = af_scenario()
    swapped = sc.with_kappas([0.23, 0.08])
    original = sc.with_kappas([0.08, 0.23])
    assert swapped.d == original.d
    assert swapped.delta == original.delta
    # delta <= d for two hops
    assert original.delta <= original.d


def test_scenario_shape_rules():
    hop = Hop(p=1.0, n=1.0, alpha=1, beta=1.0)
    with pytest.raises(ValueError):
        Scenario(hops=(hop,), protocol=Protocol.DF)
    with pytest.raises(ValueError):
        Scenario(hops=(hop, hop, hop), protocol=Protocol.AF)
    multi = Scenario(hops=(hop, hop, hop), protocol=Protocol.DF)
    with pytest.raises(ValueError):
        multi.d
    assert multi.delta == 0.0
    assert instantaneous_sndr(multi, [1.0, 2.0, 3.0]) == pytest.approx(1.0)


FLAT_DOC = {
    "protocol": "af",
    "mode": "variable",
    "hop1.p_watts": 1.0,
    "hop1.n_watts": 1.0,
    "hop1.alpha": 2,
    "hop1.snr_db": 20.0,
    "hop1.kappa": 0.1,
    "hop2.p_watts": 2.0,
    "hop2.n_watts": 0.5,
    "hop2.alpha": 3,
    "hop2.beta": 7.5,
    "hop2.kappa_t": 0.06,
    "hop2.kappa_r": 0.08,
}


def test_scenario_document_round_trip(tmp_path):
    scenario = scenario_from_mapping(FLAT_DOC)
    assert scenario.protocol is Protocol.AF
    assert scenario.mode is GainMode.VARIABLE
    assert scenario.hops[0].avg_snr == pytest.approx(100.0, rel=1e-12)
    assert scenario.hops[1].kappa == pytest.approx(0.1, rel=1e-12)

    again = scenario_from_mapping(scenario_to_mapping(scenario))
    assert again == scenario

    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario_to_mapping(scenario)))
    assert load_scenario(path) == scenario


@pytest.mark.parametrize(
    "mutation, fragment",
    [
        ({"protocol": None}, "protocol"),
        ({"protocol": "xy"}, "protocol"),
        ({"mode": "bogus"}, "mode"),
        ({"hop1.snr_db": None, "hop1.beta": None}, "beta / snr_db"),
        ({"hop1.beta": 3.0}, "beta / snr_db"),
        ({"hop2.kappa": 0.1}, "kappa"),
        ({"hop2.kappa_r": None}, "kappa"),
        ({"hop1.volts": 3.0}, "volts"),
        ({"voltage": 3.0}, "voltage"),
        ({"hop1.alpha": 2.5}, "alpha"),
    ],
)
def test_scenario_document_errors(mutation, fragment):
    doc = dict(FLAT_DOC)
    for key, value in mutation.items():
        if value is None:
            doc.pop(key, None)
        else:
            doc[key] = value
    with pytest.raises(ScenarioFormatError) as err:
        scenario_from_mapping(doc)
    assert fragment in str(err.value)


def test_scenario_document_noncontiguous_hops():
    doc = {"protocol": "df"}
    for i in (1, 3):
        doc.update({f"hop{i}.p_watts": 1.0, f"hop{i}.n_watts": 1.0,
                    f"hop{i}.alpha": 1, f"hop{i}.beta": 1.0, f"hop{i}.kappa": 0.0})
    with pytest.raises(ScenarioFormatError, match="contiguous"):
        scenario_from_mapping(doc)


def test_db_conversions_invertible():
    for value in (0.001, 0.5, 1.0, 31.0, 1e6):
        assert db_to_linear(linear_to_db(value)) == pytest.approx(value, rel=1e-12)
    assert linear_to_db(10.0) == pytest.approx(10.0, abs=1e-12)
    with pytest.raises(ValueError):
        linear_to_db(0.0)
