"""HTTP endpoint contracts, driven through the in-process ASGI client."""

import pytest

from relaylimits.model import GainMode
from relaylimits.outage import outage_af_closed
from conftest import af_scenario

AF_SCENARIO = {
    "protocol": "af",
    "mode": "variable",
    "hops": [
        {"alpha": 2, "snr_db": 20.0, "kappa": 0.1},
        {"alpha": 2, "snr_db": 20.0, "kappa": 0.1},
    ],
}
DF_SCENARIO = {
    "protocol": "df",
    "hops": [
        {"alpha": 2, "snr_db": 20.0, "kappa": 0.1},
        {"alpha": 2, "snr_db": 20.0, "kappa": 0.1},
    ],
}


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_outage_closed_matches_library(client):
    response = client.post("/outage", json={"scenario": AF_SCENARIO, "x_lin": 3.0})
    assert response.status_code == 200
    body = response.json()
    expected = outage_af_closed(af_scenario(alpha=2, snr_db=20.0, kappa=0.1), 3.0,
                                GainMode.VARIABLE)
    assert body["value"] == pytest.approx(expected, rel=1e-12)
    assert body["saturated"] is False
    assert body["std_error"] is None


def test_outage_x_db_and_saturation(client):
    response = client.post("/outage", json={"scenario": AF_SCENARIO, "x_db": 20.0})
    assert response.json()["x_lin"] == pytest.approx(100.0)
    assert response.json()["saturated"] is True
    assert response.json()["value"] == 1.0


def test_outage_mc_fields(client):
    response = client.post(
        "/outage",
        json={"scenario": DF_SCENARIO, "x_lin": 3.0, "evaluator": "mc",
              "mc_samples": 20_000, "seed": 3},
    )
    body = response.json()
    assert body["n_samples"] == 20_000
    assert body["std_error"] > 0.0
    assert len(body["ci95"]) == 2


def test_outage_threshold_validation(client):
    both = client.post("/outage", json={"scenario": AF_SCENARIO, "x_lin": 3.0, "x_db": 4.0})
    assert both.status_code == 400
    neither = client.post("/outage", json={"scenario": AF_SCENARIO})
    assert neither.status_code == 400


def test_bad_scenario_is_usage_error(client):
    broken = {"protocol": "af", "mode": "variable",
              "hops": [{"alpha": 2, "snr_db": 20.0, "beta": 5.0, "kappa": 0.1}] * 2}
    response = client.post("/outage", json={"scenario": broken, "x_lin": 3.0})
    assert response.status_code == 400
    assert "beta / snr_db" in response.json()["detail"]


def test_capacity_kinds(client):
    values = {}
    for kind in ("exact", "upper", "approx"):
        response = client.post("/capacity", json={"scenario": AF_SCENARIO, "kind": kind})
        assert response.status_code == 200
        values[kind] = response.json()["value_bits"]
    assert values["upper"] >= values["exact"] - 1e-6
    mc = client.post("/capacity", json={"scenario": AF_SCENARIO, "kind": "mc",
                                        "mc_samples": 20_000, "seed": 1}).json()
    assert abs(mc["value_bits"] - values["exact"]) <= 4.0 * mc["std_error"]
    df_approx = client.post("/capacity", json={"scenario": DF_SCENARIO, "kind": "approx"})
    assert df_approx.status_code == 400


def test_ceilings_endpoint(client):
    body = client.post("/ceilings", json={"protocol": "af", "kappa1": 0.15,
                                          "kappa2": 0.15}).json()
    assert body["sndr_ceiling"] == pytest.approx(21.975, abs=1e-3)
    assert body["unbounded"] is False
    ideal = client.post("/ceilings", json={"protocol": "df", "kappa1": 0.0,
                                           "kappa2": 0.0}).json()
    assert ideal["unbounded"] is True
    assert ideal["sndr_ceiling"] is None and ideal["capacity_ceiling"] is None


def test_allocation_endpoint(client):
    body = client.post("/design/allocation", json={"t_max": 0.6}).json()
    assert body["evm_per_chain"] == pytest.approx(0.15)
    assert body["kappa1"] == pytest.approx(0.21213, abs=1e-5)
    assert body["df"]["sndr_ceiling"] > body["af"]["sndr_ceiling"]
    table = client.post("/design/allocation", json={
        "t_max": 16.0, "cost_table_kappa": [0.05, 0.1, 0.2], "cost_table_cost": [8.0, 4.0, 2.0],
    }).json()
    assert table["evm_per_chain"] == pytest.approx(0.1)
    half = client.post("/design/allocation", json={"t_max": 1.0, "cost_table_kappa": [0.1, 0.2]})
    assert half.status_code == 400


def test_necessary_kappa_endpoint(client):
    by_rate = client.post("/design/necessary-kappa", json={"rate": 2.0}).json()
    assert by_rate["x_lin"] == 15.0
    assert by_rate["af_kappa_max"] == pytest.approx(0.181096, abs=1e-6)
    assert by_rate["df_kappa_max"] == pytest.approx(0.258199, abs=1e-6)
    assert by_rate["condition"] == "necessary"
    both = client.post("/design/necessary-kappa", json={"rate": 2.0, "x_lin": 15.0})
    assert both.status_code == 400


def test_sweep_endpoint(client):
    spec = {
        "axis": "snr_db", "start": 0.0, "stop": 20.0, "steps": 3,
        "scenario": AF_SCENARIO, "evaluators": ["closed", "quadrature"], "x_lin": 3.0,
    }
    body = client.post("/sweep", json=spec).json()
    assert body["row_count"] == 6
    assert body["csv"].startswith("figure_id,protocol,mode,evaluator,")
    assert body["csv"].count("\n") == 7


def test_figure_endpoint(client):
    body = client.post("/figures/fig7", json={"seed": 0}).json()
    assert set(body["files"]) == {"fig7.csv", "fig7.meta"}
    missing = client.post("/figures/fig99", json={})
    assert missing.status_code == 400


def test_validate_endpoint(client):
    body = client.post("/validate", json={"n_scenarios": 6, "seed": 2,
                                          "mc_samples": 20_000}).json()
    assert body["passed"] is True
    assert body["n_cases"] == 6
    assert body["max_abs_closed_vs_quadrature"] < 1e-8
