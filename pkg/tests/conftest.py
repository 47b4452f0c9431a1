"""Shared scenario builders and the in-process service client."""

import warnings

import pytest

from relaylimits.model import GainMode, Hop, Protocol, Scenario, db_to_linear


def af_scenario(alpha=2, snr_db=20.0, kappa=0.1, mode=None, p=1.0, n=1.0):
    """Symmetric two-hop AF scenario at the given per-hop average SNR."""
    beta = n * db_to_linear(snr_db) / (p * alpha)
    hop = Hop(p=p, n=n, alpha=alpha, beta=beta, kappa=kappa)
    return Scenario(hops=(hop, hop), protocol=Protocol.AF,
                    mode=GainMode(mode) if mode else None)


def df_scenario(alpha=2, snr_db=20.0, kappa=0.1, snr2_db=None, p=1.0, n=1.0):
    beta1 = n * db_to_linear(snr_db) / (p * alpha)
    beta2 = n * db_to_linear(snr2_db if snr2_db is not None else snr_db) / (p * alpha)
    hop1 = Hop(p=p, n=n, alpha=alpha, beta=beta1, kappa=kappa)
    hop2 = Hop(p=p, n=n, alpha=alpha, beta=beta2, kappa=kappa)
    return Scenario(hops=(hop1, hop2), protocol=Protocol.DF)


@pytest.fixture(scope="session")
def client():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from relaylimits.service import app

    with TestClient(app) as test_client:
        yield test_client
