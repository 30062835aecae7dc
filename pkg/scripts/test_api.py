"""
Tests for the pricing API
"""

import json

import pytest
from fastapi.testclient import TestClient

from main import app

client = TestClient(app)

EXAMPLE = {
    "s0": 100,
    "u": 0.2,
    "d": -0.1,
    "r": 0.04,
    "steps": 2,
    "payoff": {"kind": "Call", "strike": 105},
}


def scenario(**changes):
    data = json.loads(json.dumps(EXAMPLE))
    data.update(changes)
    return data


def test_health():
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy", "service": "lattice-pricer"}


def test_root():
    assert client.get("/").json()["docs"] == "/docs"


def test_price():
    response = client.post("/api/pricing/price", json=EXAMPLE)
    assert response.status_code == 200
    assert response.json()["numeraire"] == pytest.approx(2247 / 225, abs=1e-12)


def test_price_with_verify():
    response = client.post("/api/pricing/price", params={"verify": True}, json=EXAMPLE)
    assert response.json()["verify_delta"] < 1e-12


def test_barrier_payoff():
    body = scenario(
        payoff={
            "kind": "BarrierOption",
            "level": 120,
            "direction": "up",
            "knock": "out",
            "inner": {"kind": "Call", "strike": 100},
        }
    )
    response = client.post("/api/pricing/price", json=body)
    assert response.status_code == 200
    assert response.json()["method"] == "path_enumeration"


def test_hedge():
    body = scenario(steps=3)
    del body["payoff"]
    response = client.post("/api/pricing/hedge", params={"trajectory": "0,0,1"}, json=body)
    assert response.status_code == 200
    rows = response.json()["rows"]
    assert [row["time"] for row in rows] == [0, 1, 2, 3]
    assert rows[-1]["wealth"] == 1.0


def test_hedge_length_mismatch():
    response = client.post("/api/pricing/hedge", params={"trajectory": "1"}, json=EXAMPLE)
    assert response.status_code == 422
    assert response.json()["detail"]["error"] == "TrajectoryLengthMismatch"


def test_digital_off_lattice():
    body = scenario(payoff={"kind": "DigitalAt", "strike": 100})
    response = client.post("/api/pricing/digital", json=body)
    assert response.status_code == 400
    detail = response.json()["detail"]
    assert detail["success"] is False
    assert detail["error"] == "StrikeOffLattice"
    assert detail["details"]["field"] == "strike"


def test_price_digital_off_lattice():
    body = scenario(payoff={"kind": "DigitalAt", "strike": 103})
    response = client.post("/api/pricing/price", json=body)
    assert response.status_code == 400
    assert response.json()["detail"]["error"] == "StrikeOffLattice"


def test_invariance():
    body = scenario(payoff={"kind": "DigitalAt", "strike": 108})
    response = client.post("/api/pricing/invariance", params={"counterexample": True}, json=body)
    report = response.json()
    assert [row["total"] for row in report["rows"]] == pytest.approx([1.0] * 3)
    assert report["counterexample"] == pytest.approx([1.0, 3.0])


def test_converge():
    body = {
        "s0": 100,
        "bsm": {"mu": 0.1, "sigma": 0.2, "r": 0.04, "horizon": 1, "dt": 1 / 365},
        "step_counts": [16, 64],
    }
    response = client.post("/api/pricing/converge", json=body)
    assert response.status_code == 200
    assert len(response.json()["rows"]) == 2


def test_walk():
    body = scenario(payoff={"kind": "DigitalAt", "strike": 108}, mc_paths=10000, seed=1)
    report = client.post("/api/pricing/walk", json=body).json()
    assert report["exact"] == pytest.approx(112 / 225)
    assert report["seed"] == 1


def test_schema_errors():
    both = scenario(bsm={"mu": 0.1, "sigma": 0.2, "r": 0.04, "horizon": 1, "dt": 0.5})
    assert client.post("/api/pricing/price", json=both).status_code == 422
    unknown = scenario(payoff={"kind": "Straddle"})
    assert client.post("/api/pricing/price", json=unknown).status_code == 422


def test_input_error_from_engine():
    response = client.post("/api/pricing/price", json=scenario(u=-0.2))
    assert response.status_code == 422
    detail = response.json()["detail"]
    assert detail["error"] == "InvalidParameters"
    assert detail["details"]["field"] == "u"
