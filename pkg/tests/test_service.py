import math

import pytest

from ddsim.analysis import REFERENCE_DECAYS, curve_to_csv, generate_curve
from ddsim.cli import InProcessClient
from ddsim.qasm import validate_qasm


class Client(InProcessClient):
    def get(self, path):
        import asyncio

        import httpx

        async def go():
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(transport=transport, base_url="http://t") as c:
                return await c.get(path)

        return asyncio.run(go())


@pytest.fixture(scope="module")
def client():
    return Client()


def small_spec(seed=5):
    return {
        "schema": "ddsim/experiment/v1",
        "kind": "TYPE1_SWEEP",
        "sequences": [{"family": "FREE"}, {"family": "XY4"}],
        "pulse_counts": [0, 4, 8],
        "noise": {
            "name": "lb",
            "qubit_params": [
                {"qubit_index": 0, "t1_us": 44.3, "t2_us": 70.0,
                 "gate_error": 0.002, "readout_error": 0.05}
            ],
            "lindblad": True,
            "readout": True,
            "gate_depolarizing_from_table": True,
        },
        "qubits": [0],
        "shots": 256,
        "seed": seed,
    }


class TestHealth:
    def test_health(self, client):
        r = client.get("/health")
        assert r.status_code == 200
        body = r.json()
        assert body["status"] == "ok"


class TestSimulate:
    def test_returns_records_and_manifest(self, client):
        r = client.post("/simulate", json={"spec": small_spec()})
        assert r.status_code == 200
        body = r.json()
        assert body["record_count"] == 2 * 3 * 16
        assert body["records_csv"].startswith("sequence,tau,qubit,state,n_pulses")
        assert body["manifest"]["spec"]["kind"] == "TYPE1_SWEEP"

    def test_same_seed_byte_identical(self, client):
        a = client.post("/simulate", json={"spec": small_spec()}).json()
        b = client.post("/simulate", json={"spec": small_spec()}).json()
        assert a["records_csv"] == b["records_csv"]

    def test_seed_override_changes_results(self, client):
        a = client.post("/simulate", json={"spec": small_spec(), "seed": 1}).json()
        b = client.post("/simulate", json={"spec": small_spec(), "seed": 2}).json()
        assert a["records_csv"] != b["records_csv"]
        assert a["manifest"]["seed"] == 1

    def test_schema_violation_gives_422_with_pointer(self, client):
        bad = small_spec()
        bad["pulse_counts"] = [4, 2]
        r = client.post("/simulate", json={"spec": bad})
        assert r.status_code == 422
        detail = r.json()["detail"]
        assert detail[0]["loc"] == "/pulse_counts/1"


class TestFit:
    def test_fit_curve_csv(self, client):
        ref = REFERENCE_DECAYS["ibmqx5-free"]
        curve = generate_curve(ref.as_fit(), ref.n_grid())
        r = client.post("/fit", json={"curve_csv": curve_to_csv(curve)})
        assert r.status_code == 200
        fit = r.json()["fit"]
        assert abs(fit["lambda"] - 28.9) / 28.9 < 1e-4
        assert abs(fit["gamma"] - 0.73) < 1e-3

    def test_fit_from_records(self, client):
        spec = small_spec()
        spec["pulse_counts"] = [0, 4, 8, 12, 16, 20]
        sim = client.post("/simulate", json={"spec": spec}).json()
        r = client.post(
            "/fit",
            json={"records_csv": sim["records_csv"], "label": "XY4@theta00", "tau": 1},
        )
        assert r.status_code == 200, r.text

    def test_fit_needs_input(self, client):
        r = client.post("/fit", json={})
        assert r.status_code == 422


class TestAnalysisEndpoints:
    def test_intersect(self, client):
        free = REFERENCE_DECAYS["ibmqx5-free"].as_fit().to_dict()
        dd = REFERENCE_DECAYS["ibmqx5-dd"].as_fit().to_dict()
        r = client.post(
            "/intersect",
            json={"fit_free": free, "fit_dd": dd, "resamples": 200, "seed": 3},
        )
        body = r.json()["result"]
        assert body["found"]
        assert 98 <= body["t_int"] <= 118

    def test_bootstrap(self, client):
        r = client.post(
            "/bootstrap", json={"samples": [0.5] * 30, "resamples": 200, "seed": 1}
        )
        body = r.json()
        assert body["mean"] == 0.5
        assert body["ci_halfwidth"] == 0.0

    def test_bound_with_constant(self, client):
        grid = [
            {"tau_ns": 90.0 * k, "n_pulses": 8, "fidelity": 1 - 1e-6 * k**2}
            for k in (1, 2, 3)
        ]
        r = client.post("/bound", json={"grid": grid, "bound_constant": 1.0})
        body = r.json()["analysis"]
        assert body["satisfied"]
        assert len(body["rows"]) == 1

    def test_bound_needs_constant_or_bath(self, client):
        grid = [{"tau_ns": 90.0, "n_pulses": 4, "fidelity": 0.99}]
        r = client.post("/bound", json={"grid": grid})
        assert r.status_code == 422

    def test_verify_dd(self, client):
        r = client.post(
            "/verify-dd",
            json={"family": "XY4", "coupling": "random", "trials": 30, "seed": 2},
        )
        body = r.json()
        assert body["max_relative"] < 1e-12
        assert body["n_labels"] == 4

    def test_report(self, client):
        sim = client.post("/simulate", json={"spec": small_spec()}).json()
        r = client.post("/report", json={"records_csv": sim["records_csv"], "resamples": 100})
        text = r.json()["report_csv"]
        assert text.startswith("sequence,N,tau,mean_fidelity,ci_halfwidth")


class TestQasmEndpoint:
    def test_single_qubit_cell(self, client):
        r = client.post(
            "/export-qasm",
            json={"family": "XY4", "n_pulses": 4, "theta": math.pi / 2},
        )
        text = r.json()["qasm"]
        validate_qasm(text)
        assert "u3(" in text and "x q[0];" in text

    def test_bell_cell(self, client):
        r = client.post(
            "/export-qasm", json={"family": "XY4", "n_pulses": 4, "bell": "phi+"}
        )
        text = r.json()["qasm"]
        validate_qasm(text)
        assert "cx q[0],q[1];" in text

    def test_needs_initial_state(self, client):
        r = client.post("/export-qasm", json={"family": "XY4", "n_pulses": 4})
        assert r.status_code == 422
