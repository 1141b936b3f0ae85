import copy

import pytest
from fastapi.testclient import TestClient

from conftest import CUSTOM_TENANT_REQUEST, typed_request
from nsaas.engine import SliceEngine
from nsaas.gateway import create_app


@pytest.fixture
def client(config):
    app = create_app(engine=SliceEngine(config))
    return TestClient(app)


class TestSubmit:
    def test_custom_request_deploys_active(self, client):
        response = client.post("/slices", json=CUSTOM_TENANT_REQUEST)
        assert response.status_code == 201
        body = response.json()
        assert body["state"] == "Active"
        assert body["scenario"] == "urllc"

    def test_missing_nst_is_400_with_field_path(self, client):
        response = client.post("/slices", json={"name": "x"})
        assert response.status_code == 400
        assert response.json()["details"]["field_path"] == "NST"

    def test_resubmission_returns_same_id(self, client):
        first = client.post("/slices", json=CUSTOM_TENANT_REQUEST)
        again = client.post("/slices", json=CUSTOM_TENANT_REQUEST)
        assert again.status_code == 200
        assert again.json()["id"] == first.json()["id"]
        assert again.json()["duplicate"] is True

    def test_unsatisfiable_requirements_422(self, client):
        payload = copy.deepcopy(CUSTOM_TENANT_REQUEST)
        payload["NST"]["Slice Attributes"]["SSQ"]["Packet Delay Budget"] = 2e-8
        response = client.post("/slices", json=payload)
        assert response.status_code == 422
        assert response.json()["code"] == "no_match"

    def test_deploy_failure_500_with_trace(self, client):
        client.app.state.engine.infra.arm_failure("2.7")
        response = client.post("/slices", json=typed_request("urllc"))
        assert response.status_code == 500
        body = response.json()
        assert body["code"] == "domain_deploy_failure"
        assert body["trace_id"]


class TestReadPaths:
    def test_get_unknown_404(self, client):
        assert client.get("/slices/nsi-404").status_code == 404

    def test_list_and_get_consistent_with_inventory(self, client):
        created = client.post("/slices", json=typed_request("urllc")).json()
        snapshot = client.get(f"/slices/{created['id']}").json()
        assert snapshot["state"] == "Active"
        engine = client.app.state.engine
        assert snapshot == engine.inventory.get(created["id"])
        listing = client.get("/slices").json()["slices"]
        assert any(s["id"] == created["id"] for s in listing)

    def test_metrics_shape(self, client):
        client.post("/slices", json=typed_request("embb"))
        metrics = client.get("/metrics").json()
        assert "usage" in metrics and "slices" in metrics
        assert metrics["config_digest"]


class TestLifecycleVerbs:
    def test_reconfigure_202_and_availability_trace(self, client):
        created = client.post("/slices", json=typed_request("embb")).json()
        response = client.post(f"/slices/{created['id']}/reconfigure",
                               json={"vcpu_request": 0.4})
        assert response.status_code == 202
        trace_path = response.json()["availability_trace"]
        trace = client.get(trace_path).json()
        values = [t["value"] for t in trace["transitions"]]
        assert 0 in values and values[-1] == 1

    def test_reconfigure_unknown_404(self, client):
        response = client.post("/slices/nsi-404/reconfigure", json={})
        assert response.status_code == 404

    def test_delete_twice_both_204(self, client):
        created = client.post("/slices", json=typed_request("urllc")).json()
        assert client.delete(f"/slices/{created['id']}").status_code == 204
        assert client.delete(f"/slices/{created['id']}").status_code == 204

    def test_delete_unknown_404(self, client):
        assert client.delete("/slices/nsi-404").status_code == 404


class TestExperimentEndpoint:
    def test_unknown_name_404(self, client):
        assert client.get("/experiments/nope").status_code == 404

    def test_deployment_times_csv(self, client):
        response = client.get("/experiments/deployment-times")
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/csv")
        assert "urllc" in response.text
