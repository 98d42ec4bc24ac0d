import pytest
from fastapi.testclient import TestClient

from facihub.api import create_app

from conftest import ts

ALL_PASS = {"role_task_alignment": "pass", "interactional_appropriateness": "pass",
            "factual_plausibility": "pass"}


@pytest.fixture
def client(engine_factory):
    engine = engine_factory(targeting={"fraction": 1.0})
    return TestClient(create_app(engine)), engine


def seeded_client(client):
    api, engine = client
    body = open("src/facihub/fixtures/sample_log.ndjson", "rb").read()
    assert api.post("/api/ingest", content=body).status_code == 200
    api.post("/api/runs", json={"as_of": "2025-12-03T00:00:00Z"})
    return api, engine


def test_healthz(client):
    api, engine = client
    response = api.get("/healthz")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["version"] == engine.version


def test_unknown_route_has_machine_readable_error(client):
    api, _ = client
    response = api.get("/api/not-a-route")
    assert response.status_code == 404
    assert response.json()["error"]["code"] == "not_found"


def test_ingest_reports_counts(client):
    api, _ = client
    body = open("src/facihub/fixtures/sample_log.ndjson", "rb").read()
    response = api.post("/api/ingest", content=body + body)
    assert response.status_code == 200
    payload = response.json()
    assert payload["accepted"] == 20
    assert payload["duplicates_dropped"] == 20


def test_run_returns_manifest(client):
    api, _ = seeded_client(client)
    response = api.post("/api/runs", json={"as_of": "2025-12-03T01:00:00Z"})
    assert response.status_code == 200
    body = response.json()
    assert set(body) >= {"as_of", "window", "n_network", "n_learner_reply",
                         "n_emitted", "n_filtered_out", "assignment_delta"}


def test_queue_lists_pending_with_thread_context(client):
    api, engine = seeded_client(client)
    response = api.get("/api/queue")
    pending = response.json()["pending"]
    assert len(pending) == len(engine.board.pending()) > 0
    card = pending[0]
    assert card["status"] == "pending"
    assert "thread" in card and "post" in card["thread"]


def test_candidate_detail_and_decision_roundtrip(client):
    api, engine = seeded_client(client)
    cid = api.get("/api/queue").json()["pending"][0]["candidate_id"]
    detail = api.get(f"/api/candidates/{cid}")
    assert detail.status_code == 200
    assert detail.json()["candidate_id"] == cid

    response = api.post(f"/api/candidates/{cid}/decision", json={
        "decision": "accept", "dimension_flags": ALL_PASS, "reviewer_id": "rev1",
        "decided_at": "2025-12-03T02:00:00Z"})
    assert response.status_code == 200
    assert response.json()["decision"] == "accept"
    assert engine.board.get_candidate(cid).status == "accepted"


def test_accept_with_failing_dimension_is_422(client):
    api, _ = seeded_client(client)
    cid = api.get("/api/queue").json()["pending"][0]["candidate_id"]
    flags = dict(ALL_PASS, factual_plausibility="fail")
    response = api.post(f"/api/candidates/{cid}/decision", json={
        "decision": "accept", "dimension_flags": flags, "reviewer_id": "rev1"})
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "validation_error"


def test_incomplete_checklist_is_422_with_field_errors(client):
    api, _ = seeded_client(client)
    cid = api.get("/api/queue").json()["pending"][0]["candidate_id"]
    response = api.post(f"/api/candidates/{cid}/decision", json={
        "decision": "accept", "dimension_flags": {"role_task_alignment": "pass"},
        "reviewer_id": "rev1"})
    assert response.status_code == 422
    assert "dimension_flags" in response.json()["error"]["field_errors"]


def test_second_decision_conflicts_with_winning_record(client):
    api, _ = seeded_client(client)
    cid = api.get("/api/queue").json()["pending"][0]["candidate_id"]
    api.post(f"/api/candidates/{cid}/decision", json={
        "decision": "accept", "dimension_flags": ALL_PASS, "reviewer_id": "rev1",
        "decided_at": "2025-12-03T02:00:00Z"})
    second = api.post(f"/api/candidates/{cid}/decision", json={
        "decision": "reject",
        "dimension_flags": dict(ALL_PASS, factual_plausibility="fail"),
        "reviewer_id": "rev2"})
    assert second.status_code == 409
    error = second.json()["error"]
    assert error["code"] == "conflict"
    assert error["existing"]["reviewer_id"] == "rev1"


def test_malformed_decision_payload_is_422(client):
    api, _ = seeded_client(client)
    response = api.post("/api/candidates/x/decision", json={"decision": "accept"})
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "validation_error"


def test_publish_and_metrics_flow(client):
    api, engine = seeded_client(client)
    for card in api.get("/api/queue").json()["pending"]:
        api.post(f"/api/candidates/{card['candidate_id']}/decision", json={
            "decision": "accept", "dimension_flags": ALL_PASS,
            "reviewer_id": "rev1", "decided_at": "2025-12-03T02:00:00Z"})
    published = api.post("/api/publish", json={
        "published_at": "2025-12-03T03:00:00Z"}).json()["published"]
    assert published
    assert set(engine.board.published_candidate_ids()) == \
        {p["candidate_id"] for p in published}
    metrics = api.get("/api/metrics/acceptance").json()
    assert metrics["overall_rate"] == 1.0
    assert metrics["pending"] == 0


def test_analysis_endpoints(client):
    api, engine = seeded_client(client)
    for card in api.get("/api/queue").json()["pending"]:
        api.post(f"/api/candidates/{card['candidate_id']}/decision", json={
            "decision": "accept", "dimension_flags": ALL_PASS,
            "reviewer_id": "rev1", "decided_at": "2025-12-03T02:00:00Z"})
    api.post("/api/publish", json={"published_at": "2025-12-03T03:00:00Z"})

    balance = api.get("/api/analysis/balance")
    assert balance.status_code == 200
    assert any(r["metric"] == "mean_posting_hour" for r in balance.json()["rows"])

    permutation = api.get("/api/analysis/permutation",
                          params={"indicator": "SP_total", "n_permutations": 50,
                                  "seed": 3})
    assert permutation.status_code == 200
    assert permutation.json()["n_permutations"] == 50

    goal2 = api.get("/api/analysis/goal2")
    assert goal2.status_code in (200, 422)  # tiny fixture may lack a group
    goal1 = api.get("/api/analysis/goal1")
    # Sample fixture has few learners in both conditions; accept either a
    # report or a structured analysis error.
    assert goal1.status_code in (200, 422)
    if goal1.status_code == 200:
        assert len(goal1.json()["rows"]) == 9


def test_api_token_guard(engine_factory):
    engine = engine_factory(api_token="secret-token")
    api = TestClient(create_app(engine))
    assert api.get("/api/queue").status_code == 401
    ok = api.get("/api/queue", headers={"Authorization": "Bearer secret-token"})
    assert ok.status_code == 200
    assert api.get("/healthz").status_code == 200  # liveness is unguarded
