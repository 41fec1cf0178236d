"""HTTP/JSON service: session lifecycle, optimistic concurrency, derived results."""

import copy
import json
import threading

import pytest
from fastapi.testclient import TestClient

from modelrank.service import ServiceError, create_app

QUALITY_LABELS = ["fitness", "precision", "generalization"]
INCONSISTENT_ENTRIES = [[1.0, 1.0, 0.33], [1.0, 1.0, 2.0], [3.0, 0.5, 1.0]]


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "sessions")
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture()
def session(client, bundled):
    response = client.post("/problems", json=bundled.document)
    assert response.status_code == 201
    return response.json()


class TestCreateAndGet:
    def test_create_returns_id_and_version(self, session):
        assert session["version"] == 1
        assert len(session["id"]) == 16

    def test_invalid_document_rejected_422(self, client, bundled):
        document = copy.deepcopy(bundled.document)
        document["weights"]["top_level"]["values"] = [0.5, 0.25, 0.35]
        response = client.post("/problems", json=document)
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "validation_failed"
        assert "sum 1.10" in body["message"]
        assert set(body) == {"code", "message", "location"}

    def test_unknown_field_rejected_with_location(self, client, bundled):
        document = copy.deepcopy(bundled.document)
        document["surprise"] = True
        response = client.post("/problems", json=document)
        assert response.status_code == 422
        assert response.json()["code"] == "invalid_scenario"
        assert "surprise" in response.json()["message"]

    def test_get_returns_document_and_derived(self, client, session, bundled):
        response = client.get(f"/problems/{session['id']}")
        assert response.status_code == 200
        body = response.json()
        assert body["version"] == 1
        assert body["document"] == bundled.document
        derived = body["derived"]
        assert derived["sub_weights"]["quality"]["values"] == [0.57, 0.22, 0.21]
        assert any("stakeholder-3" in w for w in derived["warnings"])
        reports = {s["stakeholder"]: s for s in derived["stakeholders"]["quality"]}
        assert reports["stakeholder-3"]["consistency"]["acceptable"] is False

    def test_unknown_session_404(self, client):
        response = client.get("/problems/deadbeef")
        assert response.status_code == 404
        assert response.json()["code"] == "not_found"

    def test_sessions_listed(self, client, session):
        response = client.get("/problems")
        ids = [p["id"] for p in response.json()["problems"]]
        assert session["id"] in ids

    def test_sessions_persist_across_restart(self, tmp_path, bundled):
        data_dir = tmp_path / "persisted"
        with TestClient(create_app(data_dir)) as first:
            created = first.post("/problems", json=bundled.document).json()
        with TestClient(create_app(data_dir)) as second:
            response = second.get(f"/problems/{created['id']}")
            assert response.status_code == 200
            assert response.json()["version"] == 1


class TestRanking:
    def test_bundled_ranking(self, client, session):
        response = client.get(f"/problems/{session['id']}/ranking")
        body = response.json()
        assert body["retained"] == ["411", "412", "413", "422", "532"]
        assert len(body["eliminated"]) == 22
        top = body["breakdowns"][0]
        assert top["alternative_id"] == "411"
        assert abs(top["total"] - 0.818201883) < 1e-8
        assert top["rank"] == 1

    def test_ranking_is_pure_per_version(self, client, session):
        first = client.get(f"/problems/{session['id']}/ranking")
        second = client.get(f"/problems/{session['id']}/ranking")
        assert first.content == second.content


class TestOptimisticConcurrency:
    def put_weights(self, client, session_id, version, values):
        return client.put(
            f"/problems/{session_id}/weights",
            json={"top_level": {"labels": ["quality", "throughput", "risk"],
                                "values": values}},
            headers={"If-Match": str(version)},
        )

    def test_mutation_without_if_match_is_428(self, client, session):
        response = client.put(
            f"/problems/{session['id']}/weights",
            json={"top_level": {"labels": ["quality", "throughput", "risk"],
                                "values": [0.5, 0.25, 0.25]}},
        )
        assert response.status_code == 428
        assert response.json()["location"] == "If-Match"

    def test_stale_version_is_409_and_state_unchanged(self, client, session):
        response = self.put_weights(client, session["id"], 99, [0.5, 0.25, 0.25])
        assert response.status_code == 409
        assert response.json()["code"] == "version_conflict"
        current = client.get(f"/problems/{session['id']}").json()
        assert current["version"] == 1
        assert current["document"]["weights"]["top_level"]["values"] == [0.4, 0.25, 0.35]

    def test_successful_mutation_bumps_version_by_one(self, client, session):
        response = self.put_weights(client, session["id"], 1, [0.5, 0.25, 0.25])
        assert response.status_code == 200
        assert response.json()["version"] == 2

    def test_read_your_writes(self, client, session):
        self.put_weights(client, session["id"], 1, [0.5, 0.25, 0.25])
        body = client.get(f"/problems/{session['id']}").json()
        assert body["document"]["weights"]["top_level"]["values"] == [0.5, 0.25, 0.25]
        assert body["version"] == 2

    def test_same_if_match_twice_second_conflicts(self, client, session):
        first = self.put_weights(client, session["id"], 1, [0.5, 0.25, 0.25])
        second = self.put_weights(client, session["id"], 1, [0.3, 0.35, 0.35])
        assert first.status_code == 200
        assert second.status_code == 409

    def test_concurrent_conflicting_mutations_one_wins(self, tmp_path, bundled):
        app = create_app(tmp_path / "race")
        store = app.state.store
        session = store.create(bundled.document)
        barrier = threading.Barrier(2)
        outcomes = []

        def mutate(value):
            def transform(document):
                document["objective"] = value
                return document
            barrier.wait()
            try:
                store.mutate(session.id, 1, transform)
                outcomes.append("ok")
            except ServiceError as exc:
                outcomes.append(exc.status)

        threads = [threading.Thread(target=mutate, args=(f"goal {k}",)) for k in range(2)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert sorted(outcomes, key=str) == [409, "ok"]
        assert store.get(session.id).version == 2

    def test_invalid_mutation_rejected_and_state_unchanged(self, client, session):
        response = self.put_weights(client, session["id"], 1, [0.9, 0.25, 0.35])
        assert response.status_code == 422
        assert client.get(f"/problems/{session['id']}").json()["version"] == 1


class TestJudgmentElicitation:
    def test_put_judgments_recomputes_weights_and_reports_cr(self, client, session):
        response = client.put(
            f"/problems/{session['id']}/judgments/stakeholder-3",
            json={"labels": QUALITY_LABELS, "entries": INCONSISTENT_ENTRIES},
            headers={"If-Match": "1"},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["version"] == 2
        assert body["criterion"] == "quality"
        assert body["consistency"]["cr"] == pytest.approx(0.3204, abs=1e-3)
        assert body["consistency"]["acceptable"] is False
        assert any("stakeholder-3" in w for w in body["warnings"])
        # the literal vector is superseded by the recomputed group mean
        values = body["weights"]["values"]
        assert values == pytest.approx([0.567116, 0.223440, 0.209444], abs=1e-5)

    def test_ranking_tracks_judgment_updates(self, client, session, bundled):
        client.put(
            f"/problems/{session['id']}/judgments/stakeholder-3",
            json={"labels": QUALITY_LABELS, "entries": INCONSISTENT_ENTRIES},
            headers={"If-Match": "1"},
        )
        body = client.get(f"/problems/{session['id']}/ranking").json()
        top = body["breakdowns"][0]
        assert top["alternative_id"] == "411"
        assert round(top["total"], 3) == 0.818  # derived weights shift totals below 1e-3

    def test_malformed_judgment_body_rejected(self, client, session):
        response = client.put(
            f"/problems/{session['id']}/judgments/s1",
            json={"labels": QUALITY_LABELS},
            headers={"If-Match": "1"},
        )
        assert response.status_code == 400


class TestKnockoutMutation:
    def test_tightened_rule_shrinks_retained_set(self, client, session):
        response = client.put(
            f"/problems/{session['id']}/knockouts",
            json={"knockouts": [
                {"criterion": "fitness", "predicate": ">=", "threshold": 0.9997}
            ]},
            headers={"If-Match": "1"},
        )
        assert response.status_code == 200
        ranking = client.get(f"/problems/{session['id']}/ranking").json()
        assert ranking["retained"] == ["412", "413", "422"]

    def test_dropping_all_rules_fails_validation_when_metrics_are_sparse(self, client, session):
        # 22 alternatives carry no throughput or risk values and are
        # only admissible because screening removes them; a rule set
        # that stops removing them must be rejected, state unchanged
        response = client.put(
            f"/problems/{session['id']}/knockouts",
            json={"knockouts": []},
            headers={"If-Match": "1"},
        )
        assert response.status_code == 422
        assert "missing value" in response.json()["message"]
        assert client.get(f"/problems/{session['id']}").json()["version"] == 1


class TestSensitivityEndpoint:
    def test_sweep_response(self, client, session):
        response = client.post(
            f"/problems/{session['id']}/sensitivity",
            json={"criterion": "throughput", "grid": 101},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["baseline_weight"] == pytest.approx(0.25)
        assert body["stability_interval"]["lower"] == 0.0
        assert body["stability_interval"]["upper"] == pytest.approx(0.2684, abs=1e-3)
        assert len(body["sweep"]) == 101
        tops = [point["ranking"][0] for point in body["sweep"]]
        assert tops[0] == "411" and tops[-1] == "532"

    def test_unknown_criterion_rejected(self, client, session):
        response = client.post(
            f"/problems/{session['id']}/sensitivity", json={"criterion": "latency"})
        assert response.status_code == 422
        assert response.json()["code"] == "unknown_criterion"

    def test_sampling_requires_seed(self, client, session):
        response = client.post(
            f"/problems/{session['id']}/sensitivity",
            json={"criterion": "throughput", "samples": 1000},
        )
        assert response.status_code == 422
        assert response.json()["code"] == "missing_seed"

    def test_sampling_with_seed_is_deterministic(self, client, session):
        payload = {"criterion": "throughput", "grid": 11, "samples": 2000, "seed": 5}
        first = client.post(f"/problems/{session['id']}/sensitivity", json=payload)
        second = client.post(f"/problems/{session['id']}/sensitivity", json=payload)
        assert first.json()["sampling"] == second.json()["sampling"]
        frequencies = first.json()["sampling"]["frequencies"]
        assert sum(frequencies.values()) == pytest.approx(1.0)
