import json
import threading

import pytest
from fastapi.testclient import TestClient

from noteqa.gateway import RetryPolicy
from noteqa.qa import HistoryLog, QaEngine
from noteqa.server import create_app
from noteqa.stub import StubFailure, StubReply

from .conftest import make_gateway


@pytest.fixture
def app_client(store, tmp_path):
    def build(script=None, seed=0, retry_policy=None, history_path=None):
        gw, stub = make_gateway(
            script=script,
            seed=seed,
            retry_policy=retry_policy or RetryPolicy(base_delay=0.0),
        )
        history = HistoryLog(history_path or tmp_path / "history.jsonl")
        engine = QaEngine(store, gw, history=history)
        app = create_app(store, engine, history)
        return TestClient(app, raise_server_exceptions=False), stub, history

    return build


class TestNotesEndpoints:
    def test_list_notes(self, app_client, store):
        client, _, _ = app_client()
        resp = client.get("/api/notes")
        assert resp.status_code == 200
        body = resp.json()
        assert len(body) == 3
        assert set(body[0]) == {"id", "title", "body_preview"}

    def test_get_note_full_body(self, app_client, store):
        client, _, _ = app_client()
        resp = client.get("/api/notes/n1")
        assert resp.status_code == 200
        assert resp.json()["body"] == store.get_note("n1").body

    def test_get_note_404(self, app_client):
        client, _, _ = app_client()
        resp = client.get("/api/notes/zzz")
        assert resp.status_code == 404
        assert resp.json() == {"code": "note_not_found", "message": resp.json()["message"]}
        assert "zzz" in resp.json()["message"]


class TestQaEndpoint:
    def test_valid_round(self, app_client, store):
        client, _, _ = app_client(script=[StubReply("Sertraline 50mg")])
        resp = client.post("/api/qa", json={"note_id": "n3", "question": "med?"})
        assert resp.status_code == 200
        data = resp.json()
        assert data["verbatim"] is True
        body = store.get_note("n3").body
        assert body[data["start"] : data["end"]] == "Sertraline 50mg"

    def test_empty_question_422(self, app_client):
        client, _, _ = app_client()
        resp = client.post("/api/qa", json={"note_id": "n1", "question": "   "})
        assert resp.status_code == 422
        assert resp.json()["code"] == "empty_question"

    def test_missing_question_422(self, app_client):
        client, _, _ = app_client()
        resp = client.post("/api/qa", json={"note_id": "n1"})
        assert resp.status_code == 422
        assert resp.json()["code"] == "empty_question"

    def test_unknown_note_404(self, app_client):
        client, _, _ = app_client()
        resp = client.post("/api/qa", json={"note_id": "zzz", "question": "q?"})
        assert resp.status_code == 404
        assert resp.json()["code"] == "note_not_found"

    def test_upstream_failure_502(self, app_client):
        client, stub, _ = app_client(
            script=[StubFailure()] * 10,
            retry_policy=RetryPolicy(max_attempts=3, base_delay=0),
        )
        resp = client.post("/api/qa", json={"note_id": "n1", "question": "q?"})
        assert resp.status_code == 502
        assert resp.json()["code"] == "upstream_llm_failure"
        assert stub.chat_calls == 3

    def test_retry_then_success(self, app_client):
        client, stub, _ = app_client(
            script=[StubFailure(), StubFailure(), StubReply("Sertraline 50mg")],
            retry_policy=RetryPolicy(max_attempts=5, base_delay=0),
        )
        resp = client.post("/api/qa", json={"note_id": "n3", "question": "q?"})
        assert resp.status_code == 200
        assert stub.chat_calls == 3

    def test_malformed_body_is_api_error_shape(self, app_client):
        client, _, _ = app_client()
        resp = client.post(
            "/api/qa", content=b"{bad json", headers={"content-type": "application/json"}
        )
        assert resp.status_code == 422
        assert set(resp.json()) == {"code", "message"}


class TestSuggestionsEndpoint:
    def test_default_four(self, app_client):
        client, _, _ = app_client()  # stub returns non-JSON -> templates
        resp = client.get("/api/notes/n1/suggestions")
        assert resp.status_code == 200
        assert len(resp.json()) == 4

    def test_n_two(self, app_client):
        payload = json.dumps(["Q1?", "Q2?"])
        client, _, _ = app_client(script=[StubReply(payload)])
        resp = client.get("/api/notes/n1/suggestions?n=2")
        assert resp.json() == ["Q1?", "Q2?"]

    def test_garbage_never_5xx(self, app_client):
        client, _, _ = app_client(script=[StubReply("not json at all")])
        resp = client.get("/api/notes/n1/suggestions")
        assert resp.status_code == 200
        assert len(resp.json()) == 4

    def test_unknown_note(self, app_client):
        client, _, _ = app_client()
        assert client.get("/api/notes/zzz/suggestions").status_code == 404

    def test_n_out_of_range(self, app_client):
        client, _, _ = app_client()
        resp = client.get("/api/notes/n1/suggestions?n=11")
        assert resp.status_code == 422
        assert resp.json()["code"] == "invalid_request"


class TestHistoryEndpoints:
    def test_history_grows_and_orders(self, app_client):
        client, _, _ = app_client()
        client.post("/api/qa", json={"note_id": "n1", "question": "first?"})
        client.post("/api/qa", json={"note_id": "n2", "question": "second?"})
        records = client.get("/api/history").json()
        assert [r["question"] for r in records] == ["first?", "second?"]

    def test_export_attachment(self, app_client):
        client, _, _ = app_client()
        client.post("/api/qa", json={"note_id": "n1", "question": "q?"})
        resp = client.get("/api/history/export")
        assert resp.status_code == 200
        disposition = resp.headers["content-disposition"]
        assert disposition.startswith("attachment")
        assert ".json" in disposition
        assert len(resp.json()) == 1

    def test_empty_history_export(self, app_client):
        client, _, _ = app_client()
        resp = client.get("/api/history/export")
        assert resp.json() == []

    def test_restart_restores_history(self, app_client, tmp_path):
        path = tmp_path / "persist.jsonl"
        client, _, _ = app_client(history_path=path)
        client.post("/api/qa", json={"note_id": "n1", "question": "persisted?"})
        # new app over the same file
        client2, _, _ = app_client(history_path=path)
        records = client2.get("/api/history").json()
        assert [r["question"] for r in records] == ["persisted?"]

    def test_concurrent_qa_makes_clean_jsonl(self, app_client, tmp_path):
        path = tmp_path / "concurrent.jsonl"
        client, _, _ = app_client(history_path=path)
        n = 30

        def fire(i):
            resp = client.post("/api/qa", json={"note_id": "n1", "question": f"q{i}?"})
            assert resp.status_code == 200

        threads = [threading.Thread(target=fire, args=(i,)) for i in range(n)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        lines = path.read_text().splitlines()
        assert len(lines) == n
        for line in lines:
            json.loads(line)


class TestErrorShapes:
    def test_unknown_api_path(self, app_client):
        client, _, _ = app_client()
        resp = client.get("/api/nothing")
        assert resp.status_code == 404
        assert set(resp.json()) == {"code", "message"}

    def test_all_error_bodies_conform(self, app_client):
        client, _, _ = app_client(
            script=[StubFailure()] * 10, retry_policy=RetryPolicy(max_attempts=2, base_delay=0)
        )
        cases = [
            client.get("/api/notes/zzz"),
            client.post("/api/qa", json={"note_id": "n1", "question": ""}),
            client.post("/api/qa", json={"question": "q?"}),
            client.post("/api/qa", json={"note_id": "n1", "question": "q?"}),
            client.get("/api/nowhere"),
        ]
        for resp in cases:
            assert resp.status_code >= 400
            body = resp.json()
            assert set(body) == {"code", "message"}, body
