"""Wire-protocol conformance: the service must satisfy the same schemas
the pipeline's HTTP client validates against."""

import jsonschema
import pytest

from storm.providers import RESPONSE_SCHEMAS  # shared contract corpus

from storm_server.config import ROLES, ServerConfig, StartupError
from storm_server.registry import ModelRegistry


def post_ok(client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    assert response.status_code == 200, response.text
    body = response.json()
    jsonschema.validate(body, RESPONSE_SCHEMAS[path])
    return body


class TestHealth:
    def test_all_roles_ready(self, client):
        body = client.get("/v1/health").json()
        assert body["roles"] == {role: True for role in ROLES}


class TestInferEvents:
    def test_beam_cap_and_descending_scores(self, client):
        body = post_ok(client, "/v1/infer_events",
                       {"text": "jenny lived in florida", "relations": ["xWant", "xNeed"], "beam": 5})
        for relation in ("xWant", "xNeed"):
            rows = [r for r in body["results"] if r["relation"] == relation]
            assert len(rows) <= 5
            scores = [r["score"] for r in rows]
            assert scores == sorted(scores, reverse=True)

    def test_beam_zero_rejected(self, client):
        response = client.post("/v1/infer_events",
                               json={"text": "x", "relations": ["xWant"], "beam": 0})
        assert response.status_code == 422

    def test_reproducible_without_sampling(self, client):
        payload = {"text": "jenny lived in florida", "relations": ["xWant"], "beam": 3}
        first = post_ok(client, "/v1/infer_events", payload)
        second = post_ok(client, "/v1/infer_events", payload)
        assert first["results"] == second["results"]


class TestInfill:
    def test_zero_mask_template_echoes_with_zero_score(self, client):
        body = post_ok(client, "/v1/infill", {"context": "c", "template": "jenny swam today"})
        assert body["filled"] == "jenny swam today"
        assert body["score"] == 0.0

    def test_masks_are_resolved(self, client):
        body = post_ok(client, "/v1/infill",
                       {"context": "jenny lived in florida", "template": "jenny <mask> swam <mask>"})
        assert "<mask>" not in body["filled"]
        assert body["filled"].strip()
        assert body["score"] <= 0.0

    def test_deterministic(self, client):
        payload = {"context": "", "template": "jenny <mask> swam"}
        assert post_ok(client, "/v1/infill", payload) == post_ok(client, "/v1/infill", payload)


class TestScore:
    def test_logprob_array_matches_continuation_token_count(self, client):
        # The shared tokenizer is word-level, so tokens == words here.
        continuation = "jenny swam in the sea"
        body = post_ok(client, "/v1/score",
                       {"context": "jenny lived in florida", "continuation": continuation})
        assert len(body["token_logprobs"]) == len(continuation.split())
        assert all(value <= 0.0 for value in body["token_logprobs"])

    def test_empty_context_allowed(self, client):
        body = post_ok(client, "/v1/score", {"context": "", "continuation": "jenny swam"})
        assert len(body["token_logprobs"]) == 2


class TestSimilarity:
    def test_matrix_shape_and_range(self, client):
        body = post_ok(client, "/v1/similarity",
                       {"a": ["go to beach", "swim"], "b": ["enjoy sunshine", "go to beach", "sea"]})
        matrix = body["matrix"]
        assert len(matrix) == 2 and all(len(row) == 3 for row in matrix)
        assert all(0.0 <= value <= 1.0 for row in matrix for value in row)

    def test_self_similarity_is_one(self, client):
        body = post_ok(client, "/v1/similarity", {"a": ["go to beach"], "b": ["go to beach"]})
        assert body["matrix"][0][0] == pytest.approx(1.0, abs=1e-6)


class TestSrl:
    def test_schema_and_frame_shape(self, client):
        body = post_ok(client, "/v1/srl", {"sentence": "jenny lived in florida"})
        for record in body["records"]:
            assert record["frame"] == record["frame"].upper()
            assert isinstance(record["args"], dict)

    def test_empty_sentence_yields_no_records(self, client):
        body = post_ok(client, "/v1/srl", {"sentence": ""})
        assert body["records"] == []


class TestRequestId:
    def test_echoed_when_present(self, client):
        body = post_ok(client, "/v1/score",
                       {"context": "", "continuation": "jenny swam", "request_id": "abc-1"})
        assert body["request_id"] == "abc-1"


class TestStartup:
    def test_missing_role_names_the_role(self, tmp_path, model_dir):
        partial = tmp_path / "partial"
        partial.mkdir()
        for role in ROLES:
            if role != "similarity":
                (partial / role).symlink_to(model_dir / role)
        with pytest.raises(StartupError, match="similarity"):
            ModelRegistry(ServerConfig(model_dir=partial))

    def test_model_dir_env_required(self, monkeypatch):
        monkeypatch.delenv("STORM_MODEL_DIR", raising=False)
        with pytest.raises(StartupError, match="STORM_MODEL_DIR"):
            ServerConfig.from_env()
