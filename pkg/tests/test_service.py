"""HTTP API contracts: shapes, filters, error codes, determinism."""

from __future__ import annotations

import json

import jsonschema
import pytest
from fastapi.testclient import TestClient

from fednlp import service
from fednlp.corpus import save_corpus
from fednlp.errors import ArtifactVersionError

NUMBER = {"type": "number"}
STRING = {"type": "string"}
INTEGER = {"type": "integer"}

SUMMARY_VIEW_SCHEMA = {
    "type": "object",
    "required": ["id", "title", "author", "category", "date",
                 "word_count", "financial_polarity"],
    "additionalProperties": False,
    "properties": {
        "id": STRING,
        "title": STRING,
        "author": STRING,
        "category": {"enum": ["speech", "minutes", "transcript", "press_release"]},
        "date": {"type": "string", "pattern": r"^\d{4}-\d{2}-\d{2}$"},
        "word_count": INTEGER,
        "financial_polarity": NUMBER,
    },
}

SENTIMENT_SCHEMA = {
    "type": "object",
    "required": ["polarity", "subjectivity", "category_counts", "token_count"],
    "properties": {
        "polarity": NUMBER,
        "subjectivity": NUMBER,
        "category_counts": {
            "type": "object",
            "additionalProperties": INTEGER,
            "minProperties": 7,
        },
        "token_count": INTEGER,
    },
}

ANALYZE_SCHEMA = {
    "type": "object",
    "required": ["results", "timing_ms"],
    "additionalProperties": False,
    "properties": {
        "results": {"type": "object"},
        "timing_ms": {"type": "object", "additionalProperties": NUMBER},
    },
}


@pytest.fixture(scope="module")
def client(engine):
    return TestClient(service.create_app(engine))


class TestHealth:
    def test_ok_with_model(self, client):
        r = client.get("/api/health")
        assert r.status_code == 200
        body = r.json()
        assert body["status"] == "ok"
        assert body["model_version"] == 1

    def test_model_version_null_without_model(self, synth_corpus, tmp_path):
        docs, _ = synth_corpus
        save_corpus(docs[:5], tmp_path / "c.json")
        eng = service.build_engine(tmp_path / "c.json")
        r = TestClient(service.create_app(eng)).get("/api/health")
        assert r.json() == {"status": "ok", "model_version": None}


class TestAuthors:
    def test_sorted_with_counts(self, client, synth_corpus):
        docs, _ = synth_corpus
        r = client.get("/api/authors")
        assert r.status_code == 200
        rows = r.json()
        names = [a["name"] for a in rows]
        assert names == sorted(names)
        assert sum(a["doc_count"] for a in rows) == len(docs)
        for a in rows:
            assert a["doc_count"] >= 1


class TestDocuments:
    def test_listing_schema_and_no_bodies(self, client, synth_corpus):
        docs, _ = synth_corpus
        r = client.get("/api/documents")
        rows = r.json()
        assert len(rows) == len(docs)
        for row in rows:
            jsonschema.validate(row, SUMMARY_VIEW_SCHEMA)

    def test_sorted_by_date_descending(self, client):
        rows = client.get("/api/documents").json()
        dates = [row["date"] for row in rows]
        assert dates == sorted(dates, reverse=True)

    def test_author_filter(self, client, synth_corpus):
        docs, _ = synth_corpus
        author = docs[0].author
        rows = client.get(f"/api/documents?author={author}").json()
        expected = sum(1 for d in docs if d.author == author)
        assert len(rows) == expected
        assert all(row["author"] == author for row in rows)

    def test_category_filter(self, client, synth_corpus):
        docs, _ = synth_corpus
        rows = client.get("/api/documents?category=speech").json()
        assert len(rows) == sum(1 for d in docs if d.category.value == "speech")

    def test_date_range_filter(self, client, synth_corpus):
        docs, _ = synth_corpus
        rows = client.get("/api/documents?from=2015-02-01&to=2015-02-10").json()
        assert len(rows) == 10
        assert all("2015-02-01" <= row["date"] <= "2015-02-10" for row in rows)

    def test_listing_stays_small_per_document(self, client, synth_corpus):
        docs, _ = synth_corpus
        payload = client.get("/api/documents").content
        # Budget from the contract: 1000 documents under 1 MB.
        assert len(payload) / len(docs) < 1_000_000 / 1000


class TestExtension:
    def test_known_id(self, client, synth_corpus):
        docs, _ = synth_corpus
        r = client.get(f"/api/documents/{docs[0].id}/extension")
        assert r.status_code == 200
        body = r.json()
        assert set(body) == {"id", "body", "precomputed"}
        assert body["body"] == docs[0].body
        pre = body["precomputed"]
        assert {"term_stats", "sentiment_generic", "sentiment_financial",
                "summary", "prediction", "explanation"} <= set(pre)
        jsonschema.validate(pre["sentiment_generic"], SENTIMENT_SCHEMA)
        jsonschema.validate(pre["sentiment_financial"], SENTIMENT_SCHEMA)
        assert pre["prediction"]["label"] in {"lower", "maintain", "raise"}

    def test_unknown_id(self, client):
        r = client.get("/api/documents/nope/extension")
        assert r.status_code == 404
        assert "error" in r.json()


class TestFfr:
    def test_points_shape(self, client, synth_corpus):
        _, ffr = synth_corpus
        r = client.get("/api/ffr")
        points = r.json()["points"]
        assert len(points) == len(ffr.points)
        assert set(points[0]) == {"date", "lower_bound", "decision"}
        dates = [p["date"] for p in points]
        assert dates == sorted(dates)


class TestSentimentSeries:
    def test_author_series(self, client, synth_corpus):
        docs, _ = synth_corpus
        author = docs[0].author
        r = client.get(f"/api/sentiment-series?author={author}")
        body = r.json()
        assert body["author"] == author
        assert len(body["points"]) == sum(1 for d in docs if d.author == author)
        for p in body["points"]:
            assert -1.0 <= p["polarity"] <= 1.0

    def test_author_required(self, client):
        assert client.get("/api/sentiment-series").status_code == 422

    def test_unknown_author_empty(self, client):
        body = client.get("/api/sentiment-series?author=Nobody").json()
        assert body["points"] == []


class TestTopicsRoute:
    def test_payload_shape(self, client, small_topics):
        r = client.get("/api/topics")
        body = r.json()
        assert body["k"] == small_topics.k
        assert len(body["topics"]) == small_topics.k
        for topic in body["topics"]:
            assert len(topic["terms"]) <= 30
            probs = [t["p"] for t in topic["terms"]]
            assert probs == sorted(probs, reverse=True)
        assert len(body["doc_topics"]) == len(small_topics.doc_ids)
        for mix in body["doc_topics"]:
            assert sum(mix["mixture"]) == pytest.approx(1.0, abs=1e-9)

    def test_absent_topics_404(self, synth_corpus, tmp_path):
        docs, _ = synth_corpus
        save_corpus(docs[:5], tmp_path / "c.json")
        eng = service.build_engine(tmp_path / "c.json")
        r = TestClient(service.create_app(eng)).get("/api/topics")
        assert r.status_code == 404
        assert "error" in r.json()


class TestAnalyze:
    BODY = {
        "text": "The committee will raise rates. Markets expect tightening soon.",
        "tasks": ["stats", "sentiment", "summary", "predict", "explain",
                  "topics_assign"],
    }

    def test_full_response(self, client):
        r = client.post("/api/nlp/analyze", json=self.BODY)
        assert r.status_code == 200
        body = r.json()
        jsonschema.validate(body, ANALYZE_SCHEMA)
        assert set(body["results"]) == set(self.BODY["tasks"])
        assert set(body["timing_ms"]) == set(self.BODY["tasks"])
        stats = body["results"]["stats"]
        assert stats["word_count"] == 9
        assert stats["sentence_count"] == 2
        sent = body["results"]["sentiment"]
        jsonschema.validate(sent["generic"], SENTIMENT_SCHEMA)
        jsonschema.validate(sent["financial"], SENTIMENT_SCHEMA)
        assert body["results"]["predict"]["label"] in {"lower", "maintain", "raise"}
        assert sum(body["results"]["predict"]["probs"]) == pytest.approx(1.0)
        assert sum(body["results"]["topics_assign"]["mixture"]) == pytest.approx(1.0)

    def test_tasks_deduplicated(self, client):
        r = client.post("/api/nlp/analyze",
                        json={"text": "Rates rose.", "tasks": ["stats", "stats"]})
        assert r.status_code == 200
        assert list(r.json()["results"]) == ["stats"]

    def test_explain_class_matches_prediction(self, client):
        r = client.post("/api/nlp/analyze",
                        json={"text": "hawkish-token tightening-signal words",
                              "tasks": ["predict", "explain"]})
        body = r.json()["results"]
        assert body["explain"]["class"] == body["predict"]["label"]

    def test_neutral_text_zero_polarities(self, client):
        r = client.post("/api/nlp/analyze",
                        json={"text": "qqq www eee", "tasks": ["sentiment"]})
        body = r.json()["results"]["sentiment"]
        assert body["generic"]["polarity"] == 0.0
        assert body["financial"]["polarity"] == 0.0

    @pytest.mark.parametrize("body", [
        {"tasks": ["stats"]},
        {"text": "", "tasks": ["stats"]},
        {"text": "   ", "tasks": ["stats"]},
        {"text": 7, "tasks": ["stats"]},
        {"text": "ok"},
        {"text": "ok", "tasks": []},
        {"text": "ok", "tasks": "stats"},
        {"text": "ok", "tasks": ["nope"]},
    ])
    def test_bad_requests_400(self, client, body):
        r = client.post("/api/nlp/analyze", json=body)
        assert r.status_code == 400
        assert "error" in r.json()

    def test_unknown_task_named(self, client):
        r = client.post("/api/nlp/analyze", json={"text": "ok", "tasks": ["vibe"]})
        assert "vibe" in r.json()["error"]

    def test_oversize_413(self, client):
        r = client.post("/api/nlp/analyze",
                        json={"text": "x" * 200_001, "tasks": ["stats"]})
        assert r.status_code == 413

    def test_at_limit_ok(self, client):
        r = client.post("/api/nlp/analyze",
                        json={"text": "y" * 200_000, "tasks": ["stats"]})
        assert r.status_code == 200

    def test_invalid_json_400(self, client):
        r = client.post("/api/nlp/analyze", content=b"{not json",
                        headers={"content-type": "application/json"})
        assert r.status_code == 400

    def test_non_object_body_400(self, client):
        r = client.post("/api/nlp/analyze", json=[1, 2, 3])
        assert r.status_code == 400

    def test_byte_identical_modulo_timing(self, client):
        def stripped(raw: bytes) -> bytes:
            payload = json.loads(raw)
            payload.pop("timing_ms")
            return json.dumps(payload, sort_keys=True).encode()

        a = client.post("/api/nlp/analyze", json=self.BODY).content
        b = client.post("/api/nlp/analyze", json=self.BODY).content
        assert stripped(a) == stripped(b)

    def test_task_failure_is_per_task(self, synth_corpus, tmp_path):
        # No model loaded: predict/explain fail per-task, stats still works.
        docs, _ = synth_corpus
        save_corpus(docs[:5], tmp_path / "c.json")
        eng = service.build_engine(tmp_path / "c.json")
        r = TestClient(service.create_app(eng)).post(
            "/api/nlp/analyze",
            json={"text": "Rates rose.", "tasks": ["stats", "predict"]},
        )
        assert r.status_code == 200
        results = r.json()["results"]
        assert results["stats"]["word_count"] == 2
        assert "error" in results["predict"]


class TestStoreIo:
    def test_round_trip(self, synth_corpus, tmp_path):
        docs, ffr = synth_corpus
        path = tmp_path / "store.json"
        service.save_store(docs[:10], {d.id: {"x": 1} for d in docs[:10]},
                           ffr, path)
        loaded_docs, loaded_ffr, pre = service.load_store(path)
        assert loaded_docs == docs[:10]
        assert loaded_ffr == ffr
        assert pre[docs[0].id] == {"x": 1}

    def test_raw_corpus_array_accepted(self, synth_corpus, tmp_path):
        docs, _ = synth_corpus
        path = tmp_path / "corpus.json"
        save_corpus(docs[:5], path)
        loaded_docs, loaded_ffr, pre = service.load_store(path)
        assert loaded_docs == docs[:5]
        assert loaded_ffr is None
        assert pre == {}

    def test_rerun_byte_identical(self, synth_corpus, tmp_path):
        docs, ffr = synth_corpus
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        service.save_store(docs[:10], {}, ffr, p1)
        service.save_store(docs[:10], {}, ffr, p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestTopicsArtifact:
    def test_round_trip(self, small_topics, tmp_path):
        path = tmp_path / "topics.json"
        service.save_topics(small_topics, path)
        loaded = service.load_topics(path)
        assert loaded.vocabulary == small_topics.vocabulary
        assert loaded.topic_word == small_topics.topic_word
        assert loaded.doc_topic == small_topics.doc_topic
        assert loaded.doc_ids == small_topics.doc_ids
        assert loaded.config == small_topics.config

    def test_version_checked(self, small_topics, tmp_path):
        path = tmp_path / "topics.json"
        service.save_topics(small_topics, path)
        payload = json.loads(path.read_text())
        payload["format_version"] = 12
        path.write_text(json.dumps(payload))
        with pytest.raises(ArtifactVersionError):
            service.load_topics(path)


class TestEngineImmutability:
    def test_engine_is_frozen(self, engine):
        with pytest.raises(AttributeError):
            engine.seed = 99
