"""Record service responses the webapp tests run against.

Builds two engines (one fully loaded, one with no model/topics) over small
synthetic corpora, hits the real HTTP routes, and writes the exact JSON
bodies to tests/fixtures/.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from fednlp import classifier, service, topics
from fednlp.corpus import save_corpus, save_ffr_series, tokenize_document
from fednlp.synthetic import make_synthetic

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

DEMO_TEXT = (
    "The committee observed hawkish-token pressure and a clear overheat-flag "
    "in recent data. Members favored tightening-signal steps at the next "
    "meeting. Markets had already priced in most of the move."
)


def build_store(tmp: Path, n_docs: int, with_model: bool) -> service.Engine:
    tmp.mkdir(parents=True, exist_ok=True)
    docs, ffr = make_synthetic(n_docs=n_docs, seed=7)
    save_corpus(docs, tmp / "corpus.json")
    save_ffr_series(ffr, tmp / "ffr.json")
    model_path = None
    topics_path = None
    if with_model:
        ordered = sorted(docs, key=lambda d: (d.date, d.id))
        n_test = max(1, round(len(ordered) * 0.2))
        model = classifier.train(ordered[:-n_test],
                                 classifier.GbdtConfig(n_rounds=40, seed=0))
        classifier.save(model, tmp / "model.bin")
        model_path = tmp / "model.bin"
        lda = topics.fit_lda(
            [tokenize_document(d) for d in docs],
            topics.LdaConfig(k=3, n_iterations=80, burn_in=30, seed=0),
            min_count=3,
        )
        service.save_topics(lda, tmp / "topics.json")
        topics_path = tmp / "topics.json"
    return service.build_engine(
        tmp / "corpus.json",
        model_path=model_path,
        topics_path=topics_path,
        ffr_path=tmp / "ffr.json",
        seed=0,
    )


def record(client: TestClient, name: str, method: str, url: str,
           body: dict | None = None) -> dict:
    if method == "GET":
        response = client.get(url)
    else:
        response = client.post(url, json=body)
    payload = response.json()
    out = FIXTURES / f"{name}.json"
    out.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    print(f"{name}.json  <-  {method} {url}  ({response.status_code})")
    return payload


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    import tempfile

    with tempfile.TemporaryDirectory() as tmpdir:
        tmp = Path(tmpdir)
        full = build_store(tmp / "full", n_docs=120, with_model=True)
        full.by_id  # engine built

        client = TestClient(service.create_app(full))
        record(client, "health", "GET", "/api/health")
        authors = record(client, "authors", "GET", "/api/authors")
        author = authors[0]["name"]
        record(client, "documents", "GET", f"/api/documents?author={author}")
        record(client, "documents_speech", "GET",
               f"/api/documents?author={author}&category=speech")
        record(client, "ffr", "GET", "/api/ffr")
        record(client, "sentiment_series", "GET",
               f"/api/sentiment-series?author={author}")
        record(client, "topics", "GET", "/api/topics")

        tasks = ["stats", "sentiment", "summary", "topics_assign",
                 "predict", "explain"]
        analyze = record(client, "analyze_full", "POST", "/api/nlp/analyze",
                         {"text": DEMO_TEXT, "tasks": tasks})
        label = analyze["results"]["predict"]["label"]
        if label != "raise":
            print(f"expected planted text to predict 'raise', got {label!r}",
                  file=sys.stderr)
            return 1

        bare = build_store(tmp / "bare", n_docs=30, with_model=False)
        bare_client = TestClient(service.create_app(bare))
        errors = record(bare_client, "analyze_errors", "POST",
                        "/api/nlp/analyze", {"text": DEMO_TEXT, "tasks": tasks})
        for task in ("predict", "explain", "topics_assign"):
            if "error" not in errors["results"][task]:
                print(f"expected a per-task error for {task}", file=sys.stderr)
                return 1

        # Landing example corpus: an author with exactly three documents.
        small_docs, small_ffr = make_synthetic(n_docs=24, seed=3)
        three = sorted({d.author for d in small_docs})[0]
        picked = [d for d in small_docs if d.author == three][:3]
        others = [d for d in small_docs if d.author != three]
        save_corpus(picked + others, tmp / "three.json")
        save_ffr_series(small_ffr, tmp / "three_ffr.json")
        eng3 = service.build_engine(tmp / "three.json",
                                    ffr_path=tmp / "three_ffr.json", seed=0)
        c3 = TestClient(service.create_app(eng3))
        record(c3, "author3_documents", "GET", f"/api/documents?author={three}")
        record(c3, "author3_series", "GET",
               f"/api/sentiment-series?author={three}")

    print(f"fixtures in {FIXTURES}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
