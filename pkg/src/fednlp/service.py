"""HTTP service: content API over an ingested store plus live NLP analysis.

The engine bundles everything loaded at startup (documents, lexicons, model,
topic model, precomputed per-document analytics) and is immutable afterward;
request handlers only read it. Document listings carry lightweight records
only; full bodies travel on the per-document extension route.
"""

from __future__ import annotations

import datetime as _dt
import json
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from . import classifier, explain, summarize, topics
from .corpus import (
    Document,
    FfrSeries,
    TokenizedDoc,
    default_stopwords,
    document_to_record,
    load_corpus,
    load_ffr_series,
    record_to_document,
    term_stats,
    tokenize_document,
    tokenize_text,
)
from .errors import SchemaError
from .sentiment import (
    Lexicon,
    default_financial_lexicon,
    default_generic_lexicon,
    load_lexicon,
    score_document,
    sentiment_series,
)

STORE_FORMAT_VERSION = 1
MAX_ANALYZE_CHARS = 200_000
TASKS = ("stats", "sentiment", "summary", "topics_assign", "predict", "explain")
TOP_TERMS_K = 20


@dataclass(frozen=True)
class Engine:
    documents: tuple[Document, ...]
    by_id: dict[str, Document]
    tokenized: dict[str, TokenizedDoc]
    generic_lexicon: Lexicon
    financial_lexicon: Lexicon
    model: classifier.GbdtModel | None
    topic_model: topics.TopicModel | None
    ffr: FfrSeries | None
    precomputed: dict[str, dict]
    seed: int = 0
    word_counts: dict[str, int] = field(default_factory=dict)
    financial_polarity: dict[str, float] = field(default_factory=dict)


# --- store I/O ---------------------------------------------------------------


def save_store(
    docs: list[Document],
    precomputed: dict[str, dict],
    ffr: FfrSeries | None,
    path,
) -> None:
    payload = {
        "format_version": STORE_FORMAT_VERSION,
        "documents": [document_to_record(d) for d in docs],
        "ffr": None
        if ffr is None
        else [
            {
                "date": p.date.isoformat(),
                "lower_bound": p.lower_bound,
                "decision": p.decision.to_str(),
            }
            for p in ffr.points
        ],
        "precomputed": precomputed,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, separators=(",", ":"))


def load_store(path) -> tuple[list[Document], FfrSeries | None, dict[str, dict]]:
    """Read an ingested store; a plain corpus array is accepted too."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    if isinstance(data, list):
        return load_corpus(path), None, {}
    if not isinstance(data, dict) or "documents" not in data:
        raise SchemaError(f"{path}: expected a store object or a corpus array")
    docs = [record_to_document(r, i) for i, r in enumerate(data["documents"])]
    seen: set[str] = set()
    for d in docs:
        if d.id in seen:
            raise SchemaError(f"duplicate document id {d.id!r}")
        seen.add(d.id)
    ffr = None
    if data.get("ffr"):
        from .corpus import FfrPoint, RateDecision

        points = tuple(
            FfrPoint(
                date=_dt.date.fromisoformat(p["date"]),
                lower_bound=float(p["lower_bound"]),
                decision=RateDecision.from_str(p["decision"]),
            )
            for p in data["ffr"]
        )
        ffr = FfrSeries(points=points)
    precomputed = data.get("precomputed") or {}
    return docs, ffr, precomputed


# --- per-document precompute (ingest time) -----------------------------------


def precompute_document(
    doc: Document,
    generic: Lexicon,
    financial: Lexicon,
    model: classifier.GbdtModel | None,
    seed: int = 0,
) -> dict:
    """All landing-page analytics for one document."""
    tokenized = tokenize_document(doc)
    stats = term_stats(tokenized, default_stopwords(), TOP_TERMS_K)
    out: dict = {
        "term_stats": {
            "word_count": stats.word_count,
            "sentence_count": stats.sentence_count,
            "top_terms": [{"term": t, "count": c} for t, c in stats.top_terms],
        }
    }
    if tokenized.tokens:
        out["sentiment_generic"] = _score_payload(score_document(tokenized, generic))
        out["sentiment_financial"] = _score_payload(score_document(tokenized, financial))
        s = summarize.summarize(tokenized)
        out["summary"] = {
            "selected": list(s.selected),
            "text": s.text,
            "scores": list(s.scores),
        }
        if model is not None:
            pred = classifier.predict_proba_tokens(model, tokenized)
            out["prediction"] = {"probs": list(pred.probs), "label": pred.label.to_str()}
            expl = explain.explain_tokens(
                model, tokenized, cfg=explain.ExplainConfig(seed=seed)
            )
            out["explanation"] = explain.to_payload(expl)
    return out


def _score_payload(score) -> dict:
    return {
        "polarity": score.polarity,
        "subjectivity": score.subjectivity,
        "category_counts": score.category_counts,
        "token_count": score.token_count,
    }


# --- engine ------------------------------------------------------------------


def build_engine(
    corpus_path,
    model_path=None,
    topics_path=None,
    lexicon_generic=None,
    lexicon_financial=None,
    ffr_path=None,
    seed: int = 0,
) -> Engine:
    """Load every artifact the service needs; raises on the first failure."""
    docs, ffr, precomputed = load_store(corpus_path)
    if ffr_path is not None:
        ffr = load_ffr_series(ffr_path)
    generic = (
        default_generic_lexicon()
        if lexicon_generic is None
        else load_lexicon(lexicon_generic, "generic")
    )
    financial = (
        default_financial_lexicon()
        if lexicon_financial is None
        else load_lexicon(lexicon_financial, "financial")
    )
    model = None if model_path is None else classifier.load(model_path)
    topic_model = None if topics_path is None else load_topics(topics_path)

    tokenized = {d.id: tokenize_document(d) for d in docs}
    word_counts = {d.id: len(tokenized[d.id].tokens) for d in docs}
    polarity: dict[str, float] = {}
    for d in docs:
        pre = precomputed.get(d.id)
        if pre and "sentiment_financial" in pre:
            polarity[d.id] = pre["sentiment_financial"]["polarity"]
        elif tokenized[d.id].tokens:
            polarity[d.id] = score_document(tokenized[d.id], financial).polarity
        else:
            polarity[d.id] = 0.0
    return Engine(
        documents=tuple(docs),
        by_id={d.id: d for d in docs},
        tokenized=tokenized,
        generic_lexicon=generic,
        financial_lexicon=financial,
        model=model,
        topic_model=topic_model,
        ffr=ffr,
        precomputed=precomputed,
        seed=seed,
        word_counts=word_counts,
        financial_polarity=polarity,
    )


# --- topic artifact I/O (shared by cli and service) --------------------------

TOPICS_FORMAT_VERSION = 1


def save_topics(model: topics.TopicModel, path) -> None:
    cfg = model.config
    payload = {
        "format_version": TOPICS_FORMAT_VERSION,
        "config": {
            "k": cfg.k,
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "n_iterations": cfg.n_iterations,
            "burn_in": cfg.burn_in,
            "seed": cfg.seed,
        },
        "vocabulary": model.vocabulary,
        "topic_word": [list(map(float, row)) for row in model.topic_word],
        "doc_topic": [list(map(float, row)) for row in model.doc_topic],
        "doc_ids": list(model.doc_ids),
        "log_likelihood_trace": list(model.log_likelihood_trace),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, separators=(",", ":")))


def load_topics(path) -> topics.TopicModel:
    import numpy as np

    from .errors import ArtifactVersionError

    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except ValueError as exc:
            raise ArtifactVersionError(f"{path}: not a topics artifact ({exc})") from None
    version = payload.get("format_version") if isinstance(payload, dict) else None
    if version != TOPICS_FORMAT_VERSION:
        raise ArtifactVersionError(
            f"{path}: artifact format {version!r}, this build reads {TOPICS_FORMAT_VERSION}"
        )
    return topics.TopicModel(
        config=topics.LdaConfig(**payload["config"]),
        vocabulary={str(k): int(v) for k, v in payload["vocabulary"].items()},
        topic_word=tuple(tuple(float(x) for x in row) for row in payload["topic_word"]),
        doc_topic=tuple(tuple(float(x) for x in row) for row in payload["doc_topic"]),
        doc_ids=tuple(payload["doc_ids"]),
        log_likelihood_trace=tuple(payload["log_likelihood_trace"]),
    )


def topics_payload(model: topics.TopicModel, terms_per_topic: int = 30) -> dict:
    return {
        "k": model.k,
        "topics": [
            {
                "id": t,
                "terms": [
                    {"term": term, "p": p}
                    for term, p in topics.topic_terms(model, t, terms_per_topic)
                ],
            }
            for t in range(model.k)
        ],
        "doc_topics": [
            {"doc_id": doc_id, "mixture": [float(x) for x in model.doc_topic[i]]}
            for i, doc_id in enumerate(model.doc_ids)
        ],
    }


# --- analyze -----------------------------------------------------------------


def _run_task(engine: Engine, task: str, tokenized: TokenizedDoc) -> dict:
    if task == "stats":
        stats = term_stats(tokenized, default_stopwords(), TOP_TERMS_K)
        return {
            "word_count": stats.word_count,
            "sentence_count": stats.sentence_count,
            "top_terms": [{"term": t, "count": c} for t, c in stats.top_terms],
        }
    if task == "sentiment":
        return {
            "generic": _score_payload(score_document(tokenized, engine.generic_lexicon)),
            "financial": _score_payload(
                score_document(tokenized, engine.financial_lexicon)
            ),
        }
    if task == "summary":
        s = summarize.summarize(tokenized)
        return {"selected": list(s.selected), "text": s.text, "scores": list(s.scores)}
    if task == "topics_assign":
        if engine.topic_model is None:
            raise RuntimeError("no topic model loaded")
        mixture = topics.assign_topics(
            engine.topic_model, list(tokenized.tokens), seed=engine.seed
        )
        return {"mixture": [float(x) for x in mixture]}
    if task == "predict":
        if engine.model is None:
            raise RuntimeError("no model loaded")
        pred = classifier.predict_proba_tokens(engine.model, tokenized)
        return {"probs": list(pred.probs), "label": pred.label.to_str()}
    if task == "explain":
        if engine.model is None:
            raise RuntimeError("no model loaded")
        expl = explain.explain_tokens(
            engine.model, tokenized, cfg=explain.ExplainConfig(seed=engine.seed)
        )
        return explain.to_payload(expl)
    raise RuntimeError(f"unknown task {task!r}")


def handle_analyze(engine: Engine, body: dict) -> tuple[int, dict]:
    """Validate one analyze request and run its tasks.

    Returns (http_status, payload). Task failures land inside the payload as
    per-task error objects; only request-level problems fail the call.
    """
    text = body.get("text")
    if not isinstance(text, str) or not text.strip():
        return 400, {"error": "field 'text' must be a non-empty string"}
    if len(text) > MAX_ANALYZE_CHARS:
        return 413, {
            "error": f"text exceeds {MAX_ANALYZE_CHARS} characters ({len(text)})"
        }
    tasks = body.get("tasks")
    if not isinstance(tasks, list) or not tasks:
        return 400, {"error": "field 'tasks' must be a non-empty array"}
    for t in tasks:
        if t not in TASKS:
            return 400, {"error": f"unknown task {t!r}"}

    tokenized = tokenize_text(text)
    results: dict[str, dict] = {}
    timing: dict[str, float] = {}
    for t in dict.fromkeys(tasks):
        start = time.perf_counter()
        try:
            results[t] = _run_task(engine, t, tokenized)
        except Exception as exc:
            results[t] = {"error": str(exc)}
        timing[t] = (time.perf_counter() - start) * 1000.0
    return 200, {"results": results, "timing_ms": timing}


# --- app ---------------------------------------------------------------------


def _summary_view(engine: Engine, d: Document) -> dict:
    return {
        "id": d.id,
        "title": d.title,
        "author": d.author,
        "category": d.category.value,
        "date": d.date.isoformat(),
        "word_count": engine.word_counts[d.id],
        "financial_polarity": engine.financial_polarity[d.id],
    }


def create_app(engine: Engine, static_dir=None) -> FastAPI:
    app = FastAPI(title="fednlp", docs_url=None, redoc_url=None)

    @app.get("/api/health")
    def health():
        return {
            "status": "ok",
            "model_version": None if engine.model is None else classifier.FORMAT_VERSION,
        }

    @app.get("/api/authors")
    def authors():
        counts: dict[str, int] = {}
        for d in engine.documents:
            counts[d.author] = counts.get(d.author, 0) + 1
        return [{"name": a, "doc_count": n} for a, n in sorted(counts.items())]

    @app.get("/api/documents")
    def documents(
        author: str | None = None,
        category: str | None = None,
        from_: _dt.date | None = Query(None, alias="from"),
        to: _dt.date | None = None,
    ):
        selected = [
            d
            for d in engine.documents
            if (author is None or d.author == author)
            and (category is None or d.category.value == category)
            and (from_ is None or d.date >= from_)
            and (to is None or d.date <= to)
        ]
        selected.sort(key=lambda d: (-d.date.toordinal(), d.id))
        return [_summary_view(engine, d) for d in selected]

    @app.get("/api/documents/{doc_id}/extension")
    def extension(doc_id: str):
        doc = engine.by_id.get(doc_id)
        if doc is None:
            return JSONResponse(
                status_code=404, content={"error": f"unknown document id {doc_id!r}"}
            )
        return {
            "id": doc.id,
            "body": doc.body,
            "precomputed": engine.precomputed.get(doc.id, {}),
        }

    @app.get("/api/ffr")
    def ffr():
        points = [] if engine.ffr is None else engine.ffr.points
        return {
            "points": [
                {
                    "date": p.date.isoformat(),
                    "lower_bound": p.lower_bound,
                    "decision": p.decision.to_str(),
                }
                for p in points
            ]
        }

    @app.get("/api/sentiment-series")
    def sentiment_series_route(author: str):
        series = sentiment_series(
            list(engine.documents), author, engine.financial_lexicon
        )
        return {
            "author": series.author,
            "points": [
                {"date": d.isoformat(), "polarity": p} for d, p in series.points
            ],
        }

    @app.get("/api/topics")
    def topics_route():
        if engine.topic_model is None:
            return JSONResponse(
                status_code=404, content={"error": "no topic model loaded"}
            )
        return topics_payload(engine.topic_model)

    @app.post("/api/nlp/analyze")
    async def analyze(request: Request):
        try:
            body = await request.json()
        except Exception:
            return JSONResponse(
                status_code=400, content={"error": "request body must be JSON"}
            )
        if not isinstance(body, dict):
            return JSONResponse(
                status_code=400, content={"error": "request body must be an object"}
            )
        status, payload = handle_analyze(engine, body)
        return JSONResponse(status_code=status, content=payload)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")
    return app


def serve(
    corpus_path,
    model_path=None,
    topics_path=None,
    lexicon_generic=None,
    lexicon_financial=None,
    ffr_path=None,
    seed: int = 0,
    port: int = 8080,
    static_dir=None,
) -> None:
    """Blocking entry point used by the command line."""
    import uvicorn

    engine = build_engine(
        corpus_path,
        model_path=model_path,
        topics_path=topics_path,
        lexicon_generic=lexicon_generic,
        lexicon_financial=lexicon_financial,
        ffr_path=ffr_path,
        seed=seed,
    )
    app = create_app(engine, static_dir=static_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="info")
