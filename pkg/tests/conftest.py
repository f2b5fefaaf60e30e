"""Shared fixtures: a small planted-token corpus and a model trained on it.

Session-scoped because training even a compact model dominates test runtime;
every consumer treats these objects as immutable.
"""

from __future__ import annotations

import pytest

from fednlp import classifier, service, synthetic, topics
from fednlp.corpus import save_corpus, save_ffr_series, tokenize_document


@pytest.fixture(scope="session")
def synth_corpus():
    docs, ffr = synthetic.make_synthetic(n_docs=120, seed=7)
    return docs, ffr


@pytest.fixture(scope="session")
def small_model(synth_corpus):
    docs, _ = synth_corpus
    ordered = sorted(docs, key=lambda d: (d.date, d.id))
    cfg = classifier.GbdtConfig(n_rounds=20, seed=0)
    return classifier.train(ordered[:96], cfg)


@pytest.fixture(scope="session")
def small_topics(synth_corpus):
    docs, _ = synth_corpus
    cfg = topics.LdaConfig(k=3, n_iterations=60, burn_in=20, seed=0)
    tokenized = [tokenize_document(d) for d in docs]
    return topics.fit_lda(tokenized, cfg, min_count=3)


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory, synth_corpus, small_model, small_topics):
    """Directory with corpus.json, ffr.json, model.bin, topics.json, store.json."""
    docs, ffr = synth_corpus
    root = tmp_path_factory.mktemp("artifacts")
    save_corpus(docs, root / "corpus.json")
    save_ffr_series(ffr, root / "ffr.json")
    classifier.save(small_model, root / "model.bin")
    service.save_topics(small_topics, root / "topics.json")

    from fednlp.sentiment import default_financial_lexicon, default_generic_lexicon

    generic = default_generic_lexicon()
    financial = default_financial_lexicon()
    precomputed = {
        d.id: service.precompute_document(d, generic, financial, small_model, seed=0)
        for d in docs
    }
    service.save_store(docs, precomputed, ffr, root / "store.json")
    return root


@pytest.fixture(scope="session")
def engine(artifact_dir):
    return service.build_engine(
        artifact_dir / "store.json",
        model_path=artifact_dir / "model.bin",
        topics_path=artifact_dir / "topics.json",
    )
