"""LDA topic modeling by collapsed Gibbs sampling.

Token-topic assignments are resampled with the standard collapsed
conditional p(z=k) proportional to (n_dk + alpha)(n_kw + beta)/(n_k + V*beta).
Point estimates average the per-state estimates collected every 10
iterations after burn-in. Documents are processed in a canonical order
sorted by doc_id with per-document init seeds, so a permuted corpus yields
identical per-document estimates.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .corpus import TokenizedDoc, default_stopwords
from .errors import DegenerateCorpusError

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an install-time dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

DEFAULT_MIN_COUNT = 5
SAMPLE_EVERY = 10
MASK64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class LdaConfig:
    k: int = 8
    alpha: float | None = None  # resolved to 50/k when unset
    beta: float = 0.01
    n_iterations: int = 1000
    burn_in: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.k)
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if not 0 <= self.burn_in < self.n_iterations:
            raise ValueError(
                f"burn_in must lie in [0, n_iterations), got {self.burn_in}/{self.n_iterations}"
            )


@dataclass(frozen=True)
class TopicModel:
    config: LdaConfig
    vocabulary: dict[str, int]
    topic_word: tuple[tuple[float, ...], ...]  # k x V, rows sum to 1
    doc_topic: tuple[tuple[float, ...], ...]  # D x k, aligned with doc_ids
    doc_ids: tuple[str, ...]
    log_likelihood_trace: tuple[float, ...]

    @property
    def k(self) -> int:
        return self.config.k


@njit(cache=True)
def _sweep(doc_ix, word_ix, z, n_dk, n_kw, n_k, alpha, beta, uniforms, cum):
    v = n_kw.shape[1]
    k = n_kw.shape[0]
    for t in range(doc_ix.shape[0]):
        d = doc_ix[t]
        w = word_ix[t]
        old = z[t]
        n_dk[d, old] -= 1
        n_kw[old, w] -= 1
        n_k[old] -= 1
        total = 0.0
        for c in range(k):
            total += (n_dk[d, c] + alpha) * (n_kw[c, w] + beta) / (n_k[c] + v * beta)
            cum[c] = total
        u = uniforms[t] * total
        new = 0
        while new < k - 1 and cum[new] < u:
            new += 1
        z[t] = new
        n_dk[d, new] += 1
        n_kw[new, w] += 1
        n_k[new] += 1


def _doc_seed(doc_id: str) -> int:
    digest = hashlib.blake2b(doc_id.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _joint_log_likelihood(n_dk, n_kw, n_k, n_d, alpha, beta) -> float:
    k, v = n_kw.shape
    d = n_dk.shape[0]
    ll = k * (gammaln(v * beta) - v * gammaln(beta))
    ll += gammaln(n_kw + beta).sum() - gammaln(n_k + v * beta).sum()
    ll += d * (gammaln(k * alpha) - k * gammaln(alpha))
    ll += gammaln(n_dk + alpha).sum() - gammaln(n_d + k * alpha).sum()
    return float(ll)


def build_vocabulary(
    docs: list[TokenizedDoc],
    stopwords: frozenset[str] | None = None,
    min_count: int = DEFAULT_MIN_COUNT,
) -> dict[str, int]:
    """Corpus vocabulary for topic modeling: stopwords out, rare terms out."""
    if stopwords is None:
        stopwords = default_stopwords()
    totals: dict[str, int] = {}
    for doc in docs:
        for t in doc.tokens:
            if t not in stopwords:
                totals[t] = totals.get(t, 0) + 1
    kept = sorted(t for t, n in totals.items() if n >= min_count)
    return {t: i for i, t in enumerate(kept)}


def fit_lda(
    docs: list[TokenizedDoc],
    cfg: LdaConfig,
    stopwords: frozenset[str] | None = None,
    min_count: int = DEFAULT_MIN_COUNT,
    check_counts: bool = True,
) -> TopicModel:
    """Fit LDA on tokenized documents. Deterministic given cfg.seed."""
    if len(docs) < cfg.k:
        raise DegenerateCorpusError(
            f"need at least k={cfg.k} documents, got {len(docs)}"
        )
    vocabulary = build_vocabulary(docs, stopwords, min_count)
    if not vocabulary:
        raise DegenerateCorpusError(
            "vocabulary is empty after stopword and min-count filtering"
        )

    order = sorted(range(len(docs)), key=lambda i: docs[i].doc_id)
    doc_ix_parts, word_ix_parts, z_parts = [], [], []
    for canon, i in enumerate(order):
        words = [vocabulary[t] for t in docs[i].tokens if t in vocabulary]
        if not words:
            continue
        doc_ix_parts.append(np.full(len(words), canon, dtype=np.int32))
        word_ix_parts.append(np.asarray(words, dtype=np.int32))
        rng = np.random.default_rng([cfg.seed & MASK64, _doc_seed(docs[i].doc_id)])
        z_parts.append(rng.integers(0, cfg.k, size=len(words)).astype(np.int32))

    n_docs, v = len(docs), len(vocabulary)
    if not doc_ix_parts:
        raise DegenerateCorpusError("no document contains any vocabulary term")
    doc_ix = np.concatenate(doc_ix_parts)
    word_ix = np.concatenate(word_ix_parts)
    z = np.concatenate(z_parts)

    n_dk = np.zeros((n_docs, cfg.k), dtype=np.int64)
    n_kw = np.zeros((cfg.k, v), dtype=np.int64)
    np.add.at(n_dk, (doc_ix, z), 1)
    np.add.at(n_kw, (z, word_ix), 1)
    n_k = n_kw.sum(axis=1)
    n_d = n_dk.sum(axis=1)
    alpha, beta = float(cfg.alpha), float(cfg.beta)

    sweep_rng = np.random.default_rng([cfg.seed & MASK64, 1])
    cum = np.zeros(cfg.k)
    theta_acc = np.zeros((n_docs, cfg.k))
    phi_acc = np.zeros((cfg.k, v))
    n_samples = 0
    trace = []
    for it in range(1, cfg.n_iterations + 1):
        uniforms = sweep_rng.random(doc_ix.shape[0])
        _sweep(doc_ix, word_ix, z, n_dk, n_kw, n_k, alpha, beta, uniforms, cum)
        if check_counts:
            if not np.array_equal(n_dk.sum(axis=1), n_d):
                raise AssertionError("per-document topic counts drifted during sweep")
            if int(n_k.sum()) != doc_ix.shape[0] or not np.array_equal(n_kw.sum(axis=1), n_k):
                raise AssertionError("topic-word counts drifted during sweep")
        trace.append(_joint_log_likelihood(n_dk, n_kw, n_k, n_d, alpha, beta))
        if it > cfg.burn_in and (it - cfg.burn_in) % SAMPLE_EVERY == 0:
            theta_acc += (n_dk + alpha) / (n_d + cfg.k * alpha)[:, None]
            phi_acc += (n_kw + beta) / (n_k + v * beta)[:, None]
            n_samples += 1

    if n_samples == 0:
        # Config left no sampling iterations; fall back to the final state.
        theta_acc = (n_dk + alpha) / (n_d + cfg.k * alpha)[:, None]
        phi_acc = (n_kw + beta) / (n_k + v * beta)[:, None]
        n_samples = 1
    theta_canon = theta_acc / n_samples
    phi = phi_acc / n_samples

    # Map per-document mixtures back to the input order.
    theta = np.zeros_like(theta_canon)
    for canon, i in enumerate(order):
        theta[i] = theta_canon[canon]
    return TopicModel(
        config=cfg,
        vocabulary=vocabulary,
        topic_word=tuple(tuple(float(x) for x in row) for row in phi),
        doc_topic=tuple(tuple(float(x) for x in row) for row in theta),
        doc_ids=tuple(d.doc_id for d in docs),
        log_likelihood_trace=tuple(trace),
    )


def topic_terms(model: TopicModel, t: int, k_terms: int) -> list[tuple[str, float]]:
    """Top k_terms of topic t by probability; ties favor the earlier term."""
    if not 0 <= t < model.k:
        raise IndexError(f"topic index {t} out of range [0, {model.k})")
    terms = sorted(model.vocabulary, key=model.vocabulary.get)
    row = model.topic_word[t]
    ranked = sorted(zip(terms, row), key=lambda tp: (-tp[1], tp[0]))
    return [(term, float(p)) for term, p in ranked[: max(0, k_terms)]]


def assign_topics(
    model: TopicModel,
    tokens: list[str],
    n_iterations: int = 50,
    seed: int = 0,
) -> tuple[float, ...]:
    """Fold one unseen token list into the fitted model; returns its mixture.

    Topic-word probabilities stay frozen; only the document's own topic
    counts are resampled. A document with no in-vocabulary tokens gets the
    uniform prior mixture.
    """
    k = model.k
    alpha = float(model.config.alpha)
    words = np.asarray(
        [model.vocabulary[t] for t in tokens if t in model.vocabulary], dtype=np.int64
    )
    if words.size == 0:
        return tuple(1.0 / k for _ in range(k))
    rng = np.random.default_rng([seed & MASK64, 2])
    z = rng.integers(0, k, size=words.size)
    counts = np.bincount(z, minlength=k).astype(np.float64)
    phi_w = np.asarray(model.topic_word, dtype=float)[:, words]  # k x n_tokens
    for _ in range(n_iterations):
        uniforms = rng.random(words.size)
        for t in range(words.size):
            counts[z[t]] -= 1
            p = (counts + alpha) * phi_w[:, t]
            cdf = np.cumsum(p)
            new = min(int(np.searchsorted(cdf, uniforms[t] * cdf[-1])), k - 1)
            z[t] = new
            counts[new] += 1
    mixture = (counts + alpha) / (words.size + k * alpha)
    return tuple(float(x) for x in mixture)
