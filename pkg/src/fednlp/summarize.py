"""Extractive summarization: sentence similarity graph plus weighted PageRank.

Similarity between two sentences is |shared distinct non-stopword tokens|
divided by (ln of the first sentence's length + ln of the second's), with
length counted in non-stopword tokens. Sentences with fewer than 2
non-stopword tokens stay in the index but are excluded from the graph and
score 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import TokenizedDoc, default_stopwords

DAMPING = 0.85
TOL = 1e-6
MAX_ITER = 200


@dataclass(frozen=True)
class SentenceGraph:
    n: int
    weights: np.ndarray  # symmetric, nonnegative, zero diagonal


@dataclass(frozen=True)
class Summary:
    selected: tuple[int, ...]
    scores: tuple[float, ...]
    text: str
    converged: bool


def _content_tokens(doc: TokenizedDoc, stopwords: frozenset[str]) -> list[list[str]]:
    return [
        [t for t in doc.tokens[start:end] if t not in stopwords]
        for start, end in doc.sentences
    ]


def build_graph(doc: TokenizedDoc, stopwords: frozenset[str] | None = None) -> SentenceGraph:
    """Build the sentence-similarity graph for one tokenized document."""
    if stopwords is None:
        stopwords = default_stopwords()
    content = _content_tokens(doc, stopwords)
    n = len(content)
    weights = np.zeros((n, n))
    eligible = [i for i, toks in enumerate(content) if len(toks) >= 2]
    distinct = {i: set(content[i]) for i in eligible}
    for a, i in enumerate(eligible):
        log_i = math.log(len(content[i]))
        for j in eligible[a + 1 :]:
            shared = len(distinct[i] & distinct[j])
            if shared == 0:
                continue
            denom = log_i + math.log(len(content[j]))
            if denom <= 0:
                continue
            weights[i, j] = weights[j, i] = shared / denom
    return SentenceGraph(n=n, weights=weights)


def pagerank(
    g: SentenceGraph,
    damping: float = DAMPING,
    tol: float = TOL,
    max_iter: int = MAX_ITER,
) -> tuple[np.ndarray, bool]:
    """Weighted PageRank scores and a convergence flag.

    s_i = (1-d)/n + d * sum_j s_j * w_ji / out_j; a node with zero outgoing
    weight spreads its mass uniformly over all nodes. Iterates until the
    L1 change drops below tol; past max_iter the last iterate is returned
    with converged=False.
    """
    n = g.n
    if n == 0:
        return np.zeros(0), True
    w = np.asarray(g.weights, dtype=float)
    out = w.sum(axis=1)
    isolated = out == 0
    trans = np.zeros_like(w)
    np.divide(w, out[:, None], out=trans, where=~isolated[:, None])
    scores = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        dangling = scores[isolated].sum() / n
        nxt = (1 - damping) / n + damping * (trans.T @ scores + dangling)
        if np.abs(nxt - scores).sum() < tol:
            return nxt, True
        scores = nxt
    return scores, False


def default_summary_length(n_sentences: int) -> int:
    return max(3, math.ceil(0.1 * n_sentences))


def summarize(
    doc: TokenizedDoc,
    n_sentences: int | None = None,
    stopwords: frozenset[str] | None = None,
    damping: float = DAMPING,
    tol: float = TOL,
    max_iter: int = MAX_ITER,
) -> Summary:
    """Select the top-ranked sentences, returned in document order.

    Ranking runs on the subgraph of eligible sentences (>= 2 non-stopword
    tokens); ineligible sentences score 0. Ties go to the earlier sentence.
    A document with no eligible sentences falls back to uniform scores.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    g = build_graph(doc, stopwords)
    total = g.n
    if n_sentences is None:
        n_sentences = default_summary_length(total)
    if n_sentences < 1:
        raise ValueError(f"n_sentences must be >= 1, got {n_sentences}")
    if total == 0:
        return Summary(selected=(), scores=(), text="", converged=True)

    content = _content_tokens(doc, stopwords)
    eligible = [i for i, toks in enumerate(content) if len(toks) >= 2]
    converged = True
    scores = np.zeros(total)
    if eligible:
        sub = SentenceGraph(n=len(eligible), weights=g.weights[np.ix_(eligible, eligible)])
        sub_scores, converged = pagerank(sub, damping, tol, max_iter)
        scores[eligible] = sub_scores
    else:
        scores[:] = 1.0 / total

    order = sorted(range(total), key=lambda i: (-scores[i], i))
    selected = tuple(sorted(order[: min(n_sentences, total)]))
    texts = doc.sentence_texts
    text = " ".join(texts[i] for i in selected) if texts else ""
    return Summary(
        selected=selected,
        scores=tuple(float(s) for s in scores),
        text=text,
        converged=converged,
    )
