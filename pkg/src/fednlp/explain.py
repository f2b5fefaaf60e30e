"""Local surrogate explanations for individual predictions.

The interpretable space is presence/absence of each distinct token.
Perturbed variants delete all occurrences of masked tokens, the model
scores each variant, and a proximity-weighted ridge regression (intercept
unpenalized) maps mask bits to the target-class probability. Proximity is
exp(-d^2 / kernel_width^2) with d the cosine distance between the variant's
presence vector and the all-ones vector. Documents with at most 12 distinct
tokens are explained exhaustively over all masks instead of by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import classifier
from .corpus import Document, RateDecision, TokenizedDoc, tokenize_document
from .errors import EmptyDocumentError

EXHAUSTIVE_LIMIT = 12
_DEGENERATE_VAR = 1e-18


@dataclass(frozen=True)
class ExplainConfig:
    n_samples: int = 1000
    kernel_width: float | None = None  # resolved to 0.75 * sqrt(n_distinct)
    ridge_lambda: float = 1.0
    top_k: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.kernel_width is not None and self.kernel_width <= 0:
            raise ValueError(f"kernel_width must be positive, got {self.kernel_width}")
        if self.ridge_lambda <= 0:
            raise ValueError(f"ridge_lambda must be positive, got {self.ridge_lambda}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")


@dataclass(frozen=True)
class Explanation:
    target_class: RateDecision
    feature_weights: tuple[tuple[str, float], ...]
    intercept: float
    local_fidelity_r2: float
    sentence_highlights: tuple[float, ...]


def perturbation_samples(distinct_tokens: list[str], n: int, seed: int) -> np.ndarray:
    """n binary masks over the distinct tokens: all-ones first, the rest
    uniform over subsets. Reproducible from seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = len(distinct_tokens)
    rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
    masks = np.ones((n, m), dtype=np.uint8)
    if n > 1:
        masks[1:] = rng.integers(0, 2, size=(n - 1, m), dtype=np.uint8)
    return masks


def _exhaustive_masks(m: int) -> np.ndarray:
    codes = np.arange(2**m, dtype=np.uint64)[:, None]
    bits = (codes >> np.arange(m, dtype=np.uint64)) & 1
    return bits.astype(np.uint8)


def kernel_weights(masks: np.ndarray, kernel_width: float) -> np.ndarray:
    """Proximity of each mask to the unperturbed document.

    Cosine distance between binary vectors u (mask) and the all-ones vector
    reduces to 1 - sqrt(|u| / m); the empty mask is pinned to distance 1.
    """
    m = masks.shape[1]
    if m == 0:
        return np.ones(masks.shape[0])
    kept = masks.sum(axis=1)
    d = 1.0 - np.sqrt(kept / m)
    return np.exp(-(d**2) / kernel_width**2)


def weighted_ridge(
    z: np.ndarray, y: np.ndarray, w: np.ndarray, lam: float
) -> tuple[float, np.ndarray]:
    """Minimize sum_i w_i (y_i - b0 - z_i . b)^2 + lam * |b|^2. The intercept
    is unpenalized. Returns (b0, b)."""
    n, m = z.shape
    sw = float(w.sum())
    a = np.empty((m + 1, m + 1))
    a[0, 0] = sw
    wz = w[:, None] * z
    a[0, 1:] = wz.sum(axis=0)
    a[1:, 0] = a[0, 1:]
    a[1:, 1:] = z.T @ wz + lam * np.eye(m)
    b = np.empty(m + 1)
    b[0] = float(w @ y)
    b[1:] = wz.T @ y
    beta = np.linalg.solve(a, b)
    return float(beta[0]), beta[1:]


def explain_with_fn(
    prob_fn: Callable[[np.ndarray], np.ndarray],
    tokenized: TokenizedDoc,
    target_class: RateDecision,
    cfg: ExplainConfig = ExplainConfig(),
) -> Explanation:
    """Core explanation routine over an arbitrary probability function.

    prob_fn maps an (n, m) mask matrix over the document's distinct tokens
    (first-occurrence order) to the target-class probability per row.
    """
    if not tokenized.tokens:
        raise EmptyDocumentError("cannot explain an empty document")
    distinct = list(dict.fromkeys(tokenized.tokens))
    m = len(distinct)
    if m <= EXHAUSTIVE_LIMIT:
        masks = _exhaustive_masks(m)
    else:
        masks = perturbation_samples(distinct, cfg.n_samples, cfg.seed)
    y = np.asarray(prob_fn(masks), dtype=np.float64)
    kw = cfg.kernel_width if cfg.kernel_width is not None else 0.75 * math.sqrt(m)
    w = kernel_weights(masks, kw)

    y_mean = float(w @ y) / float(w.sum())
    total_var = float(w @ (y - y_mean) ** 2)
    if total_var < _DEGENERATE_VAR:
        # Constant model locally: nothing to attribute.
        weights = np.zeros(m)
        intercept, r2 = y_mean, 1.0
    else:
        z = masks.astype(np.float64)
        intercept, weights = weighted_ridge(z, y, w, cfg.ridge_lambda)
        residual = y - intercept - z @ weights
        r2 = 1.0 - float(w @ residual**2) / total_var

    order = sorted(range(m), key=lambda j: (-abs(weights[j]), j))[: cfg.top_k]
    feature_weights = tuple((distinct[j], float(weights[j])) for j in order)

    top_positive = {distinct[j]: float(weights[j]) for j in order if weights[j] > 0}
    raw = []
    for start, end in tokenized.sentences:
        present = set(tokenized.tokens[start:end])
        raw.append(sum(v for t, v in top_positive.items() if t in present))
    peak = max(raw, default=0.0)
    highlights = tuple(v / peak for v in raw) if peak > 0 else tuple(0.0 for _ in raw)

    return Explanation(
        target_class=target_class,
        feature_weights=feature_weights,
        intercept=intercept,
        local_fidelity_r2=r2,
        sentence_highlights=highlights,
    )


def _model_prob_fn(
    model: classifier.GbdtModel, distinct: list[str], counts: dict[str, int], cls: int
) -> Callable[[np.ndarray], np.ndarray]:
    vocab = model.tfidf.vocabulary
    in_vocab = [(j, vocab[t]) for j, t in enumerate(distinct) if t in vocab]
    weights = np.asarray(
        [counts[distinct[j]] * model.tfidf.idf[v] for j, v in in_vocab], dtype=np.float64
    )
    mask_cols = np.asarray([j for j, _ in in_vocab], dtype=np.int64)
    col_of = {v: c for c, (_, v) in enumerate(in_vocab)}

    def prob_fn(masks: np.ndarray) -> np.ndarray:
        n = masks.shape[0]
        if mask_cols.size == 0:
            x = np.zeros((n, 0))
        else:
            x = masks[:, mask_cols].astype(np.float64) * weights
            norms = np.sqrt((x**2).sum(axis=1, keepdims=True))
            np.divide(x, norms, out=x, where=norms > 0)
        scores = classifier.score_columns(model, x, col_of)
        return classifier.softmax(scores)[:, cls]

    return prob_fn


def explain_tokens(
    model: classifier.GbdtModel,
    tokenized: TokenizedDoc,
    target_class: RateDecision | None = None,
    cfg: ExplainConfig = ExplainConfig(),
) -> Explanation:
    """Explain the model's probability for target_class on tokenized text;
    class defaults to the model's own prediction."""
    if not tokenized.tokens:
        raise EmptyDocumentError("cannot explain an empty document")
    if target_class is None:
        target_class = classifier.predict_proba_tokens(model, tokenized).label
    distinct = list(dict.fromkeys(tokenized.tokens))
    counts: dict[str, int] = {}
    for t in tokenized.tokens:
        counts[t] = counts.get(t, 0) + 1
    prob_fn = _model_prob_fn(model, distinct, counts, int(target_class))
    return explain_with_fn(prob_fn, tokenized, target_class, cfg)


def explain(
    model: classifier.GbdtModel,
    doc: Document,
    target_class: RateDecision | None = None,
    cfg: ExplainConfig = ExplainConfig(),
) -> Explanation:
    return explain_tokens(model, tokenize_document(doc), target_class, cfg)


def to_payload(expl: Explanation) -> dict:
    """JSON shape consumed by the webapp."""
    return {
        "class": expl.target_class.to_str(),
        "intercept": expl.intercept,
        "r2": expl.local_fidelity_r2,
        "features": [{"token": t, "weight": w} for t, w in expl.feature_weights],
        "sentences": [
            {"index": i, "intensity": v} for i, v in enumerate(expl.sentence_highlights)
        ],
    }
