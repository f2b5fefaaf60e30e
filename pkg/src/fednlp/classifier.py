"""Gradient-boosted regression trees with a multiclass softmax objective.

Per boosting round the class probabilities are computed once, then one
regression tree per class is fit to that round's gradient (p - y) and
hessian p(1-p) statistics with exact greedy splits. TF-IDF inputs are
sparse, so split search scans each feature's sorted nonzero values plus an
explicit zero bucket. Leaf values are the second-order step -G/(H + lambda).

Training is invariant to input order: documents are processed in ascending
id order and the per-round feature subsample derives from (seed, round,
class) alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import features
from .corpus import Document, RateDecision, TokenizedDoc, tokenize_document
from .errors import (
    ArtifactVersionError,
    DegenerateCorpusError,
    EmptyCorpusError,
    EmptyDocumentError,
    InsufficientLabelsError,
)

FORMAT_VERSION = 1
N_CLASSES = 3
LEAF = -1


@dataclass(frozen=True)
class GbdtConfig:
    n_rounds: int = 100
    learning_rate: float = 0.1
    max_depth: int = 4
    min_leaf_samples: int = 5
    l2_leaf_reg: float = 1.0
    feature_subsample: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.n_rounds < 1:
            raise ValueError(f"n_rounds must be >= 1, got {self.n_rounds}")
        if not 0 < self.learning_rate <= 1:
            raise ValueError(f"learning_rate must be in (0, 1], got {self.learning_rate}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.min_leaf_samples < 1:
            raise ValueError(f"min_leaf_samples must be >= 1, got {self.min_leaf_samples}")
        if self.l2_leaf_reg < 0:
            raise ValueError(f"l2_leaf_reg must be >= 0, got {self.l2_leaf_reg}")
        if not 0 < self.feature_subsample <= 1:
            raise ValueError(
                f"feature_subsample must be in (0, 1], got {self.feature_subsample}"
            )


@dataclass(frozen=True)
class Tree:
    """Flat node arrays; leaves carry feature -1 and point left/right at themselves."""

    feature: tuple[int, ...]
    threshold: tuple[float, ...]
    left: tuple[int, ...]
    right: tuple[int, ...]
    value: tuple[float, ...]


@dataclass(frozen=True)
class Prediction:
    probs: tuple[float, float, float]
    label: RateDecision


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    per_class: dict[str, ClassMetrics]
    weighted_f1: float
    confusion: tuple[tuple[int, ...], ...]  # rows: truth, cols: prediction


@dataclass(frozen=True)
class GbdtModel:
    config: GbdtConfig
    base_scores: tuple[float, float, float]
    tfidf: features.TfidfModel
    trees: tuple[tuple[Tree, Tree, Tree], ...]  # [round][class]
    train_loss: tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        flat: list[Tree] = [t for per_round in self.trees for t in per_round]
        feat, thr, left, right, value, roots = [], [], [], [], [], []
        offset = 0
        for tree in flat:
            n = len(tree.feature)
            roots.append(offset)
            feat.extend(tree.feature)
            thr.extend(tree.threshold)
            left.extend(i + offset for i in tree.left)
            right.extend(i + offset for i in tree.right)
            value.extend(tree.value)
            offset += n
        packed = {
            "feature": np.asarray(feat, dtype=np.int64),
            "threshold": np.asarray(thr, dtype=np.float64),
            "left": np.asarray(left, dtype=np.int64),
            "right": np.asarray(right, dtype=np.int64),
            "value": np.asarray(value, dtype=np.float64),
            "roots": np.asarray(roots, dtype=np.int64),
        }
        object.__setattr__(self, "_packed", packed)

    @property
    def n_rounds(self) -> int:
        return len(self.trees)


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_loss(probs: np.ndarray, y: np.ndarray) -> float:
    picked = probs[np.arange(len(y)), y]
    return float(-np.log(np.clip(picked, 1e-300, None)).mean())


def gradient_hessian(probs: np.ndarray, y: np.ndarray, cls: int) -> tuple[np.ndarray, np.ndarray]:
    """Softmax log-loss statistics for one class: g = p - 1{y=cls}, h = p(1-p)."""
    p = probs[:, cls]
    g = p - (y == cls).astype(np.float64)
    h = p * (1.0 - p)
    return g, h


class _Csc:
    """Per-feature nonzero (doc, value) arrays, values ascending within a feature."""

    def __init__(self, vectors: list[features.SparseVector], dim: int):
        rows, cols, vals = [], [], []
        for doc_i, vec in enumerate(vectors):
            rows.extend([doc_i] * len(vec.indices))
            cols.extend(vec.indices)
            vals.extend(vec.values)
        cols_a = np.asarray(cols, dtype=np.int64)
        rows_a = np.asarray(rows, dtype=np.int64)
        vals_a = np.asarray(vals, dtype=np.float64)
        order = np.lexsort((rows_a, vals_a, cols_a))
        self.docs = rows_a[order]
        self.vals = vals_a[order]
        col_sorted = cols_a[order]
        self.starts = np.searchsorted(col_sorted, np.arange(dim + 1))

    def column(self, f: int) -> tuple[np.ndarray, np.ndarray]:
        s, e = self.starts[f], self.starts[f + 1]
        return self.docs[s:e], self.vals[s:e]


def _build_tree(
    g: np.ndarray,
    h: np.ndarray,
    feature_ids: np.ndarray,
    csc: _Csc,
    n_docs: int,
    cfg: GbdtConfig,
) -> tuple[Tree, np.ndarray]:
    """Fit one regression tree; returns it plus the per-document leaf value."""
    lam = cfg.l2_leaf_reg
    min_leaf = cfg.min_leaf_samples
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    doc_values = np.zeros(n_docs)
    in_node = np.zeros(n_docs, dtype=bool)

    def new_node() -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(len(feature) - 1)
        right.append(len(feature) - 1)
        value.append(0.0)
        return len(feature) - 1

    # (node id, sorted doc index array, depth), grown breadth-first
    queue: list[tuple[int, np.ndarray, int]] = [(new_node(), np.arange(n_docs), 0)]
    while queue:
        node, docs, depth = queue.pop(0)
        g_total = float(g[docs].sum())
        h_total = float(h[docs].sum())
        parent_term = g_total * g_total / (h_total + lam)

        best_gain = 0.0
        best: tuple[int, float, int, np.ndarray] | None = None
        if depth < cfg.max_depth and docs.size >= 2 * min_leaf:
            in_node[docs] = True
            for f in feature_ids:
                col_docs, col_vals = csc.column(int(f))
                mask = in_node[col_docs]
                nz_docs = col_docs[mask]
                nnz = nz_docs.size
                if nnz == 0:
                    continue
                nz_vals = col_vals[mask]
                gl_nz = np.cumsum(g[nz_docs])
                hl_nz = np.cumsum(h[nz_docs])
                g_zero = g_total - gl_nz[-1]
                h_zero = h_total - hl_nz[-1]
                n_zero = docs.size - nnz

                # Split after k nonzeros on the left (k = 0 keeps only the
                # zero bucket left); zeros always fall left of any positive
                # threshold.
                gl = g_zero + np.concatenate(([0.0], gl_nz[:-1]))
                hl = h_zero + np.concatenate(([0.0], hl_nz[:-1]))
                n_left = n_zero + np.arange(nnz)
                thresholds = np.empty(nnz)
                thresholds[0] = nz_vals[0] / 2.0
                thresholds[1:] = (nz_vals[:-1] + nz_vals[1:]) / 2.0
                boundary = np.empty(nnz, dtype=bool)
                boundary[0] = n_zero > 0
                boundary[1:] = nz_vals[1:] > nz_vals[:-1]
                valid = boundary & (n_left >= min_leaf) & (docs.size - n_left >= min_leaf)
                if not valid.any():
                    continue
                gr = g_total - gl
                hr = h_total - hl
                gains = 0.5 * (
                    gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent_term
                )
                gains[~valid] = -np.inf
                k = int(np.argmax(gains))
                if gains[k] > best_gain:
                    best_gain = float(gains[k])
                    best = (int(f), float(thresholds[k]), k, nz_docs)
            in_node[docs] = False

        if best is None:
            leaf_value = -g_total / (h_total + lam)
            value[node] = leaf_value
            doc_values[docs] = leaf_value
            continue

        f, thr, k, nz_docs = best
        is_left_nz = np.zeros(n_docs, dtype=bool)
        is_left_nz[nz_docs[:k]] = True
        is_nz = np.zeros(n_docs, dtype=bool)
        is_nz[nz_docs] = True
        left_docs = docs[is_left_nz[docs] | ~is_nz[docs]]
        right_docs = docs[is_nz[docs] & ~is_left_nz[docs]]
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node()
        right[node] = new_node()
        queue.append((left[node], left_docs, depth + 1))
        queue.append((right[node], right_docs, depth + 1))

    tree = Tree(
        feature=tuple(feature),
        threshold=tuple(threshold),
        left=tuple(left),
        right=tuple(right),
        value=tuple(value),
    )
    return tree, doc_values


def _subsample_features(dim: int, fraction: float, seed: int, rnd: int, cls: int) -> np.ndarray:
    if fraction >= 1.0:
        return np.arange(dim)
    n_sub = max(1, int(round(fraction * dim)))
    rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, rnd, cls])
    return np.sort(rng.choice(dim, size=n_sub, replace=False))


def train(
    docs: list[Document],
    cfg: GbdtConfig = GbdtConfig(),
    tfidf_params: dict | None = None,
) -> GbdtModel:
    """Train on labeled documents; deterministic given cfg.seed."""
    if not docs:
        raise EmptyCorpusError("cannot train on an empty corpus")
    for d in docs:
        if d.label is None:
            raise InsufficientLabelsError(f"document {d.id!r} has no label")
    if len({d.label for d in docs}) < 2:
        raise InsufficientLabelsError("training needs at least 2 distinct labels")

    ordered = sorted(docs, key=lambda d: d.id)
    tokenized = [tokenize_document(d) for d in ordered]
    tfidf = features.fit(tokenized, **(tfidf_params or {}))
    if tfidf.dim == 0:
        raise DegenerateCorpusError(
            "TF-IDF vocabulary is empty; lower min_df or supply more documents"
        )
    vectors = features.transform_many(tfidf, tokenized)
    csc = _Csc(vectors, tfidf.dim)
    n = len(ordered)
    y = np.asarray([int(d.label) for d in ordered], dtype=np.int64)

    class_counts = np.bincount(y, minlength=N_CLASSES)
    # Log class frequencies; an absent class gets a large negative prior.
    base = np.where(
        class_counts > 0, np.log(np.clip(class_counts, 1, None) / n), -30.0
    )
    scores = np.tile(base, (n, 1))
    losses = [log_loss(softmax(scores), y)]
    rounds: list[tuple[Tree, Tree, Tree]] = []
    for rnd in range(cfg.n_rounds):
        probs = softmax(scores)
        per_class: list[Tree] = []
        updates = np.zeros_like(scores)
        for cls in range(N_CLASSES):
            g, h = gradient_hessian(probs, y, cls)
            feature_ids = _subsample_features(
                tfidf.dim, cfg.feature_subsample, cfg.seed, rnd, cls
            )
            tree, doc_values = _build_tree(g, h, feature_ids, csc, n, cfg)
            per_class.append(tree)
            updates[:, cls] = doc_values
        scores += cfg.learning_rate * updates
        rounds.append(tuple(per_class))
        losses.append(log_loss(softmax(scores), y))

    return GbdtModel(
        config=cfg,
        base_scores=tuple(float(b) for b in base),
        tfidf=tfidf,
        trees=tuple(rounds),
        train_loss=tuple(losses),
    )


def score_columns(model: GbdtModel, x_cols: np.ndarray, col_of: dict[int, int]) -> np.ndarray:
    """Raw per-class scores for rows of a dense matrix that covers only the
    feature columns named in col_of; every other feature is implicitly 0."""
    packed = model._packed
    n = x_cols.shape[0]
    zero_col = x_cols.shape[1]
    x_ext = np.hstack([x_cols, np.zeros((n, 1))])
    col_lookup = np.full(model.tfidf.dim, zero_col, dtype=np.int64)
    for feat_idx, col in col_of.items():
        col_lookup[feat_idx] = col
    feat = packed["feature"]
    mapped = np.where(feat >= 0, col_lookup[np.clip(feat, 0, None)], zero_col)

    idx = np.broadcast_to(packed["roots"], (n, packed["roots"].size)).copy()
    rows = np.arange(n)[:, None]
    for _ in range(model.config.max_depth):
        vals = x_ext[rows, mapped[idx]]
        idx = np.where(vals <= packed["threshold"][idx], packed["left"][idx], packed["right"][idx])
    leaf_values = packed["value"][idx].reshape(n, model.n_rounds, N_CLASSES)
    return np.asarray(model.base_scores) + model.config.learning_rate * leaf_values.sum(axis=1)


def _vectors_to_columns(vectors: list[features.SparseVector]) -> tuple[np.ndarray, dict[int, int]]:
    used = sorted({i for v in vectors for i in v.indices})
    col_of = {feat_idx: c for c, feat_idx in enumerate(used)}
    x = np.zeros((len(vectors), len(used)))
    for r, v in enumerate(vectors):
        for feat_idx, val in zip(v.indices, v.values):
            x[r, col_of[feat_idx]] = val
    return x, col_of


def predict_scores(model: GbdtModel, docs_tokens: list[TokenizedDoc]) -> np.ndarray:
    vectors = features.transform_many(model.tfidf, docs_tokens)
    x, col_of = _vectors_to_columns(vectors)
    return score_columns(model, x, col_of)


def predict_proba(model: GbdtModel, doc: Document) -> Prediction:
    tokenized = tokenize_document(doc)
    if not tokenized.tokens:
        raise EmptyDocumentError(f"document {doc.id!r} has no tokens")
    probs = softmax(predict_scores(model, [tokenized]))[0]
    return Prediction(
        probs=tuple(float(p) for p in probs),
        label=RateDecision(int(np.argmax(probs))),
    )


def predict_proba_tokens(model: GbdtModel, tokenized: TokenizedDoc) -> Prediction:
    if not tokenized.tokens:
        raise EmptyDocumentError("text has no tokens")
    probs = softmax(predict_scores(model, [tokenized]))[0]
    return Prediction(
        probs=tuple(float(p) for p in probs),
        label=RateDecision(int(np.argmax(probs))),
    )


def evaluate(model: GbdtModel, docs: list[Document]) -> EvalReport:
    """Accuracy, per-class precision/recall/F1, support-weighted F1, confusion."""
    if not docs:
        raise EmptyCorpusError("cannot evaluate on an empty document list")
    for d in docs:
        if d.label is None:
            raise InsufficientLabelsError(f"document {d.id!r} has no label")
    tokenized = [tokenize_document(d) for d in docs]
    probs = softmax(predict_scores(model, tokenized))
    predicted = np.argmax(probs, axis=1)
    truth = np.asarray([int(d.label) for d in docs])

    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(confusion, (truth, predicted), 1)
    accuracy = float(np.trace(confusion) / len(docs))
    per_class: dict[str, ClassMetrics] = {}
    weighted = 0.0
    for c in range(N_CLASSES):
        tp = int(confusion[c, c])
        fp = int(confusion[:, c].sum()) - tp
        fn = int(confusion[c].sum()) - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        support = tp + fn
        per_class[RateDecision(c).to_str()] = ClassMetrics(
            precision=precision, recall=recall, f1=f1, support=support
        )
        weighted += support * f1
    return EvalReport(
        accuracy=accuracy,
        per_class=per_class,
        weighted_f1=weighted / len(docs),
        confusion=tuple(tuple(int(x) for x in row) for row in confusion),
    )


def _tree_to_payload(tree: Tree) -> dict:
    return {
        "feature": list(tree.feature),
        "threshold": list(tree.threshold),
        "left": list(tree.left),
        "right": list(tree.right),
        "value": list(tree.value),
    }


def _tree_from_payload(payload: dict) -> Tree:
    return Tree(
        feature=tuple(payload["feature"]),
        threshold=tuple(payload["threshold"]),
        left=tuple(payload["left"]),
        right=tuple(payload["right"]),
        value=tuple(payload["value"]),
    )


def serialize(model: GbdtModel) -> str:
    """Canonical artifact text: same model → identical bytes."""
    cfg = model.config
    payload = {
        "format_version": FORMAT_VERSION,
        "config": {
            "n_rounds": cfg.n_rounds,
            "learning_rate": cfg.learning_rate,
            "max_depth": cfg.max_depth,
            "min_leaf_samples": cfg.min_leaf_samples,
            "l2_leaf_reg": cfg.l2_leaf_reg,
            "feature_subsample": cfg.feature_subsample,
            "seed": cfg.seed,
        },
        "classes": [RateDecision(c).to_str() for c in range(N_CLASSES)],
        "base_scores": list(model.base_scores),
        "tfidf": {
            "vocabulary": model.tfidf.vocabulary,
            "doc_freq": list(model.tfidf.doc_freq),
            "n_docs": model.tfidf.n_docs,
            "idf": list(model.tfidf.idf),
            "min_df": model.tfidf.min_df,
            "max_features": model.tfidf.max_features,
        },
        "trees": [[_tree_to_payload(t) for t in per_round] for per_round in model.trees],
    }
    return json.dumps(payload, separators=(",", ":"))


def save(model: GbdtModel, path) -> None:
    text = serialize(model)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load(path) -> GbdtModel:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        payload = json.loads(text)
    except ValueError as exc:
        raise ArtifactVersionError(f"{path}: not a model artifact ({exc})") from None
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise ArtifactVersionError(f"{path}: missing format_version")
    version = payload["format_version"]
    if version != FORMAT_VERSION:
        raise ArtifactVersionError(
            f"{path}: artifact format {version}, this build reads {FORMAT_VERSION}"
        )
    cfg = GbdtConfig(**payload["config"])
    t = payload["tfidf"]
    tfidf = features.TfidfModel(
        vocabulary={str(k): int(v) for k, v in t["vocabulary"].items()},
        doc_freq=tuple(t["doc_freq"]),
        n_docs=t["n_docs"],
        idf=tuple(t["idf"]),
        min_df=t["min_df"],
        max_features=t["max_features"],
    )
    trees = tuple(
        tuple(_tree_from_payload(p) for p in per_round) for per_round in payload["trees"]
    )
    return GbdtModel(
        config=cfg,
        base_scores=tuple(payload["base_scores"]),
        tfidf=tfidf,
        trees=trees,
    )
