"""TF-IDF featurization with a fixed, testable weighting scheme.

idf(t) = ln((1 + n_docs) / (1 + doc_freq(t))) + 1, tf = raw in-document
count, vectors L2-normalized. Vocabulary keeps terms with doc_freq >=
min_df, truncates to the max_features most frequent (ties favor the
lexicographically earlier term), and assigns indices in ascending
lexicographic order.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .corpus import TokenizedDoc
from .errors import EmptyCorpusError

DEFAULT_MIN_DF = 2
DEFAULT_MAX_FEATURES = 20000


@dataclass(frozen=True, slots=True)
class SparseVector:
    indices: tuple[int, ...]
    values: tuple[float, ...]
    dim: int

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.indices, self.values))


@dataclass(frozen=True, slots=True)
class TfidfModel:
    vocabulary: dict[str, int]
    doc_freq: tuple[int, ...]
    n_docs: int
    idf: tuple[float, ...]
    min_df: int
    max_features: int | None

    @property
    def dim(self) -> int:
        return len(self.vocabulary)

    def index_to_term(self) -> list[str]:
        terms = [""] * len(self.vocabulary)
        for term, i in self.vocabulary.items():
            terms[i] = term
        return terms


def fit(
    docs: list[TokenizedDoc],
    min_df: int = DEFAULT_MIN_DF,
    max_features: int | None = DEFAULT_MAX_FEATURES,
) -> TfidfModel:
    """Fit vocabulary, document frequencies, and idf weights.

    Deterministic and independent of corpus order: document frequency is a
    set-count per document, and all orderings below are by (count, term).
    """
    if not docs:
        raise EmptyCorpusError("cannot fit TF-IDF on an empty corpus")
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")
    if max_features is not None and max_features < 1:
        raise ValueError(f"max_features must be >= 1, got {max_features}")

    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc.tokens))

    kept = [(term, n) for term, n in df.items() if n >= min_df]
    if max_features is not None and len(kept) > max_features:
        # Highest doc_freq first; equal counts keep the earlier term.
        kept.sort(key=lambda tn: (-tn[1], tn[0]))
        kept = kept[:max_features]
    kept.sort(key=lambda tn: tn[0])

    n = len(docs)
    vocabulary = {term: i for i, (term, _) in enumerate(kept)}
    doc_freq = tuple(cnt for _, cnt in kept)
    idf = tuple(math.log((1 + n) / (1 + cnt)) + 1.0 for cnt in doc_freq)
    return TfidfModel(
        vocabulary=vocabulary,
        doc_freq=doc_freq,
        n_docs=n,
        idf=idf,
        min_df=min_df,
        max_features=max_features,
    )


def transform(model: TfidfModel, doc: TokenizedDoc) -> SparseVector:
    """Project one document onto the fitted vocabulary.

    Out-of-vocabulary tokens are dropped; a document with no in-vocabulary
    tokens maps to the zero vector (the unit-norm invariant is exempt).
    """
    counts: Counter[str] = Counter(doc.tokens)
    pairs = []
    for term, tf in counts.items():
        idx = model.vocabulary.get(term)
        if idx is not None:
            pairs.append((idx, tf * model.idf[idx]))
    if not pairs:
        return SparseVector(indices=(), values=(), dim=model.dim)
    pairs.sort()
    norm = math.sqrt(sum(v * v for _, v in pairs))
    return SparseVector(
        indices=tuple(i for i, _ in pairs),
        values=tuple(v / norm for _, v in pairs),
        dim=model.dim,
    )


def transform_many(model: TfidfModel, docs: list[TokenizedDoc]) -> list[SparseVector]:
    return [transform(model, d) for d in docs]
