"""Lexicon-based sentiment scoring under a generic and a financial lexicon.

Polarity is the count ratio (P - N) / (P + N) over positive/negative hits;
subjectivity is the fraction of tokens carrying any lexicon category. Both
are bounded by construction. Categories beyond positive/negative (the
financial lexicon's uncertainty, modal, litigious, constraining buckets)
feed subjectivity and the per-category counts but never polarity.
"""

from __future__ import annotations

import csv
import datetime as _dt
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .corpus import Document, TokenizedDoc, tokenize_document
from .errors import EmptyDocumentError, SchemaError


class Category(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNCERTAINTY = "uncertainty"
    LITIGIOUS = "litigious"
    STRONG_MODAL = "strong_modal"
    WEAK_MODAL = "weak_modal"
    CONSTRAINING = "constraining"


GENERIC_CATEGORIES = frozenset({Category.POSITIVE, Category.NEGATIVE})


@dataclass(frozen=True, slots=True)
class Lexicon:
    name: str
    entries: dict[str, frozenset[Category]]

    def categories_of(self, token: str) -> frozenset[Category]:
        return self.entries.get(token, frozenset())


@dataclass(frozen=True, slots=True)
class SentimentScore:
    polarity: float
    subjectivity: float
    category_counts: dict[str, int]
    token_count: int


@dataclass(frozen=True, slots=True)
class SentimentSeries:
    author: str
    points: tuple[tuple[_dt.date, float], ...]


def load_lexicon(path, name: str) -> Lexicon:
    """Load a lexicon CSV with header ``term,category``, one category per row.

    Duplicate (term, category) rows collapse; a term listed under several
    categories gets the union. The generic lexicon admits only
    positive/negative rows.
    """
    entries: dict[str, set[Category]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["term", "category"]:
            raise SchemaError(f"{path}: expected header 'term,category'")
        for i, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise SchemaError(f"{path}:{i}: expected 'term,category'")
            term = row[0].strip().lower()
            if not term:
                raise SchemaError(f"{path}:{i}: empty term")
            try:
                category = Category(row[1].strip().lower())
            except ValueError:
                raise SchemaError(
                    f"{path}:{i}: unknown category {row[1].strip()!r}"
                ) from None
            if name == "generic" and category not in GENERIC_CATEGORIES:
                raise SchemaError(
                    f"{path}:{i}: category {category.value!r} not allowed in a generic lexicon"
                )
            entries.setdefault(term, set()).add(category)
    return Lexicon(name=name, entries={t: frozenset(c) for t, c in entries.items()})


def make_lexicon(name: str, entries: dict[str, set[Category | str]]) -> Lexicon:
    """Build a lexicon in memory (test and tooling convenience).

    Category names are normalized to the enum; unknown names raise
    SchemaError just as load_lexicon would.
    """
    out: dict[str, frozenset[Category]] = {}
    for term, cats in entries.items():
        if not cats:
            continue
        try:
            normalized = frozenset(Category(c) for c in cats)
        except ValueError as exc:
            raise SchemaError(f"term {term!r}: {exc}") from None
        if name == "generic" and not normalized <= GENERIC_CATEGORIES:
            raise SchemaError(
                f"term {term!r}: non-polarity category in a generic lexicon"
            )
        out[term.lower()] = normalized
    return Lexicon(name=name, entries=out)


def score_document(doc: TokenizedDoc, lex: Lexicon) -> SentimentScore:
    """Score one tokenized document against one lexicon.

    polarity = (P - N) / (P + N), 0 when no polar hits; subjectivity is the
    share of tokens matching any category.
    """
    if not doc.tokens:
        raise EmptyDocumentError(f"document {doc.doc_id!r} has no tokens")
    counts = {c: 0 for c in Category}
    matched = 0
    for token in doc.tokens:
        cats = lex.categories_of(token)
        if not cats:
            continue
        matched += 1
        for c in cats:
            counts[c] += 1
    pos = counts[Category.POSITIVE]
    neg = counts[Category.NEGATIVE]
    polarity = 0.0 if pos + neg == 0 else (pos - neg) / (pos + neg)
    subjectivity = matched / len(doc.tokens)
    return SentimentScore(
        polarity=polarity,
        subjectivity=subjectivity,
        category_counts={c.value: n for c, n in counts.items()},
        token_count=len(doc.tokens),
    )


def sentiment_series(docs: list[Document], author: str, lex: Lexicon) -> SentimentSeries:
    """Per-document polarity for one author, ordered by (date, id).

    Documents with no tokens are skipped; an unknown author yields an empty
    series.
    """
    selected = sorted(
        (d for d in docs if d.author == author), key=lambda d: (d.date, d.id)
    )
    points = []
    for doc in selected:
        tokenized = tokenize_document(doc)
        if not tokenized.tokens:
            continue
        points.append((doc.date, score_document(tokenized, lex).polarity))
    return SentimentSeries(author=author, points=tuple(points))


def _bundled(name: str, lexicon_name: str) -> Lexicon:
    with resources.as_file(resources.files("fednlp.data").joinpath(name)) as path:
        return load_lexicon(path, lexicon_name)


def default_generic_lexicon() -> Lexicon:
    return _bundled("lexicon_generic.csv", "generic")


def default_financial_lexicon() -> Lexicon:
    return _bundled("lexicon_financial.csv", "financial")
