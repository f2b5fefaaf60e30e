"""Document model, corpus ingestion, tokenization, and term statistics.

A corpus is a JSON array of document records (see ``load_corpus``). Text is
tokenized with a rule-based Unicode tokenizer and segmented into sentences
with an abbreviation-aware splitter; everything downstream (sentiment,
features, summarization, topics) consumes the resulting ``TokenizedDoc``.
"""

from __future__ import annotations

import datetime as _dt
import json
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum, IntEnum
from importlib import resources

from .errors import SchemaError


class RateDecision(IntEnum):
    """Direction of the target Federal Funds Rate change."""

    LOWER = 0
    MAINTAIN = 1
    RAISE = 2

    @classmethod
    def from_str(cls, s: str) -> "RateDecision":
        try:
            return _DECISION_BY_NAME[s]
        except KeyError:
            raise SchemaError(f"unknown rate decision {s!r}") from None

    def to_str(self) -> str:
        return self.name.lower()


_DECISION_BY_NAME = {d.name.lower(): d for d in RateDecision}


class DocCategory(str, Enum):
    SPEECH = "speech"
    MINUTES = "minutes"
    TRANSCRIPT = "transcript"
    PRESS_RELEASE = "press_release"


@dataclass(frozen=True, slots=True)
class Document:
    """One Fed communication with metadata and an optional decision label."""

    id: str
    title: str
    author: str
    category: DocCategory
    date: _dt.date
    source_url: str
    body: str
    label: RateDecision | None = None


@dataclass(frozen=True, slots=True)
class TokenizedDoc:
    """Lowercased tokens plus half-open sentence spans over them.

    ``sentence_texts`` keeps the original sentence strings so extractive
    summaries can quote the document verbatim.
    """

    doc_id: str
    tokens: tuple[str, ...]
    sentences: tuple[tuple[int, int], ...]
    sentence_texts: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class TermStats:
    word_count: int
    sentence_count: int
    top_terms: tuple[tuple[str, int], ...]


@dataclass(frozen=True, slots=True)
class FfrPoint:
    date: _dt.date
    lower_bound: float
    decision: RateDecision


@dataclass(frozen=True, slots=True)
class FfrSeries:
    points: tuple[FfrPoint, ...]


# A token is a maximal run of Unicode letters/digits; apostrophes and hyphens
# survive only between such runs ("10-year", "fed's").
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’-][^\W_]+)*", re.UNICODE)

# Runs of terminal punctuation; a boundary is valid only when followed by
# whitespace + an uppercase letter, or end of text.
_PUNCT_RUN_RE = re.compile(r"[.!?]+")


def tokenize(body: str) -> list[str]:
    """Lowercased tokens of ``body``; all non-token characters separate."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(body)]


def _is_abbreviation_end(text: str, end: int, abbreviations: frozenset[str]) -> bool:
    """True when the text ending at ``end`` (exclusive) closes an abbreviation."""
    for abbr in abbreviations:
        start = end - len(abbr)
        if start < 0 or not text.startswith(abbr, start):
            continue
        if start == 0 or not (text[start - 1].isalnum() or text[start - 1] == "."):
            return True
    return False


def _sentence_segments(body: str, abbreviations: frozenset[str]) -> list[str]:
    """Split ``body`` into sentence substrings (whitespace-trimmed)."""
    segments: list[str] = []
    start = 0
    for m in _PUNCT_RUN_RE.finditer(body):
        end = m.end()
        tail = body[end:]
        stripped = tail.lstrip()
        at_eot = stripped == ""
        followed_by_upper = tail[:1].isspace() and stripped[:1].isupper()
        if not (at_eot or followed_by_upper):
            continue
        if m.group(0).endswith(".") and _is_abbreviation_end(body, end, abbreviations):
            continue
        segment = body[start:end].strip()
        if segment:
            segments.append(segment)
        start = end
    trailing = body[start:].strip()
    if trailing:
        segments.append(trailing)
    return segments


def split_sentences(
    body: str, abbreviations: frozenset[str] | None = None
) -> tuple[list[tuple[int, int]], list[str]]:
    """Sentence spans over ``tokenize(body)`` plus the raw sentence strings.

    Segments that contain no tokens (e.g. stray punctuation) are dropped, so
    the returned spans exactly tile the token list.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    spans: list[tuple[int, int]] = []
    texts: list[str] = []
    pos = 0
    for segment in _sentence_segments(body, abbreviations):
        n = len(tokenize(segment))
        if n == 0:
            continue
        spans.append((pos, pos + n))
        texts.append(segment)
        pos += n
    return spans, texts


def tokenize_document(
    doc: Document, abbreviations: frozenset[str] | None = None
) -> TokenizedDoc:
    return tokenize_text(doc.body, doc_id=doc.id, abbreviations=abbreviations)


def tokenize_text(
    body: str, doc_id: str = "", abbreviations: frozenset[str] | None = None
) -> TokenizedDoc:
    tokens = tokenize(body)
    spans, texts = split_sentences(body, abbreviations)
    return TokenizedDoc(
        doc_id=doc_id,
        tokens=tuple(tokens),
        sentences=tuple(spans),
        sentence_texts=tuple(texts),
    )


def term_stats(doc: TokenizedDoc, stopwords: frozenset[str], k: int) -> TermStats:
    """Word/sentence counts and the k most frequent non-stopword terms.

    Frequency ties break in ascending lexicographic order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    counts = Counter(t for t in doc.tokens if t not in stopwords)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return TermStats(
        word_count=len(doc.tokens),
        sentence_count=len(doc.sentences),
        top_terms=tuple(ranked[:k]),
    )


# --- corpus file I/O -------------------------------------------------------

_REQUIRED_FIELDS = ("id", "title", "author", "category", "date", "source_url", "body")


def _parse_date(value: str, where: str) -> _dt.date:
    try:
        return _dt.date.fromisoformat(value)
    except (TypeError, ValueError):
        raise SchemaError(f"{where}: invalid ISO-8601 date {value!r}") from None


def record_to_document(record: dict, index: int) -> Document:
    if not isinstance(record, dict):
        raise SchemaError(f"record {index}: expected an object")
    for field in _REQUIRED_FIELDS:
        if field not in record:
            raise SchemaError(f"record {index}: missing field {field!r}")
        if not isinstance(record[field], str):
            raise SchemaError(f"record {index}: field {field!r} must be a string")
    if not record["id"]:
        raise SchemaError(f"record {index}: field 'id' must be nonempty")
    try:
        category = DocCategory(record["category"])
    except ValueError:
        raise SchemaError(
            f"record {index}: unknown category {record['category']!r}"
        ) from None
    label_raw = record.get("label")
    if label_raw is None:
        label = None
    elif isinstance(label_raw, str):
        try:
            label = RateDecision.from_str(label_raw)
        except SchemaError:
            raise SchemaError(
                f"record {index}: unknown label {label_raw!r}"
            ) from None
    else:
        raise SchemaError(f"record {index}: field 'label' must be a string or null")
    return Document(
        id=record["id"],
        title=record["title"],
        author=record["author"],
        category=category,
        date=_parse_date(record["date"], f"record {index}: field 'date'"),
        source_url=record["source_url"],
        body=record["body"],
        label=label,
    )


def document_to_record(doc: Document) -> dict:
    return {
        "id": doc.id,
        "title": doc.title,
        "author": doc.author,
        "category": doc.category.value,
        "date": doc.date.isoformat(),
        "source_url": doc.source_url,
        "body": doc.body,
        "label": None if doc.label is None else doc.label.to_str(),
    }


def load_corpus(path) -> list[Document]:
    """Load a corpus file: a UTF-8 JSON array of document records.

    The whole file is rejected on the first malformed record; the error names
    the record index and offending field.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(data, list):
        raise SchemaError(f"{path}: top-level value must be a JSON array")
    docs = []
    seen: set[str] = set()
    for i, record in enumerate(data):
        doc = record_to_document(record, i)
        if doc.id in seen:
            raise SchemaError(f"record {i}: duplicate id {doc.id!r}")
        seen.add(doc.id)
        docs.append(doc)
    return docs


def save_corpus(docs: list[Document], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([document_to_record(d) for d in docs], fh, indent=1)


def save_ffr_series(series: FfrSeries, path) -> None:
    records = [
        {
            "date": p.date.isoformat(),
            "lower_bound": p.lower_bound,
            "decision": p.decision.to_str(),
        }
        for p in series.points
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(records, fh, indent=1)


def load_ffr_series(path) -> FfrSeries:
    """Load the FFR target series: JSON array of {date, lower_bound, decision}."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(data, list):
        raise SchemaError(f"{path}: top-level value must be a JSON array")
    points = []
    prev: _dt.date | None = None
    for i, rec in enumerate(data):
        if not isinstance(rec, dict):
            raise SchemaError(f"record {i}: expected an object")
        for field in ("date", "lower_bound", "decision"):
            if field not in rec:
                raise SchemaError(f"record {i}: missing field {field!r}")
        date = _parse_date(rec["date"], f"record {i}: field 'date'")
        rate = rec["lower_bound"]
        if not isinstance(rate, (int, float)) or not 0.0 <= float(rate) <= 25.0:
            raise SchemaError(f"record {i}: lower_bound must be in [0, 25]")
        if prev is not None and date <= prev:
            raise SchemaError(f"record {i}: dates must be strictly increasing")
        prev = date
        points.append(
            FfrPoint(
                date=date,
                lower_bound=float(rate),
                decision=RateDecision.from_str(rec["decision"]),
            )
        )
    return FfrSeries(points=tuple(points))


# --- bundled word lists ----------------------------------------------------


def load_wordlist(path) -> frozenset[str]:
    """One entry per line, UTF-8; blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())


def _read_data_lines(name: str) -> list[str]:
    text = resources.files("fednlp.data").joinpath(name).read_text("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


_STOPWORDS: frozenset[str] | None = None
_ABBREVIATIONS: frozenset[str] | None = None


def default_stopwords() -> frozenset[str]:
    global _STOPWORDS
    if _STOPWORDS is None:
        _STOPWORDS = frozenset(_read_data_lines("stopwords.txt"))
    return _STOPWORDS


def default_abbreviations() -> frozenset[str]:
    global _ABBREVIATIONS
    if _ABBREVIATIONS is None:
        _ABBREVIATIONS = frozenset(_read_data_lines("abbreviations.txt"))
    return _ABBREVIATIONS
