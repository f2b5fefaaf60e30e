"""Synthetic labeled corpus with planted class-indicative tokens.

Each document's true class plants 2-5 occurrences of tokens unique to that
class, so a working classifier must recover near-perfect accuracy up to the
injected label noise. Noise resamples a fraction of labels uniformly over
all three classes (a resampled label may coincide with the true one), which
keeps the best achievable accuracy at 1 - noise * 2/3. The rate series is
derived from the stored labels so corpus and series stay consistent.
"""

from __future__ import annotations

import datetime as _dt

import numpy as np

from .corpus import DocCategory, Document, FfrPoint, FfrSeries, RateDecision

MARKERS = {
    RateDecision.LOWER: ("dovish-token", "easing-signal", "downturn-flag"),
    RateDecision.MAINTAIN: ("steady-token", "hold-signal", "balance-flag"),
    RateDecision.RAISE: ("hawkish-token", "tightening-signal", "overheat-flag"),
}

AUTHORS = (
    "Alvarez",
    "Brennan",
    "Castellanos",
    "Delacroix",
    "Eversley",
    "Fontaine",
    "Grimaldi",
    "Holloway",
)

CATEGORIES = tuple(DocCategory)

# Filler vocabulary mixing structural words, policy vocabulary, and terms
# from the bundled lexicons so sentiment output varies across documents.
FILLER = (
    "the a an and or but of in on for with under over across committee members "
    "meeting economy economic outlook conditions labor market markets employment "
    "unemployment payrolls wages inflation prices price disinflation expectations "
    "anchored target percent objective mandate policy monetary stance path rate "
    "rates funds federal reserve board district banks credit lending loans "
    "households businesses consumption spending investment housing construction "
    "manufacturing services exports imports trade dollar currency treasury yields "
    "curve spread term premium liquidity reserves balance sheet assets securities "
    "purchases runoff maturity duration risk risks uncertainty uncertain outlooks "
    "projections forecast forecasts data indicators readings measures core headline "
    "quarterly annual monthly pace trend momentum growth expansion recovery rebound "
    "strong strength robust solid improved improving gains benefit favorable "
    "positive progress achieve stability stable weak weakness decline declining "
    "losses deteriorate adverse negative concern concerns pressures strains stress "
    "recession downturn contraction slowdown softening cooling moderation moderate "
    "gradual measured patient careful vigilant attentive prepared ready appropriate "
    "accommodative restrictive neutral tight tighter loose looser elevated subdued "
    "muted persistent transitory temporary supply demand imbalance imbalances "
    "shock shocks disruption bottlenecks energy food commodities oil gasoline "
    "global domestic foreign international developments financial system banking "
    "capital buffers resilient resilience regulation supervision oversight may "
    "might could would should will continue continues remain remains remained "
    "expect expects expected anticipate anticipates suggest suggests indicate "
    "indicates judge judges assess assessment view views believe believes consider "
    "region regional district firms contacts survey reports noted observed "
    "participants officials staff analysis model models estimate estimates range "
    "time horizon quarter year years period periods month months week weeks"
).split()


def _sentence(words: list[str]) -> str:
    return words[0].capitalize() + " " + " ".join(words[1:]) + "."


def make_synthetic(
    n_docs: int = 600,
    seed: int = 7,
    noise: float = 0.2,
    start_date: _dt.date = _dt.date(2015, 1, 1),
) -> tuple[list[Document], FfrSeries]:
    """Generate the planted-token corpus and its matching rate series."""
    if n_docs < 1:
        raise ValueError(f"n_docs must be >= 1, got {n_docs}")
    if not 0 <= noise < 1:
        raise ValueError(f"noise must be in [0, 1), got {noise}")
    rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
    docs: list[Document] = []
    ffr_points: list[FfrPoint] = []
    rate = 2.0
    for i in range(n_docs):
        true_class = RateDecision(int(rng.integers(0, 3)))
        n_tokens = int(rng.integers(40, 81))
        words = [FILLER[j] for j in rng.integers(0, len(FILLER), size=n_tokens)]
        markers = MARKERS[true_class]
        n_markers = int(rng.integers(2, 6))
        for _ in range(n_markers):
            marker = markers[int(rng.integers(0, len(markers)))]
            pos = int(rng.integers(0, len(words) + 1))
            words.insert(pos, marker)

        sentences = []
        k = 0
        while k < len(words):
            step = int(rng.integers(8, 13))
            chunk = words[k : k + step]
            if len(chunk) == 1 and sentences:
                sentences[-1] = sentences[-1][:-1] + " " + chunk[0] + "."
            else:
                sentences.append(_sentence(chunk))
            k += step
        body = " ".join(sentences)

        label = true_class
        if rng.random() < noise:
            label = RateDecision(int(rng.integers(0, 3)))

        date = start_date + _dt.timedelta(days=i)
        author = AUTHORS[int(rng.integers(0, len(AUTHORS)))]
        category = CATEGORIES[int(rng.integers(0, len(CATEGORIES)))]
        topic_word = FILLER[int(rng.integers(0, len(FILLER)))]
        doc_id = f"doc-{i:04d}"
        docs.append(
            Document(
                id=doc_id,
                title=f"Remarks on {topic_word} ({date.isoformat()})",
                author=author,
                category=category,
                date=date,
                source_url=f"https://example.org/fed/{doc_id}",
                body=body,
                label=label,
            )
        )

        if label == RateDecision.LOWER:
            rate = max(0.0, rate - 0.25)
        elif label == RateDecision.RAISE:
            rate = min(25.0, rate + 0.25)
        ffr_points.append(FfrPoint(date=date, lower_bound=round(rate, 2), decision=label))

    return docs, FfrSeries(points=tuple(ffr_points))


def long_document(n_words: int = 5000, seed: int = 11) -> Document:
    """A single long unlabeled document (latency benchmarks, demo input).

    Mixes the filler vocabulary with a broad synthetic vocabulary so the
    distinct-token count is realistic for a long speech.
    """
    rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
    extra = [f"term{j:04d}" for j in range(1500)]
    pool = list(FILLER) + extra
    words = [pool[j] for j in rng.integers(0, len(pool), size=n_words)]
    sentences = []
    k = 0
    while k < len(words):
        step = int(rng.integers(9, 15))
        chunk = words[k : k + step]
        if len(chunk) == 1 and sentences:
            sentences[-1] = sentences[-1][:-1] + " " + chunk[0] + "."
        else:
            sentences.append(_sentence(chunk))
        k += step
    date = _dt.date(2020, 6, 1)
    return Document(
        id="doc-long-0001",
        title="Extended remarks on the economic outlook",
        author=AUTHORS[0],
        category=DocCategory.SPEECH,
        date=date,
        source_url="https://example.org/fed/doc-long-0001",
        body=" ".join(sentences),
        label=None,
    )
