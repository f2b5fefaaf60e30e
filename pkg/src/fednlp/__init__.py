"""Interpretable NLP toolkit for central-bank communications.

Corpus handling, lexicon sentiment, TF-IDF features, a from-scratch
gradient-boosted classifier, perturbation explanations, graph-based
summaries, LDA topics, and an HTTP service exposing all of it.
"""

__version__ = "0.1.0"
