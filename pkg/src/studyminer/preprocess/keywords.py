"""Degree-based keyword ranking over stopword-delimited candidates.

Candidate phrases are maximal runs of non-stopword words (split at
stopwords and punctuation, capped at three words). Each member word's
degree accumulates the lengths of the phrases it appears in; a word's
score is freq(word) * degree(word) / freq(word), i.e. its degree. Ranked
terms are the member words, highest degree first, ties lexicographic.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources
from pathlib import Path

_WORD = re.compile(r"[a-z][a-z0-9'-]*")
_FRAGMENT_SPLIT = re.compile(r"[^A-Za-z0-9'\s-]+")

MAX_PHRASE_WORDS = 3


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    data = resources.files("studyminer.preprocess").joinpath("data/stopwords.txt")
    return frozenset(load_wordlist_text(data.read_text("utf-8")))


def load_wordlist_text(text: str) -> list[str]:
    return [line.strip() for line in text.splitlines() if line.strip()]


def load_wordlist(path: str | Path) -> list[str]:
    return load_wordlist_text(Path(path).read_text("utf-8"))


def candidate_phrases(text: str, stopwords: frozenset[str] | None = None) -> list[list[str]]:
    stop = default_stopwords() if stopwords is None else stopwords
    phrases: list[list[str]] = []
    for fragment in _FRAGMENT_SPLIT.split(text.lower()):
        run: list[str] = []
        for word in _WORD.findall(fragment):
            if word in stop:
                if run:
                    phrases.append(run)
                    run = []
            else:
                run.append(word)
        if run:
            phrases.append(run)
    # cap phrase length so one long noun pile does not dominate degrees
    capped: list[list[str]] = []
    for phrase in phrases:
        for i in range(0, len(phrase), MAX_PHRASE_WORDS):
            capped.append(phrase[i : i + MAX_PHRASE_WORDS])
    return capped


def extract_keywords(
    text: str, k: int, stopwords: frozenset[str] | None = None
) -> list[tuple[str, float]]:
    """Top-k (term, score) pairs, deterministic for identical input."""
    if k < 1:
        raise ValueError("k must be >= 1")
    degree: dict[str, float] = {}
    for phrase in candidate_phrases(text, stopwords):
        for word in phrase:
            degree[word] = degree.get(word, 0.0) + len(phrase)
    ranked = sorted(degree.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]
