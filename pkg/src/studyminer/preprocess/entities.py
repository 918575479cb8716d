"""Rule and gazetteer tagging of quantities, recruitment sources, and
study phases. Deterministic by construction; no learned models."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .keywords import load_wordlist, load_wordlist_text

SPELLED_NUMBERS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
    "twenty": 20,
}

# Nouns that make a nearby number an experimental quantity.
QUANTITY_TRIGGERS = {
    "participant", "subject", "user", "respondent", "trial", "task",
    "session", "block", "condition",
}

PARTICIPANT_TRIGGERS = {"participant", "subject", "user", "respondent"}

QUANTITY_WINDOW = 3  # max word distance between number and trigger

_PHASE_PATTERN = re.compile(
    r"\b(study|phase|experiment|stage)\s+(\d+|%s)\b" % "|".join(SPELLED_NUMBERS),
    re.IGNORECASE,
)
_TOKEN = re.compile(r"\d[\d,]*|[A-Za-z][A-Za-z'-]*")


class EntityKind(enum.Enum):
    QUANTITY = "quantity"
    RECRUITMENT_SOURCE = "recruitment_source"
    STUDY_PHASE = "study_phase"


@dataclass
class EntitySpan:
    start: int
    end: int
    kind: EntityKind
    surface: str
    value: int | None = None  # parsed integer for quantities


@dataclass
class QuantityMention:
    span: EntitySpan
    trigger: str  # singular trigger noun the number attaches to


@dataclass
class PhaseMention:
    span: EntitySpan
    label: str  # study / phase / experiment / stage
    number: int


@lru_cache(maxsize=1)
def default_recruitment_sources() -> tuple[str, ...]:
    data = resources.files("studyminer.preprocess").joinpath("data/recruitment_sources.txt")
    return tuple(load_wordlist_text(data.read_text("utf-8")))


def load_gazetteer(path: str | Path) -> tuple[str, ...]:
    return tuple(load_wordlist(path))


def _parse_number(token: str) -> int | None:
    lowered = token.lower()
    if lowered in SPELLED_NUMBERS:
        return SPELLED_NUMBERS[lowered]
    if token[0].isdigit():
        try:
            return int(token.replace(",", ""))
        except ValueError:
            return None
    return None


def phase_mentions(text: str) -> list[PhaseMention]:
    out = []
    for m in _PHASE_PATTERN.finditer(text):
        number = _parse_number(m.group(2))
        if number is None:
            continue
        span = EntitySpan(m.start(), m.end(), EntityKind.STUDY_PHASE, m.group(0))
        out.append(PhaseMention(span, m.group(1).lower(), number))
    return out


def quantity_mentions(text: str) -> list[QuantityMention]:
    """Numbers (literal or spelled one..twenty) within QUANTITY_WINDOW words
    of a trigger noun. Numbers inside study-phase expressions are skipped so
    "Study 2" never reads as a count of two."""
    phase_ranges = [(p.span.start, p.span.end) for p in phase_mentions(text)]
    tokens = [(m.group(0), m.start(), m.end()) for m in _TOKEN.finditer(text)]
    mentions = []
    for i, (token, start, end) in enumerate(tokens):
        value = _parse_number(token)
        if value is None or value < 0:
            continue
        if any(ps <= start < pe for ps, pe in phase_ranges):
            continue
        trigger = None
        best_distance = QUANTITY_WINDOW + 1
        for j in range(max(0, i - QUANTITY_WINDOW), min(len(tokens), i + QUANTITY_WINDOW + 1)):
            if j == i:
                continue
            word = tokens[j][0].lower()
            stem = word[:-1] if word.endswith("s") else word
            if stem in QUANTITY_TRIGGERS:
                distance = abs(j - i)
                # prefer the nearest trigger; on ties the following one
                if distance < best_distance or (distance == best_distance and j > i):
                    best_distance = distance
                    trigger = stem
        if trigger is not None:
            span = EntitySpan(start, end, EntityKind.QUANTITY, text[start:end], value)
            mentions.append(QuantityMention(span, trigger))
    return mentions


def recruitment_mentions(
    text: str, gazetteer: tuple[str, ...] | None = None
) -> list[EntitySpan]:
    phrases = default_recruitment_sources() if gazetteer is None else gazetteer
    lowered = text.lower()
    taken: list[tuple[int, int]] = []
    spans = []
    for phrase in sorted(phrases, key=len, reverse=True):
        for m in re.finditer(r"(?<![a-z0-9])%s(?![a-z0-9])" % re.escape(phrase.lower()), lowered):
            if any(s < m.end() and m.start() < e for s, e in taken):
                continue
            taken.append((m.start(), m.end()))
            spans.append(
                EntitySpan(
                    m.start(), m.end(), EntityKind.RECRUITMENT_SOURCE,
                    text[m.start() : m.end()],
                )
            )
    return spans


def tag_entities(text: str, gazetteer: tuple[str, ...] | None = None) -> list[EntitySpan]:
    """All entity spans, sorted by position. surface == text[start:end]."""
    spans = [p.span for p in phase_mentions(text)]
    spans.extend(q.span for q in quantity_mentions(text))
    spans.extend(recruitment_mentions(text, gazetteer))
    spans.sort(key=lambda s: (s.start, s.end, s.kind.value))
    return spans
