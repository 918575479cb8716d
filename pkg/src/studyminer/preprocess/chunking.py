"""Token estimation and budgeted chunking.

The estimator is chars/4 rounded up: provider-agnostic, monotone in
length, and cheap. Chunks are contiguous slices of the cleaned text, so
joining them in id order reproduces the input byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .entities import EntitySpan

MIN_BUDGET = 64

_PARAGRAPH_BREAK = re.compile(r"\n{2,}")
_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")


@dataclass
class Chunk:
    id: int
    text: str
    token_estimate: int
    section_ordinals: list[int] = field(default_factory=list)
    salience: float = 0.0


def estimate_tokens(text: str) -> int:
    return -(-len(text) // 4)  # ceil(len / 4)


def _boundaries(text: str, pattern: re.Pattern) -> list[int]:
    cuts = [m.end() for m in pattern.finditer(text)]
    if not cuts or cuts[-1] != len(text):
        cuts.append(len(text))
    return cuts


def _split_spans(text: str, offset: int, max_chars: int, pattern: re.Pattern | None) -> list[tuple[int, int]]:
    """Greedy packing of pattern-delimited segments into <= max_chars spans."""
    if pattern is None:  # hard character split, the last resort
        return [
            (offset + i, offset + min(i + max_chars, len(text)))
            for i in range(0, len(text), max_chars)
        ]
    spans: list[tuple[int, int]] = []
    start = 0
    prev = 0
    for cut in _boundaries(text, pattern):
        if cut - start > max_chars:
            if prev > start:
                spans.append((offset + start, offset + prev))
                start = prev
            if cut - start > max_chars:  # single segment too large: recurse finer
                finer = _SENTENCE_BREAK if pattern is _PARAGRAPH_BREAK else None
                spans.extend(_split_spans(text[start:cut], offset + start, max_chars, finer))
                start = cut
        prev = cut
    if start < len(text):
        spans.append((offset + start, offset + len(text)))
    return spans


def _keyword_mass(text: str, keywords: list[tuple[str, float]]) -> float:
    lowered = text.lower()
    mass = 0.0
    for term, score in keywords:
        hits = len(re.findall(r"(?<![a-z0-9])%s(?![a-z0-9])" % re.escape(term), lowered))
        mass += hits * score
    return mass


def chunk(
    text: str,
    budget_tokens: int,
    entities: list[EntitySpan] | None = None,
    keywords: list[tuple[str, float]] | None = None,
    section_spans: list[tuple[int, int, int]] | None = None,
) -> list[Chunk]:
    """Split text into chunks whose token estimate fits the budget.

    Splits prefer paragraph boundaries, then sentences, then a hard
    character cut. salience = keyword-score mass + 2 * entity count.
    section_spans is a list of (ordinal, start, end) over the same text.
    """
    if budget_tokens < MIN_BUDGET:
        raise ValueError(f"budget_tokens must be >= {MIN_BUDGET}")
    if not text:
        return []
    max_chars = budget_tokens * 4  # estimate <= budget iff len <= 4 * budget
    entities = entities or []
    keywords = keywords or []
    chunks: list[Chunk] = []
    for cid, (start, end) in enumerate(_split_spans(text, 0, max_chars, _PARAGRAPH_BREAK)):
        piece = text[start:end]
        ordinals = [
            ordinal
            for ordinal, s_start, s_end in (section_spans or [])
            if s_start < end and start < s_end
        ]
        entity_count = sum(1 for e in entities if start <= e.start < end)
        chunks.append(
            Chunk(
                id=cid,
                text=piece,
                token_estimate=estimate_tokens(piece),
                section_ordinals=ordinals,
                salience=_keyword_mass(piece, keywords) + 2.0 * entity_count,
            )
        )
    return chunks
