"""Section segmentation and noise removal."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import AllContentStripped

_HEADING_LEXICON = {
    "abstract", "introduction", "background", "related work", "method",
    "methods", "methodology", "evaluation", "results", "discussion",
    "conclusion", "conclusions", "references", "bibliography",
    "acknowledgments", "acknowledgements", "appendix",
}

_DROP_TITLES = {"references", "bibliography", "acknowledgments", "acknowledgements"}

_NUMBERED_HEADING = re.compile(r"^\d+(\.\d+)*\.?\s+[A-Z]\S*")
_ALL_CAPS_LINE = re.compile(r"^[A-Z][A-Z0-9 \-:&']{1,50}$")
_PAGE_NUMBER_LINE = re.compile(r"^\d{1,4}$")

HEADER_REPEAT_THRESHOLD = 0.6  # line must appear on this share of pages


@dataclass
class Section:
    title: str
    body: str  # includes the heading line, so bodies partition the text
    ordinal: int


def _normalize_title(line: str) -> str:
    stripped = re.sub(r"^\d+(\.\d+)*\.?\s*", "", line.strip())
    return stripped.rstrip(":. ").lower()


def _is_heading(line: str) -> bool:
    stripped = line.strip()
    if not stripped or len(stripped) > 60:
        return False
    if _normalize_title(stripped) in _HEADING_LEXICON:
        return True
    if _NUMBERED_HEADING.match(stripped) and not stripped.endswith((".", ",", ";")):
        return True
    return bool(_ALL_CAPS_LINE.match(stripped)) and len(stripped) >= 3


def segment_sections(text: str) -> list[Section]:
    """Split text at heading lines; content before the first heading is
    a section titled "_front". Headingless text yields one section."""
    if not text:
        raise ValueError("cannot segment empty text")
    sections: list[Section] = []
    title = "_front"
    buffer: list[str] = []

    def flush() -> None:
        body = "".join(buffer)
        if body:
            sections.append(Section(title, body, len(sections)))

    for line in text.splitlines(keepends=True):
        if _is_heading(line):
            flush()
            title = line.strip()
            buffer = [line]
        else:
            buffer.append(line)
    flush()
    if not sections:
        sections.append(Section("_front", text, 0))
    return sections


def _repeated_lines(page_texts: list[str]) -> set[str]:
    if len(page_texts) < 2:
        return set()
    counts: dict[str, int] = {}
    for page in page_texts:
        for line in {ln.strip() for ln in page.splitlines() if ln.strip()}:
            counts[line] = counts.get(line, 0) + 1
    cutoff = HEADER_REPEAT_THRESHOLD * len(page_texts)
    return {line for line, n in counts.items() if n >= cutoff}


def strip_noise(sections: list[Section], page_texts: list[str] | None = None) -> list[Section]:
    """Drop reference/acknowledgment sections, running headers and footers
    (lines repeating on most pages), and bare page-number lines."""
    repeated = _repeated_lines(page_texts or [])
    cleaned: list[Section] = []
    for section in sections:
        if _normalize_title(section.title) in _DROP_TITLES:
            continue
        kept_lines = [
            line
            for line in section.body.splitlines(keepends=True)
            if line.strip() not in repeated
            and not _PAGE_NUMBER_LINE.match(line.strip())
        ]
        body = "".join(kept_lines)
        if body.strip():
            cleaned.append(Section(section.title, body, len(cleaned)))
    if not cleaned:
        raise AllContentStripped("noise removal left no content")
    return cleaned
