"""Turn raw document text into a cleaned, sectioned, chunked form with
keyword and entity annotations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..ingest import FormatKind, RawDocument
from .chunking import MIN_BUDGET, Chunk, chunk, estimate_tokens
from .entities import (
    EntityKind,
    EntitySpan,
    PhaseMention,
    QuantityMention,
    phase_mentions,
    quantity_mentions,
    recruitment_mentions,
    tag_entities,
)
from .keywords import default_stopwords, extract_keywords, load_wordlist
from .sections import Section, segment_sections, strip_noise

DEFAULT_BUDGET_TOKENS = 4096
DEFAULT_KEYWORD_COUNT = 20


@dataclass
class PreparedDocument:
    doc_id: str
    sections: list[Section]
    keywords: list[tuple[str, float]]
    entities: list[EntitySpan]
    chunks: list[Chunk]

    @property
    def cleaned_text(self) -> str:
        return "".join(c.text for c in self.chunks)

    def to_json(self) -> str:
        return json.dumps(
            {
                "doc_id": self.doc_id,
                "sections": [
                    {"title": s.title, "body": s.body, "ordinal": s.ordinal}
                    for s in self.sections
                ],
                "keywords": [[term, score] for term, score in self.keywords],
                "entities": [
                    {
                        "start": e.start,
                        "end": e.end,
                        "kind": e.kind.value,
                        "surface": e.surface,
                        "value": e.value,
                    }
                    for e in self.entities
                ],
                "chunks": [
                    {
                        "id": c.id,
                        "text": c.text,
                        "token_estimate": c.token_estimate,
                        "section_ordinals": c.section_ordinals,
                        "salience": c.salience,
                    }
                    for c in self.chunks
                ],
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_dict(cls, obj: dict) -> "PreparedDocument":
        return cls(
            doc_id=obj["doc_id"],
            sections=[
                Section(s["title"], s["body"], s["ordinal"]) for s in obj["sections"]
            ],
            keywords=[(term, score) for term, score in obj["keywords"]],
            entities=[
                EntitySpan(
                    e["start"], e["end"], EntityKind(e["kind"]), e["surface"], e["value"]
                )
                for e in obj["entities"]
            ],
            chunks=[
                Chunk(
                    c["id"], c["text"], c["token_estimate"],
                    c["section_ordinals"], c["salience"],
                )
                for c in obj["chunks"]
            ],
        )


def prepare_document(
    raw: RawDocument,
    budget_tokens: int = DEFAULT_BUDGET_TOKENS,
    keyword_count: int = DEFAULT_KEYWORD_COUNT,
    stopwords: frozenset[str] | None = None,
    gazetteer: tuple[str, ...] | None = None,
) -> PreparedDocument:
    """Run the full preprocessing pass over one ingested document.

    Pure function of its inputs: the same raw document yields bit-identical
    output regardless of run or worker count.
    """
    page_texts = raw.text.split("\x0c") if raw.format is FormatKind.PDF else None
    sections = strip_noise(segment_sections(raw.text), page_texts)
    cleaned = "".join(s.body for s in sections)
    section_spans = []
    offset = 0
    for section in sections:
        section_spans.append((section.ordinal, offset, offset + len(section.body)))
        offset += len(section.body)
    keywords = extract_keywords(cleaned, keyword_count, stopwords)
    entities = tag_entities(cleaned, gazetteer)
    chunks = chunk(cleaned, budget_tokens, entities, keywords, section_spans)
    return PreparedDocument(raw.id, sections, keywords, entities, chunks)


__all__ = [
    "Chunk",
    "DEFAULT_BUDGET_TOKENS",
    "DEFAULT_KEYWORD_COUNT",
    "EntityKind",
    "EntitySpan",
    "MIN_BUDGET",
    "PhaseMention",
    "PreparedDocument",
    "QuantityMention",
    "Section",
    "chunk",
    "default_stopwords",
    "estimate_tokens",
    "extract_keywords",
    "load_wordlist",
    "phase_mentions",
    "prepare_document",
    "quantity_mentions",
    "recruitment_mentions",
    "segment_sections",
    "strip_noise",
    "tag_entities",
]
