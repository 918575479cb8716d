"""Prompt templates shared by the extraction and Q&A paths.

The markers below double as the protocol the offline mock backend uses to
recognize what a prompt is asking for, so changing them is a breaking
change for recorded fixtures.
"""

from __future__ import annotations

import re

from .records import FIELD_LABELS

SIX_FIELD_MARKER = "Report exactly these six lines"
DOC_MARKER = "\n\nDocument:\n"

QA_MARKER = "Answer using only the passages below"
PASSAGES_MARKER = "\n\nPassages:\n"
QUESTION_MARKER = "\n\nQuestion: "
NOT_STATED = "not stated in the document"

CANNED_START = "[[canned-response]]\n"
CANNED_END = "\n[[/canned-response]]"


def extraction_instructions() -> str:
    lines = "\n".join(f"{label}: <value or N/A>" for label in FIELD_LABELS)
    return (
        "You are reading text from a research paper that describes an "
        "experiment. "
        f"{SIX_FIELD_MARKER}, in this order, and nothing else. Do not add "
        "redundant or irrelevant explanations.\n\n"
        f"{lines}\n\n"
        "Rules: use N/A when the paper does not state a value. For "
        "multi-stage studies report participants as "
        '"Stage name: count; Stage name: count". When tasks repeat across '
        'phases report "<n> x <m>". List variables as '
        '"name (independent|dependent|control): level, level" separated by '
        "semicolons."
    )


def qa_instructions() -> str:
    return (
        f"{QA_MARKER}. If the passages do not contain the answer, reply "
        f'exactly "{NOT_STATED}".'
    )


_PASSAGE_HEADER = re.compile(r"^\[chunk \d+\]$", re.MULTILINE)


def render_passage(chunk_id: int, text: str) -> str:
    return f"[chunk {chunk_id}]\n{text}"


def strip_passage_headers(passages: str) -> str:
    """Remove [chunk N] markers so header digits never read as data."""
    return _PASSAGE_HEADER.sub("", passages)
