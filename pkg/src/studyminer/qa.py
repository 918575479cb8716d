"""Retrieval-backed question answering over a prepared document.

Chunks are ranked lexically: score = sum over question terms of
tf(term, chunk) * idf(term), idf = ln(1 + N_chunks / (1 + df(term))).
The top chunks go into a prompt that instructs the backend to answer
only from the provided text.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING

from . import prompts
from .errors import BudgetTooSmall
from .preprocess import PreparedDocument, estimate_tokens
from .preprocess.keywords import default_stopwords

if TYPE_CHECKING:
    from .backend import Backend

_WORD = re.compile(r"[a-z0-9]+")

DEFAULT_TOP_K = 4


@dataclass
class Answer:
    question: str
    text: str
    supporting_chunks: list[tuple[int, float]]  # sorted by descending score
    latency: float


def _terms(text: str) -> list[str]:
    return _WORD.findall(text.lower())


def score_chunks(question: str, doc: PreparedDocument) -> list[tuple[int, float]]:
    """Rank all chunks for the question; deterministic tie-break by id.

    An all-stopword question scores every chunk zero, keeping id order.
    """
    if not doc.chunks:
        raise ValueError(f"document {doc.doc_id} has no chunks")
    stop = default_stopwords()
    question_terms = sorted({t for t in _terms(question) if t not in stop})
    chunk_terms = [_terms(c.text) for c in doc.chunks]
    n_chunks = len(doc.chunks)
    scores = []
    for chunk, terms in zip(doc.chunks, chunk_terms):
        score = 0.0
        for term in question_terms:
            tf = terms.count(term)
            if tf == 0:
                continue
            df = sum(1 for other in chunk_terms if term in other)
            score += tf * math.log(1 + n_chunks / (1 + df))
        scores.append((chunk.id, score))
    scores.sort(key=lambda pair: (-pair[1], pair[0]))
    return scores


def answer(
    question: str,
    doc: PreparedDocument,
    backend: "Backend",
    top_k: int = DEFAULT_TOP_K,
) -> Answer:
    """Ask the backend a question grounded in the top-scoring chunks."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    ranked = score_chunks(question, doc)[:top_k]
    chunks_by_id = {c.id: c for c in doc.chunks}
    budget = backend.config.max_tokens

    def prompt_for(selection: list[tuple[int, float]]) -> str:
        passages = "\n\n".join(
            prompts.render_passage(cid, chunks_by_id[cid].text) for cid, _ in selection
        )
        return (
            prompts.qa_instructions()
            + prompts.PASSAGES_MARKER
            + passages
            + prompts.QUESTION_MARKER
            + question
        )

    selection = list(ranked)
    while selection and estimate_tokens(prompt_for(selection)) > budget:
        selection = selection[:-1]  # drop the weakest passage
    if not selection:
        raise BudgetTooSmall(
            f"budget {budget} cannot fit the question plus any passage"
        )
    result = backend.complete(prompt_for(selection))
    return Answer(
        question=question,
        text=result.text,
        supporting_chunks=selection,
        latency=result.latency,
    )
