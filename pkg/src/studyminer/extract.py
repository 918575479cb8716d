"""Build extraction prompts, run them through a backend, and normalize the
parsed records."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator

from . import prompts
from .errors import BudgetTooSmall
from .preprocess import Chunk, PreparedDocument, estimate_tokens
from .records import (
    ExtractionRecord,
    Variable,
    VariableRole,
    normalize_tasks,
    parse_response,
    render_response,
)

if TYPE_CHECKING:
    from .backend import Backend
    from .perf import PerfTracker

__all__ = [
    "CallStats",
    "ExtractionRecord",
    "Variable",
    "VariableRole",
    "build_prompt",
    "extract_corpus",
    "extract_document",
    "normalize_tasks",
    "parse_response",
    "render_response",
    "select_chunks",
]


@dataclass
class CallStats:
    doc_id: str
    latency: float
    prompt_tokens: int


def select_chunks(doc: PreparedDocument, budget_tokens: int) -> list[Chunk]:
    """Pick the chunks an extraction prompt can afford.

    Everything fits when the whole cleaned text does; otherwise chunks are
    taken in descending salience (ties broken by the lower chunk id) while
    the assembled prompt stays under budget, and returned in document
    order.
    """
    if not doc.chunks:
        raise ValueError(f"document {doc.doc_id} has no chunks")
    overhead = prompts.extraction_instructions() + prompts.DOC_MARKER
    if estimate_tokens(overhead + doc.cleaned_text) <= budget_tokens:
        return list(doc.chunks)
    selected: list[Chunk] = []
    for chunk in sorted(doc.chunks, key=lambda c: (-c.salience, c.id)):
        candidate = sorted(selected + [chunk], key=lambda c: c.id)
        body = "\n\n".join(c.text for c in candidate)
        if estimate_tokens(overhead + body) <= budget_tokens:
            selected = candidate
    if not selected:
        raise BudgetTooSmall(
            f"budget {budget_tokens} cannot fit the instructions plus any chunk"
        )
    return selected


def _assemble_prompt(doc: PreparedDocument, chunks: list[Chunk]) -> str:
    if len(chunks) == len(doc.chunks):
        body = doc.cleaned_text
    else:
        body = "\n\n".join(c.text for c in chunks)
    return prompts.extraction_instructions() + prompts.DOC_MARKER + body


def build_prompt(doc: PreparedDocument, budget_tokens: int) -> str:
    return _assemble_prompt(doc, select_chunks(doc, budget_tokens))


def extract_document(
    doc: PreparedDocument, backend: "Backend", budget_tokens: int | None = None
) -> tuple[ExtractionRecord, CallStats]:
    """Prompt the backend once for a document and normalize the response.

    Unparseable responses still yield an (all-unknown) record so corpus
    runs never silently drop papers; backend errors propagate.
    """
    budget = budget_tokens if budget_tokens is not None else backend.config.max_tokens
    budget = min(budget, backend.config.max_tokens)
    included = select_chunks(doc, budget)
    result = backend.complete(_assemble_prompt(doc, included))
    record = parse_response(result.text)
    record.doc_id = doc.doc_id
    record.provenance = sorted(c.id for c in included)
    stats = CallStats(doc.doc_id, result.latency, result.prompt_token_estimate)
    return record, stats


def extract_corpus(
    docs: Iterable[PreparedDocument],
    backend: "Backend",
    budget_tokens: int | None = None,
    workers: int = 1,
    perf: "PerfTracker | None" = None,
) -> Iterator[ExtractionRecord]:
    """Extract documents concurrently, yielding records in input order.

    Completion order does not affect output order, so runs are
    deterministic with the mock backend regardless of worker count.
    """
    docs = list(docs)
    if perf is not None:
        perf.sample_memory()

    def run(doc: PreparedDocument) -> ExtractionRecord:
        record, stats = extract_document(doc, backend, budget_tokens)
        if perf is not None:
            perf.record_call(stats.doc_id, stats.latency, stats.prompt_tokens)
            perf.sample_memory()
        return record

    if workers <= 1:
        for doc in docs:
            yield run(doc)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run, doc) for doc in docs]
        for future in futures:
            yield future.result()
