from __future__ import annotations

import httpx
import pytest

from studyminer import prompts
from studyminer.backend import Backend, BackendConfig, Provider
from studyminer.errors import BudgetTooSmall, ProviderError
from studyminer.extract import build_prompt, extract_corpus, extract_document, select_chunks
from studyminer.ingest import FormatKind, RawDocument
from studyminer.preprocess import Chunk, PreparedDocument, estimate_tokens, prepare_document
from studyminer.records import FIELD_LABELS

FIXTURE_PAPER = (
    "Method\n"
    "We recruited 24 participants via Prolific for a user study. "
    "Each participant completed 3 tasks. "
    "The independent variable was input technique (pen, touch). "
    "Every participant performed 12 trials per task.\n"
)


def prepare(text: str, doc_id: str = "doc1") -> PreparedDocument:
    raw = RawDocument(doc_id, f"mem://{doc_id}", FormatKind.PLAIN_TEXT, text, len(text))
    return prepare_document(raw)


def chunk_doc(salience_and_text: list[tuple[float, str]]) -> PreparedDocument:
    chunks = [
        Chunk(i, text, estimate_tokens(text), [], salience)
        for i, (salience, text) in enumerate(salience_and_text)
    ]
    return PreparedDocument("synthetic", [], [], [], chunks)


class TestBuildPrompt:
    def test_small_doc_includes_everything(self):
        doc = prepare(FIXTURE_PAPER)
        prompt = build_prompt(doc, 4096)
        assert doc.cleaned_text in prompt
        for label in FIELD_LABELS:
            assert label in prompt

    def test_salience_selection_order(self):
        texts = [(5.0, "a" * 400), (9.0, "b" * 400), (1.0, "c" * 400)]
        doc = chunk_doc(texts)
        overhead = prompts.extraction_instructions() + prompts.DOC_MARKER
        two_fit = estimate_tokens(overhead + "\n\n".join(["a" * 400, "b" * 400]))
        prompt = build_prompt(doc, two_fit)
        assert "b" * 400 in prompt
        assert "a" * 400 in prompt
        assert "c" * 400 not in prompt

    def test_selected_chunks_keep_document_order(self):
        texts = [(1.0, "first " * 50), (9.0, "second " * 50)]
        doc = chunk_doc(texts)
        overhead = prompts.extraction_instructions() + prompts.DOC_MARKER
        budget = estimate_tokens(overhead + "\n\n".join(t for _, t in texts))
        prompt = build_prompt(doc, budget)
        assert prompt.index("first") < prompt.index("second")

    def test_budget_too_small(self):
        doc = chunk_doc([(1.0, "x" * 2000)])
        with pytest.raises(BudgetTooSmall):
            build_prompt(doc, 64)

    def test_empty_doc_rejected(self):
        doc = PreparedDocument("empty", [], [], [], [])
        with pytest.raises(ValueError):
            select_chunks(doc, 4096)


class TestExtractDocument:
    def test_mock_extraction_matches_fixture(self):
        doc = prepare(FIXTURE_PAPER)
        backend = Backend(BackendConfig())
        record, stats = extract_document(doc, backend)
        assert record.doc_id == doc.doc_id
        assert record.participants_total == 24
        assert record.recruitment_method == "Prolific"
        assert record.num_tasks == 3
        assert record.experiment_type == "user study"
        assert record.num_trials == 12
        assert [v.name for v in record.variables] == ["input technique"]
        assert record.provenance == [c.id for c in doc.chunks]
        assert stats.latency > 0
        assert stats.prompt_tokens > 0

    def test_stage_summing_through_pipeline(self):
        doc = prepare(
            "Method\nIn Study 1, 12 participants joined. "
            "In Study 2, 8 participants joined.\n"
        )
        record, _ = extract_document(doc, Backend(BackendConfig()))
        assert record.participants_stages == [12, 8]
        assert record.participants_total == 20

    def test_task_product_through_pipeline(self):
        doc = prepare("Method\nParticipants completed 4 tasks across 3 phases.\n")
        record, _ = extract_document(doc, Backend(BackendConfig()))
        assert record.num_tasks == 12

    def test_provider_error_propagates(self):
        doc = prepare(FIXTURE_PAPER)
        backend = Backend(
            BackendConfig(
                provider=Provider.OPENAI_COMPATIBLE,
                base_url="http://x",
                api_keys=["k"],
            ),
            transport=httpx.MockTransport(lambda r: httpx.Response(400, text="bad")),
        )
        with pytest.raises(ProviderError):
            extract_document(doc, backend)

    def test_unparseable_response_still_yields_record(self):
        canned = prompts.CANNED_START + "no labels here" + prompts.CANNED_END
        doc = prepare("Method\nBody text. " + canned + "\n")
        record, _ = extract_document(doc, Backend(BackendConfig()))
        assert record.unparseable
        assert record.participants_total is None
        assert record.doc_id == doc.doc_id


class TestExtractCorpus:
    def docs(self, n: int) -> list[PreparedDocument]:
        return [
            prepare(f"Method\nWe recruited {10 + i} participants for a user study.\n", f"d{i}")
            for i in range(n)
        ]

    def test_completeness_and_order(self):
        docs = self.docs(5)
        records = list(extract_corpus(docs, Backend(BackendConfig())))
        assert [r.doc_id for r in records] == [d.doc_id for d in docs]
        assert [r.participants_total for r in records] == [10, 11, 12, 13, 14]

    def test_worker_count_does_not_change_output(self):
        docs = self.docs(8)
        serial = [r.to_json() for r in extract_corpus(docs, Backend(BackendConfig()))]
        threaded = [
            r.to_json()
            for r in extract_corpus(docs, Backend(BackendConfig()), workers=4)
        ]
        assert serial == threaded
