"""Exception types shared across the pipeline."""

from __future__ import annotations


class StudyMinerError(Exception):
    """Base class for all pipeline errors."""


# --- ingest ---------------------------------------------------------------

class CorruptArchive(StudyMinerError):
    """Archive container could not be read."""


class DepthExceeded(StudyMinerError):
    """Archive nesting went past the configured maximum depth."""


class RarUnavailable(StudyMinerError):
    """A rar archive was seen but no external extractor is configured."""

    def __init__(self, path: str) -> None:
        super().__init__(
            f"{path}: rar archives need an external extractor; pass "
            "--rar-command (or set STUDYMINER_RAR_CMD) to a command template "
            "such as 'unrar x {archive} {dest}'"
        )
        self.path = path


class PdfUnreadable(StudyMinerError):
    """PDF is encrypted or structurally broken."""


class EmptyText(StudyMinerError):
    """No extractable text; for PDFs this usually means a scanned document."""


# --- preprocess -----------------------------------------------------------

class AllContentStripped(StudyMinerError):
    """Noise removal left nothing behind."""


# --- backend --------------------------------------------------------------

class BackendError(StudyMinerError):
    """Base class for completion-backend failures."""


class PromptTooLarge(BackendError):
    """Prompt token estimate exceeds the backend's max_tokens."""


class AllKeysExhausted(BackendError):
    """Every configured API key failed within the retry budget."""


class ProviderError(BackendError):
    """Non-retryable provider failure."""

    def __init__(self, status: int, body: str) -> None:
        super().__init__(f"provider returned {status}: {body[:200]}")
        self.status = status
        self.body = body


class BackendTimeout(BackendError):
    """Provider did not answer within the configured timeout."""


# --- extract / qa ---------------------------------------------------------

class BudgetTooSmall(StudyMinerError):
    """Token budget cannot fit the instruction block plus any content."""


# --- eval -----------------------------------------------------------------

class EmptyComparison(StudyMinerError):
    """Metric asked to compare zero pairs."""


class MissingPrediction(StudyMinerError):
    """A gold doc_id has no matching prediction."""

    def __init__(self, doc_id: str) -> None:
        super().__init__(f"no prediction for doc_id {doc_id!r}")
        self.doc_id = doc_id


class SchemaError(StudyMinerError):
    """A JSONL line does not match the expected record schema."""

    def __init__(self, path: str, line_no: int, detail: str) -> None:
        super().__init__(f"{path}:{line_no}: {detail}")
        self.path = path
        self.line_no = line_no
        self.detail = detail


class DocIdMismatch(StudyMinerError):
    """Gold and predicted corpora cover different doc_id sets."""

    def __init__(self, only_gold: list[str], only_pred: list[str]) -> None:
        super().__init__(
            f"doc_id sets differ; only in gold: {sorted(only_gold)}, "
            f"only in predictions: {sorted(only_pred)}"
        )
        self.only_gold = sorted(only_gold)
        self.only_pred = sorted(only_pred)
