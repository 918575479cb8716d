"""Document ingestion: format detection, text extraction, archive expansion."""

from .archives import (
    DEFAULT_MAX_DEPTH,
    RawDocument,
    expand_archive,
    extract_text,
    ingest_bytes,
    ingest_paths,
    make_doc_id,
)
from .formats import ARCHIVE_KINDS, FormatKind, detect_format
from .html import extract_text_html
from .pdf import extract_text_pdf
from .sevenz import SevenZEntry, read_sevenz

__all__ = [
    "ARCHIVE_KINDS",
    "DEFAULT_MAX_DEPTH",
    "FormatKind",
    "RawDocument",
    "SevenZEntry",
    "detect_format",
    "expand_archive",
    "extract_text",
    "extract_text_html",
    "extract_text_pdf",
    "ingest_bytes",
    "ingest_paths",
    "make_doc_id",
    "read_sevenz",
]
