"""File format detection from magic bytes with extension fallback."""

from __future__ import annotations

import enum
import os


class FormatKind(enum.Enum):
    PDF = "pdf"
    HTML = "html"
    PLAIN_TEXT = "text"
    ZIP = "zip"
    SEVEN_Z = "7z"
    RAR = "rar"
    UNKNOWN = "unknown"


ARCHIVE_KINDS = frozenset({FormatKind.ZIP, FormatKind.SEVEN_Z, FormatKind.RAR})

_MAGIC = [
    (b"%PDF-", FormatKind.PDF),
    (b"PK\x03\x04", FormatKind.ZIP),
    (b"PK\x05\x06", FormatKind.ZIP),  # empty zip
    (b"7z\xbc\xaf\x27\x1c", FormatKind.SEVEN_Z),
    (b"Rar!\x1a\x07", FormatKind.RAR),  # covers rar4 (+\x00) and rar5 (+\x01\x00)
]

_EXTENSIONS = {
    ".pdf": FormatKind.PDF,
    ".html": FormatKind.HTML,
    ".htm": FormatKind.HTML,
    ".xhtml": FormatKind.HTML,
    ".txt": FormatKind.PLAIN_TEXT,
    ".md": FormatKind.PLAIN_TEXT,
    ".zip": FormatKind.ZIP,
    ".7z": FormatKind.SEVEN_Z,
    ".rar": FormatKind.RAR,
}


def detect_format(leading_bytes: bytes, path_hint: str = "") -> FormatKind:
    """Classify content by its leading bytes, falling back to the extension.

    Detection is pure: the same (bytes, hint) pair always yields the same
    kind. Unrecognized input returns UNKNOWN rather than raising.
    """
    head = leading_bytes.lstrip(b"\xef\xbb\xbf")  # ignore a UTF-8 BOM
    for magic, kind in _MAGIC:
        if head.startswith(magic):
            return kind
    lowered = head[:256].lstrip().lower()
    if lowered.startswith(b"<!doctype html") or lowered.startswith(b"<html"):
        return FormatKind.HTML
    ext = os.path.splitext(path_hint)[1].lower()
    return _EXTENSIONS.get(ext, FormatKind.UNKNOWN)
