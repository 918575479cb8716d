"""Turn files, directories, and archives into RawDocuments."""

from __future__ import annotations

import hashlib
import io
import json
import logging
import os
import shlex
import subprocess
import tempfile
import zipfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ..errors import CorruptArchive, DepthExceeded, EmptyText, PdfUnreadable, RarUnavailable
from .formats import ARCHIVE_KINDS, FormatKind, detect_format
from .html import extract_text_html
from .pdf import extract_text_pdf
from .sevenz import read_sevenz

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 3


@dataclass
class RawDocument:
    id: str
    source_path: str
    format: FormatKind
    text: str
    byte_len: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "source_path": self.source_path,
                "format": self.format.value,
                "text": self.text,
                "byte_len": self.byte_len,
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_dict(cls, obj: dict) -> "RawDocument":
        return cls(
            id=obj["id"],
            source_path=obj["source_path"],
            format=FormatKind(obj["format"]),
            text=obj["text"],
            byte_len=obj["byte_len"],
        )


def make_doc_id(source_path: str, data: bytes) -> str:
    """Stable id: same bytes at the same logical path always hash alike."""
    digest = hashlib.sha256(data).hexdigest()
    return hashlib.sha256(f"{source_path}\n{digest}".encode()).hexdigest()[:16]


def extract_text(data: bytes, kind: FormatKind) -> str:
    if kind is FormatKind.PDF:
        return extract_text_pdf(data)
    if kind is FormatKind.HTML:
        return extract_text_html(data)
    if kind is FormatKind.PLAIN_TEXT:
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            text = data.decode("latin-1")
        if not text.strip():
            raise EmptyText("empty plain-text file")
        return text
    raise ValueError(f"no text extractor for {kind}")


def _document_from_bytes(data: bytes, logical_path: str, kind: FormatKind) -> RawDocument:
    text = extract_text(data, kind)
    return RawDocument(
        id=make_doc_id(logical_path, data),
        source_path=logical_path,
        format=kind,
        text=text,
        byte_len=len(data),
    )


def _zip_entries(data: bytes) -> list[tuple[str, bytes]]:
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            infos = [i for i in zf.infolist() if not i.is_dir()]
            infos.sort(key=lambda i: i.filename)
            return [(i.filename, zf.read(i)) for i in infos]
    except (zipfile.BadZipFile, NotImplementedError, OSError) as exc:
        raise CorruptArchive(f"unreadable zip: {exc}") from exc


def _sevenz_entries(data: bytes) -> list[tuple[str, bytes]]:
    entries = [e for e in read_sevenz(data) if not e.is_dir]
    entries.sort(key=lambda e: e.name)
    return [(e.name, e.data or b"") for e in entries]


def _rar_entries(data: bytes, logical_path: str, rar_command: str | None) -> list[tuple[str, bytes]]:
    if not rar_command:
        raise RarUnavailable(logical_path)
    with tempfile.TemporaryDirectory(prefix="studyminer-rar-") as work:
        archive = os.path.join(work, "archive.rar")
        dest = os.path.join(work, "out")
        os.mkdir(dest)
        with open(archive, "wb") as fh:
            fh.write(data)
        cmd = [
            part.replace("{archive}", archive).replace("{dest}", dest)
            for part in shlex.split(rar_command)
        ]
        try:
            subprocess.run(cmd, check=True, capture_output=True, timeout=300)
        except (subprocess.SubprocessError, OSError) as exc:
            raise CorruptArchive(f"rar extractor failed for {logical_path}: {exc}") from exc
        out = []
        for path in sorted(Path(dest).rglob("*")):
            if path.is_file():
                out.append((path.relative_to(dest).as_posix(), path.read_bytes()))
        return out


def _expand_bytes(
    data: bytes,
    logical_path: str,
    kind: FormatKind,
    depth_remaining: int,
    rar_command: str | None,
) -> list[RawDocument]:
    if depth_remaining < 1:
        raise DepthExceeded(f"archive nesting exceeds allowed depth at {logical_path}")
    if kind is FormatKind.ZIP:
        entries = _zip_entries(data)
    elif kind is FormatKind.SEVEN_Z:
        entries = _sevenz_entries(data)
    elif kind is FormatKind.RAR:
        entries = _rar_entries(data, logical_path, rar_command)
    else:
        raise ValueError(f"{logical_path} is not an archive ({kind})")

    documents: list[RawDocument] = []
    for name, payload in entries:
        entry_path = f"{logical_path}!/{name}"
        entry_kind = detect_format(payload[:64], name)
        if entry_kind in ARCHIVE_KINDS:
            documents.extend(
                _expand_bytes(payload, entry_path, entry_kind, depth_remaining - 1, rar_command)
            )
        elif entry_kind is FormatKind.UNKNOWN:
            logger.warning("skipping %s: unrecognized format", entry_path)
        else:
            try:
                documents.append(_document_from_bytes(payload, entry_path, entry_kind))
            except (EmptyText, PdfUnreadable) as exc:
                logger.warning("skipping %s: %s", entry_path, exc)
    return documents


def expand_archive(
    path: str | Path,
    max_depth: int = DEFAULT_MAX_DEPTH,
    rar_command: str | None = None,
) -> list[RawDocument]:
    """Recursively expand an archive into RawDocuments.

    Entries are visited in lexicographic order by archive path, so the
    result is deterministic. Nested archives past max_depth raise
    DepthExceeded; rar input without a configured external command raises
    RarUnavailable.
    """
    path = Path(path)
    data = path.read_bytes()
    kind = detect_format(data[:64], path.name)
    if kind not in ARCHIVE_KINDS:
        raise ValueError(f"{path} is not an archive (detected {kind})")
    return _expand_bytes(data, str(path), kind, max_depth, rar_command)


def ingest_bytes(
    data: bytes,
    logical_path: str,
    max_depth: int = DEFAULT_MAX_DEPTH,
    rar_command: str | None = None,
) -> list[RawDocument]:
    """Ingest in-memory content (an upload, say) under a logical path."""
    kind = detect_format(data[:64], logical_path)
    if kind in ARCHIVE_KINDS:
        return _expand_bytes(data, logical_path, kind, max_depth, rar_command)
    if kind is FormatKind.UNKNOWN:
        raise ValueError(f"{logical_path}: unrecognized format")
    return [_document_from_bytes(data, logical_path, kind)]


def _iter_files(paths: Iterable[str | Path]) -> list[Path]:
    files: list[Path] = []
    for given in paths:
        p = Path(given)
        if p.is_dir():
            files.extend(sorted(q for q in p.rglob("*") if q.is_file()))
        elif p.is_file():
            files.append(p)
        else:
            raise FileNotFoundError(str(given))
    return files


def ingest_paths(
    paths: Iterable[str | Path],
    max_depth: int = DEFAULT_MAX_DEPTH,
    rar_command: str | None = None,
) -> list[RawDocument]:
    """Ingest files, directories, and archives into RawDocuments.

    Unrecognized or text-free files are logged and skipped; the pipeline
    only passes documents with non-empty text downstream. Re-running over
    unchanged inputs yields an identical list.
    """
    documents: list[RawDocument] = []
    for path in _iter_files(paths):
        data = path.read_bytes()
        kind = detect_format(data[:64], path.name)
        if kind in ARCHIVE_KINDS:
            documents.extend(_expand_bytes(data, str(path), kind, max_depth, rar_command))
        elif kind is FormatKind.UNKNOWN:
            logger.warning("skipping %s: unrecognized format", path)
        else:
            try:
                documents.append(_document_from_bytes(data, str(path), kind))
            except (EmptyText, PdfUnreadable) as exc:
                logger.warning("skipping %s: %s", path, exc)
    return documents
