"""On-disk corpus layout: JSONL files plus a reports directory.

Plain files keep a few hundred papers inspectable and diffable. Every
write goes through a temp file and an atomic rename, and writers are
serialized per file, so readers never see a partial line.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
import time
from collections import defaultdict
from pathlib import Path
from typing import Iterable

from .evaluation import GoldAnnotation
from .ingest import RawDocument
from .preprocess import PreparedDocument
from .records import ExtractionRecord

DOCUMENTS = "documents.jsonl"
PREPARED = "prepared.jsonl"
RECORDS = "records.jsonl"
GOLD = "gold.jsonl"
REPORTS_DIR = "reports"


class CorpusStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / REPORTS_DIR).mkdir(exist_ok=True)
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    def _lock(self, name: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks[name]

    def _write_lines(self, name: str, lines: Iterable[str]) -> None:
        path = self.root / name
        with self._lock(name):
            fd, temp = tempfile.mkstemp(dir=self.root, prefix=f".{name}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    for line in lines:
                        fh.write(line)
                        fh.write("\n")
                os.replace(temp, path)
            except BaseException:
                if os.path.exists(temp):
                    os.unlink(temp)
                raise

    def _read_lines(self, name: str) -> list[dict]:
        path = self.root / name
        if not path.exists():
            return []
        with self._lock(name):
            text = path.read_text("utf-8")
        return [json.loads(line) for line in text.splitlines() if line.strip()]

    # --- documents ---------------------------------------------------------

    def write_documents(self, docs: list[RawDocument]) -> None:
        self._write_lines(DOCUMENTS, (d.to_json() for d in docs))

    def read_documents(self) -> list[RawDocument]:
        return [RawDocument.from_dict(obj) for obj in self._read_lines(DOCUMENTS)]

    def upsert_document(self, doc: RawDocument) -> None:
        docs = [d for d in self.read_documents() if d.id != doc.id]
        docs.append(doc)
        self.write_documents(docs)

    # --- prepared ----------------------------------------------------------

    def write_prepared(self, docs: list[PreparedDocument]) -> None:
        self._write_lines(PREPARED, (d.to_json() for d in docs))

    def read_prepared(self) -> list[PreparedDocument]:
        return [PreparedDocument.from_dict(obj) for obj in self._read_lines(PREPARED)]

    def upsert_prepared(self, doc: PreparedDocument) -> None:
        docs = [d for d in self.read_prepared() if d.doc_id != doc.doc_id]
        docs.append(doc)
        self.write_prepared(docs)

    # --- extraction records -------------------------------------------------

    def write_records(self, records: list[ExtractionRecord]) -> None:
        self._write_lines(RECORDS, (r.to_json() for r in records))

    def read_records(self) -> list[ExtractionRecord]:
        return [ExtractionRecord.from_dict(obj) for obj in self._read_lines(RECORDS)]

    def upsert_record(self, record: ExtractionRecord) -> None:
        records = [r for r in self.read_records() if r.doc_id != record.doc_id]
        records.append(record)
        self.write_records(records)

    # --- gold annotations ----------------------------------------------------

    def read_gold(self) -> list[GoldAnnotation]:
        return [GoldAnnotation.from_dict(obj) for obj in self._read_lines(GOLD)]

    def upsert_gold(self, gold: GoldAnnotation) -> None:
        items = [g for g in self.read_gold() if g.doc_id != gold.doc_id]
        items.append(gold)
        self._write_lines(GOLD, (json.dumps(g.to_dict(), ensure_ascii=False) for g in items))

    # --- reports --------------------------------------------------------------

    def save_report(self, payload: dict, prefix: str = "eval") -> Path:
        stamp = time.strftime("%Y%m%dT%H%M%S")
        with self._lock(REPORTS_DIR):
            seq = 0
            while True:
                path = (
                    self.root / REPORTS_DIR
                    / f"{prefix}-{stamp}-{os.getpid()}-{seq:04d}.json"
                )
                if not path.exists():
                    break
                seq += 1
            fd, temp = tempfile.mkstemp(dir=self.root / REPORTS_DIR, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, ensure_ascii=False, indent=2)
            os.replace(temp, path)
        return path

    def latest_report(self, prefix: str = "eval") -> dict | None:
        reports = sorted((self.root / REPORTS_DIR).glob(f"{prefix}-*.json"))
        if not reports:
            return None
        return json.loads(reports[-1].read_text("utf-8"))

    # --- invariants --------------------------------------------------------

    def integrity_problems(self) -> list[str]:
        """Record/doc cross-references that no longer hold."""
        known = {d.id for d in self.read_documents()}
        problems = [
            f"records.jsonl doc_id {r.doc_id!r} missing from documents.jsonl"
            for r in self.read_records()
            if r.doc_id not in known
        ]
        return problems

    def paths(self) -> dict[str, Path]:
        return {
            "documents": self.root / DOCUMENTS,
            "prepared": self.root / PREPARED,
            "records": self.root / RECORDS,
            "gold": self.root / GOLD,
            "reports": self.root / REPORTS_DIR,
        }
