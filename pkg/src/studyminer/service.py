"""HTTP JSON API over the corpus store, plus static serving of the web UI.

All bodies and responses are JSON. Backend failures surface as 502 with a
sanitized detail string; configured API keys never appear in responses or
logs. Per-document extraction is serialized by a per-doc lock.
"""

from __future__ import annotations

import logging
import threading
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI, HTTPException, UploadFile
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .backend import Backend, BackendConfig
from .errors import (
    BackendError,
    DocIdMismatch,
    EmptyComparison,
    EmptyText,
    PdfUnreadable,
    SchemaError,
    StudyMinerError,
)
from .evaluation import EvalConfig, GoldAnnotation, evaluate_records
from .extract import extract_document
from .ingest import ingest_bytes
from .preprocess import PreparedDocument, prepare_document
from .qa import DEFAULT_TOP_K, answer
from .store import CorpusStore

logger = logging.getLogger(__name__)


class ExtractRequest(BaseModel):
    backend: str = "mock"


class QaRequest(BaseModel):
    doc_id: str
    question: str
    top_k: int = Field(default=DEFAULT_TOP_K, ge=1)
    backend: str = "mock"


class EvalRequest(BaseModel):
    approximation_level: float = Field(default=1.0, ge=0)
    tolerance: int = Field(default=1, ge=0)
    baseline_trials: int = Field(default=1000, ge=1)
    seed: int = 0


def create_app(
    store: CorpusStore,
    remote_config: BackendConfig | None = None,
    webui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="studyminer", version="0.1.0")
    doc_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
    locks_guard = threading.Lock()
    secret_keys = remote_config.resolved_keys() if remote_config else []

    def scrub(text: str) -> str:
        for key in secret_keys:
            text = text.replace(key, "***")
        return text

    def doc_lock(doc_id: str) -> threading.Lock:
        with locks_guard:
            return doc_locks[doc_id]

    def make_backend(kind: str) -> Backend:
        if kind == "mock":
            return Backend(BackendConfig())
        if kind == "remote":
            if remote_config is None:
                raise HTTPException(400, "no remote backend configured on this server")
            return Backend(remote_config)
        raise HTTPException(400, f"unknown backend {kind!r}; use mock or remote")

    def get_prepared(doc_id: str) -> PreparedDocument:
        for doc in store.read_prepared():
            if doc.doc_id == doc_id:
                return doc
        raise HTTPException(404, f"unknown doc_id {doc_id!r}")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/documents")
    async def upload_document(file: UploadFile) -> dict:
        data = await file.read()
        name = file.filename or "upload"
        try:
            raw_docs = ingest_bytes(data, f"upload://{name}")
        except (ValueError, EmptyText, PdfUnreadable, StudyMinerError) as exc:
            raise HTTPException(400, scrub(str(exc))) from exc
        doc_ids = []
        for raw in raw_docs:
            try:
                prepared = prepare_document(raw)
            except StudyMinerError as exc:
                logger.warning("skipping %s: %s", raw.source_path, exc)
                continue
            store.upsert_document(raw)
            store.upsert_prepared(prepared)
            doc_ids.append(raw.id)
        if not doc_ids:
            raise HTTPException(400, "upload produced no usable documents")
        return {"doc_id": doc_ids[0], "doc_ids": doc_ids}

    @app.get("/documents")
    def list_documents() -> list[dict]:
        chunk_counts = {p.doc_id: len(p.chunks) for p in store.read_prepared()}
        return [
            {
                "doc_id": d.id,
                "source_path": d.source_path,
                "n_chunks": chunk_counts.get(d.id, 0),
            }
            for d in store.read_documents()
        ]

    @app.get("/documents/{doc_id}")
    def document_summary(doc_id: str) -> dict:
        prepared = get_prepared(doc_id)
        source = next(
            (d.source_path for d in store.read_documents() if d.id == doc_id), None
        )
        return {
            "doc_id": prepared.doc_id,
            "source_path": source,
            "sections": [
                {"ordinal": s.ordinal, "title": s.title} for s in prepared.sections
            ],
            "keywords": [[term, score] for term, score in prepared.keywords],
            "n_entities": len(prepared.entities),
            "chunks": [
                {
                    "id": c.id,
                    "text": c.text,
                    "token_estimate": c.token_estimate,
                    "salience": c.salience,
                }
                for c in prepared.chunks
            ],
        }

    @app.post("/documents/{doc_id}/extract")
    def extract_one(doc_id: str, request: ExtractRequest) -> dict:
        prepared = get_prepared(doc_id)
        backend = make_backend(request.backend)
        try:
            with doc_lock(doc_id):
                record, _ = extract_document(prepared, backend)
                store.upsert_record(record)
        except BackendError as exc:
            raise HTTPException(502, scrub(str(exc))) from exc
        finally:
            backend.close()
        return record.to_dict()

    @app.get("/records")
    def list_records() -> list[dict]:
        return [r.to_dict() for r in store.read_records()]

    @app.put("/gold/{doc_id}")
    def upsert_gold(doc_id: str, body: dict) -> dict:
        get_prepared(doc_id)  # 404 for unknown documents
        if body.get("doc_id") not in (None, doc_id):
            raise HTTPException(400, "doc_id: body and URL disagree")
        body = {**body, "doc_id": doc_id}
        try:
            gold = GoldAnnotation.from_dict(body)
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(400, f"bad gold record: {exc}") from exc
        problems = gold.validation_errors()
        if problems:
            raise HTTPException(400, "; ".join(problems))
        store.upsert_gold(gold)
        return gold.to_dict()

    @app.get("/gold")
    def list_gold() -> list[dict]:
        return [g.to_dict() for g in store.read_gold()]

    @app.post("/qa")
    def ask(request: QaRequest) -> dict:
        prepared = get_prepared(request.doc_id)
        backend = make_backend(request.backend)
        try:
            result = answer(request.question, prepared, backend, request.top_k)
        except BackendError as exc:
            raise HTTPException(502, scrub(str(exc))) from exc
        finally:
            backend.close()
        return {
            "question": result.question,
            "text": result.text,
            "supporting_chunks": [[cid, score] for cid, score in result.supporting_chunks],
            "latency": result.latency,
        }

    @app.post("/eval")
    def run_eval(request: EvalRequest) -> dict:
        cfg = EvalConfig(
            approximation_level=request.approximation_level,
            numeric_tolerance_for_accuracy=request.tolerance,
            baseline_trials=request.baseline_trials,
            baseline_seed=request.seed,
        )
        try:
            report = evaluate_records(store.read_gold(), store.read_records(), cfg)
        except (DocIdMismatch, SchemaError, EmptyComparison) as exc:
            raise HTTPException(400, scrub(str(exc))) from exc
        payload = report.to_dict()
        store.save_report(payload)
        return payload

    if webui_dir and Path(webui_dir).is_dir():
        app.mount("/", StaticFiles(directory=webui_dir, html=True), name="webui")

    return app
