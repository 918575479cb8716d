"""Acceptance suite: one test per release criterion, each printing a
pass/fail line with its runtime. Run with `pytest tests/test_acceptance.py -v -s`.
"""

from __future__ import annotations

import io
import json
import random
import threading
import time
import zipfile
from pathlib import Path

import httpx
import pytest
from scipy.stats import norm

from studyminer.backend import Backend, BackendConfig, Provider
from studyminer.cli import main
from studyminer.errors import RarUnavailable
from studyminer.evaluation import (
    EvalConfig,
    GoldAnnotation,
    baseline_normal,
    evaluate_records,
    within_tol_rate,
)
from studyminer.extract import extract_corpus
from studyminer.ingest import expand_archive, ingest_paths
from studyminer.preprocess import chunk, prepare_document
from studyminer.records import ExtractionRecord, normalize_tasks, parse_response
from studyminer.store import CorpusStore

from .corpusgen import random_gold_pred_corpus
from .oracle_eval import recompute
from .synthcorpus import docs_dir, gold_for_documents, write_gold


def _report(name: str, started: float, limit: float) -> None:
    elapsed = time.perf_counter() - started
    assert elapsed < limit, f"{name} took {elapsed:.2f}s, limit {limit}s"
    print(f"ACCEPTANCE PASS {name} ({elapsed:.2f}s < {limit:.0f}s)")


def test_metric_oracle_equivalence():
    started = time.perf_counter()
    for i in range(10):
        rng = random.Random(1000 + i)
        gold_dicts, pred_dicts = random_gold_pred_corpus(rng, rng.randint(5, 20))
        gold = [GoldAnnotation.from_dict(g) for g in gold_dicts]
        pred = [ExtractionRecord.from_dict(p) for p in pred_dicts]
        report = evaluate_records(gold, pred, EvalConfig(baseline_trials=5))
        oracle = recompute(gold_dicts, pred_dicts, 1, 1.0)
        assert abs(report.exact_accuracy - oracle["exact_accuracy"]) <= 1e-9
        assert abs(report.numeric_tol_accuracy - oracle["numeric_tol_accuracy"]) <= 1e-9
        for key in ("mae_true", "within_tol_rate"):
            mine, theirs = getattr(report, key), oracle[key]
            if theirs is None:
                assert mine is None
            else:
                assert abs(mine - theirs) <= 1e-9
        assert report.unknown_pairs == oracle["unknown_pairs"]
        for field_name, scores in oracle["per_field"].items():
            for key, value in scores.items():
                mine = report.per_field[field_name][key]
                if value is None:
                    assert mine is None
                else:
                    assert abs(mine - value) <= 1e-9
    _report("metric-oracle-equivalence", started, 5.0)


def test_paper_formula_fidelity():
    started = time.perf_counter()
    assert within_tol_rate([10, 20, 3], [10, 21, 7], 1) == 2 / 3
    rng = random.Random(77)
    for _ in range(1000):
        n = rng.randint(1, 12)
        gold = [rng.randint(0, 300) for _ in range(n)]
        pred = [rng.randint(0, 300) for _ in range(n)]
        low, high = sorted((rng.uniform(0, 40), rng.uniform(0, 40)))
        assert within_tol_rate(gold, pred, low) <= within_tol_rate(gold, pred, high)
    _report("paper-formula-fidelity", started, 5.0)


def test_baseline_sanity():
    started = time.perf_counter()
    cfg = EvalConfig(
        numeric_tolerance_for_accuracy=1, baseline_trials=1_000_000, baseline_seed=123
    )
    result = baseline_normal([0, 100], cfg)
    assert 0.010 <= result <= 0.018
    closed_form = sum(
        norm.cdf(y + 1.5, 50, 50) - norm.cdf(y - 1.5, 50, 50) for y in (0, 100)
    ) / 2
    assert result == pytest.approx(closed_form, abs=0.002)
    assert baseline_normal([12, 12, 12], EvalConfig(baseline_trials=1000)) == 1.0
    again = baseline_normal([0, 100], cfg)
    assert result == again  # bit-identical under the same seed
    _report("baseline-sanity", started, 30.0)


def test_baseline_gap_shape(tmp_path):
    started = time.perf_counter()
    docs = ingest_paths([docs_dir()])
    assert len(docs) == 20
    prepared = [prepare_document(d) for d in docs]
    records = list(extract_corpus(prepared, Backend(BackendConfig())))
    gold = gold_for_documents(docs)
    cfg = EvalConfig(numeric_tolerance_for_accuracy=1, baseline_trials=2000, baseline_seed=7)
    report = evaluate_records(gold, records, cfg)
    assert report.numeric_tol_accuracy >= 0.90
    assert report.baseline_accuracy <= 0.35
    _report("baseline-gap-shape", started, 60.0)


def test_pipeline_determinism(tmp_path):
    started = time.perf_counter()
    artifacts = []
    for run in ("run1", "run2"):
        corpus = tmp_path / run
        assert main(["ingest", str(docs_dir()), "--out", str(corpus)]) == 0
        assert main(["extract", str(corpus), "--backend", "mock"]) == 0
        store = CorpusStore(corpus)
        gold_path = write_gold(corpus / "gold.jsonl", store.read_documents())
        report_path = corpus / "eval-report.json"
        assert main([
            "eval", str(gold_path), str(corpus / "records.jsonl"),
            "--baseline-trials", "500", "--seed", "11", "--out", str(report_path),
        ]) == 0
        artifacts.append(
            (
                (corpus / "records.jsonl").read_bytes(),
                report_path.read_bytes(),
            )
        )
    assert artifacts[0][0] == artifacts[1][0], "records.jsonl differs between runs"
    assert artifacts[0][1] == artifacts[1][1], "EvalReport differs between runs"
    _report("pipeline-determinism", started, 60.0)


def test_chunker_invariants():
    started = time.perf_counter()
    rng = random.Random(4321)
    pieces = ["word", "stretch of prose", "x" * 40, ".", "!", "\n", "\n\n", " "]
    for _ in range(1000):
        text = "".join(rng.choice(pieces) for _ in range(rng.randint(0, 120)))
        budget = rng.randint(64, 512)
        chunks = chunk(text, budget)
        assert "".join(c.text for c in chunks) == text
        assert all(c.token_estimate <= budget for c in chunks)
    _report("chunker-invariants", started, 10.0)


def test_ingestion_equivalence(tmp_path):
    started = time.perf_counter()
    contents = {
        "a.html": b"<html><body><p>alpha body text</p></body></html>",
        "b.txt": b"bravo body text",
    }
    flat = tmp_path / "flat"
    flat.mkdir()
    for name, data in contents.items():
        (flat / name).write_bytes(data)
    flat_docs = ingest_paths([flat])

    def zip_bytes(entries: dict[str, bytes]) -> bytes:
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as zf:
            for name, data in entries.items():
                zf.writestr(zipfile.ZipInfo(name, (1980, 1, 1, 0, 0, 0)), data)
        return buf.getvalue()

    zipped = tmp_path / "same.zip"
    zipped.write_bytes(zip_bytes(contents))
    zip_docs = expand_archive(zipped)
    assert [d.text for d in flat_docs] == [d.text for d in zip_docs]

    nested = tmp_path / "nested.zip"
    nested.write_bytes(zip_bytes({"inner.zip": zip_bytes(contents)}))
    nested_docs = expand_archive(nested, max_depth=2)
    assert [d.text for d in flat_docs] == [d.text for d in nested_docs]

    rar = tmp_path / "blocked.rar"
    rar.write_bytes(b"Rar!\x1a\x07\x00" + b"\x00" * 32)
    with pytest.raises(RarUnavailable):
        expand_archive(rar)
    _report("ingestion-equivalence", started, 10.0)


def test_normalization_rules():
    started = time.perf_counter()
    staged = parse_response("Number of Participants: Study 1: 12; Study 2: 8")
    assert staged.participants_stages == [12, 8]
    assert staged.participants_total == 20
    assert parse_response("Number of Tasks: 4 x 3").num_tasks == 12
    assert normalize_tasks(4, 3) == 12
    assert normalize_tasks(5, None) == 5
    _report("normalization-rules", started, 5.0)


def test_key_rotation():
    started = time.perf_counter()

    def rate_limit_key0(request: httpx.Request) -> httpx.Response:
        if request.headers["Authorization"] == "Bearer key0":
            return httpx.Response(429)
        return httpx.Response(200, json={"choices": [{"message": {"content": "ok"}}]})

    config = BackendConfig(
        provider=Provider.OPENAI_COMPATIBLE,
        base_url="http://testserver",
        api_keys=["key0", "key1"],
        max_retries=6,
    )
    backend = Backend(config, transport=httpx.MockTransport(rate_limit_key0))
    assert all(backend.complete("p").key_index_used == 1 for _ in range(10))

    used: dict[str, int] = {}

    def count_keys(request: httpx.Request) -> httpx.Response:
        key = request.headers["Authorization"].removeprefix("Bearer ")
        used[key] = used.get(key, 0) + 1
        return httpx.Response(200, json={"choices": [{"message": {"content": "ok"}}]})

    fair = Backend(
        BackendConfig(
            provider=Provider.OPENAI_COMPATIBLE,
            base_url="http://testserver",
            api_keys=["a", "b", "c"],
        ),
        transport=httpx.MockTransport(count_keys),
    )
    for _ in range(100):
        fair.complete("p")
    assert sorted(used.values()) == [33, 33, 34]
    _report("key-rotation", started, 5.0)


def test_service_contract(tmp_path):
    import uvicorn

    from studyminer.service import create_app

    started = time.perf_counter()
    app = create_app(CorpusStore(tmp_path / "corpus"))
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        assert time.time() < deadline, "service did not start"
        time.sleep(0.02)
    port = server.servers[0].sockets[0].getsockname()[1]
    base = f"http://127.0.0.1:{port}"
    try:
        with httpx.Client(base_url=base, timeout=10) as client:
            health = client.get("/health")
            assert health.status_code == 200
            assert health.json() == {"status": "ok"}

            html = (
                b"<html><body><div>Method</div>"
                b"<p>We recruited 24 participants via Prolific for a user study. "
                b"Each participant performed 12 trials.</p></body></html>"
            )
            upload = client.post(
                "/documents", files={"file": ("fixture.html", html, "text/html")}
            )
            assert upload.status_code == 200
            doc_id = upload.json()["doc_id"]

            qa = client.post(
                "/qa", json={"doc_id": doc_id, "question": "how many participants?"}
            )
            assert qa.status_code == 200
            assert "24" in qa.json()["text"]

            record = client.post(
                f"/documents/{doc_id}/extract", json={"backend": "mock"}
            )
            assert record.status_code == 200
            gold = client.put(f"/gold/{doc_id}", json=record.json())
            assert gold.status_code == 200
            evaluation = client.post(
                "/eval",
                json={"approximation_level": 1, "tolerance": 1,
                      "baseline_trials": 50, "seed": 2},
            )
            assert evaluation.status_code == 200
            assert evaluation.json()["exact_accuracy"] == 1.0
    finally:
        server.should_exit = True
        thread.join(timeout=10)
    _report("service-contract", started, 60.0)
