"""studyminer command line: ingest, extract, eval, serve.

Exit codes: 0 success, 1 unexpected pipeline error, 2 unreadable or empty
input, 3 all API keys exhausted (partial records flushed), 4 gold/pred
mismatch or schema error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .backend import Backend, BackendConfig, Provider
from .errors import AllContentStripped, AllKeysExhausted, DocIdMismatch, SchemaError, StudyMinerError
from .evaluation import EvalConfig, evaluate_corpus
from .extract import extract_corpus
from .ingest import DEFAULT_MAX_DEPTH, ingest_paths
from .perf import PerfTracker
from .preprocess import DEFAULT_BUDGET_TOKENS, prepare_document
from .store import CorpusStore

logger = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="studyminer",
        description="Mine six-field experimental-design records from papers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="ingest files/dirs/archives and preprocess")
    p_ingest.add_argument("paths", nargs="+", help="files, directories, or archives")
    p_ingest.add_argument("--out", required=True, help="corpus directory to write")
    p_ingest.add_argument("--budget", type=int, default=DEFAULT_BUDGET_TOKENS,
                          help="chunk token budget (default %(default)s)")
    p_ingest.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH,
                          help="archive nesting allowance (default %(default)s)")
    p_ingest.add_argument("--rar-command", default=os.environ.get("STUDYMINER_RAR_CMD"),
                          help="external rar extractor template with {archive} and {dest}")

    p_extract = sub.add_parser("extract", help="run backend extraction over a corpus")
    p_extract.add_argument("corpus", help="corpus directory from `studyminer ingest`")
    p_extract.add_argument("--backend", choices=["mock", "remote"], default="mock")
    p_extract.add_argument("--config", help="backend config JSON (required for remote)")
    p_extract.add_argument("--workers", type=int, default=1)
    p_extract.add_argument("--budget", type=int, default=DEFAULT_BUDGET_TOKENS,
                           help="prompt token budget (default %(default)s)")

    p_eval = sub.add_parser("eval", help="score predictions against gold annotations")
    p_eval.add_argument("gold", help="gold JSONL path")
    p_eval.add_argument("pred", help="predictions JSONL path")
    p_eval.add_argument("--approximation-level", type=float, default=1.0)
    p_eval.add_argument("--tolerance", type=int, default=1)
    p_eval.add_argument("--baseline-trials", type=int, default=1000)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--out", help="write the JSON report here")
    p_eval.add_argument("--perf", help="attach a perf report JSON under 'perf'")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("corpus", help="corpus directory")
    p_serve.add_argument("--listen", default="127.0.0.1:8000", help="host:port")
    p_serve.add_argument("--config", help="backend config JSON for the remote backend")
    p_serve.add_argument("--webui-dir", help="built web UI bundle to serve at /")
    return parser


def _load_backend(kind: str, config_path: str | None) -> Backend:
    if kind == "mock":
        return Backend(BackendConfig())
    if not config_path:
        raise SystemExit("--config is required for the remote backend")
    config = BackendConfig.from_file(config_path)
    if config.provider is Provider.MOCK:
        raise SystemExit("remote backend config must not use the mock provider")
    return Backend(config)


def cmd_ingest(args: argparse.Namespace) -> int:
    try:
        raw_docs = ingest_paths(args.paths, max_depth=args.max_depth,
                                rar_command=args.rar_command)
    except (FileNotFoundError, StudyMinerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    prepared = []
    kept = []
    for doc in raw_docs:
        try:
            prepared.append(prepare_document(doc, budget_tokens=args.budget))
            kept.append(doc)
        except AllContentStripped as exc:
            logger.warning("skipping %s: %s", doc.source_path, exc)
    if not prepared:
        print("error: no ingestible files", file=sys.stderr)
        return 2
    store = CorpusStore(args.out)
    store.write_documents(kept)
    store.write_prepared(prepared)
    print(f"ingested {len(prepared)} documents into {args.out}")
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    store = CorpusStore(args.corpus)
    prepared = store.read_prepared()
    if not prepared:
        print("error: no prepared documents; run `studyminer ingest` first", file=sys.stderr)
        return 2
    backend = _load_backend(args.backend, args.config)
    tracker = PerfTracker()
    records = []
    status = 0
    try:
        for record in extract_corpus(prepared, backend, budget_tokens=args.budget,
                                     workers=args.workers, perf=tracker):
            records.append(record)
    except AllKeysExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = 3
    finally:
        backend.close()
        store.write_records(records)  # partial results are flushed before exit
        perf_report = tracker.report()
        perf_path = store.save_report(perf_report.to_dict(), prefix="perf")
        print(f"extracted {len(records)}/{len(prepared)} documents")
        print(perf_report.render_table())
        print(f"perf report: {perf_path}")
    return status


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = EvalConfig(
        approximation_level=args.approximation_level,
        numeric_tolerance_for_accuracy=args.tolerance,
        baseline_trials=args.baseline_trials,
        baseline_seed=args.seed,
    )
    perf = None
    if args.perf:
        perf = json.loads(Path(args.perf).read_text("utf-8"))
    try:
        report = evaluate_corpus(args.gold, args.pred, cfg, perf)
    except (DocIdMismatch, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    print(report.render_table())
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
        print(f"report written to {args.out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.listen.rpartition(":")
    remote_config = BackendConfig.from_file(args.config) if args.config else None
    app = create_app(
        CorpusStore(args.corpus),
        remote_config=remote_config,
        webui_dir=args.webui_dir,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="info")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    handlers = {
        "ingest": cmd_ingest,
        "extract": cmd_extract,
        "eval": cmd_eval,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except StudyMinerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
