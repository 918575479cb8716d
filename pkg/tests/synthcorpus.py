"""Access helpers for the bundled synthetic corpus.

Document ids hash the ingest source path, so gold records are joined to
ingested documents by file basename at run time rather than committed
with precomputed ids.
"""

from __future__ import annotations

import json
from pathlib import Path

from studyminer.evaluation import GoldAnnotation
from studyminer.ingest import RawDocument

CORPUS_DIR = Path(__file__).resolve().parent / "data" / "synthetic_corpus"


def docs_dir() -> Path:
    return CORPUS_DIR / "docs"


def load_params() -> dict[str, dict]:
    rows = {}
    with open(CORPUS_DIR / "params.jsonl", encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            rows[obj["file"]] = obj
    return rows


def gold_for_documents(documents: list[RawDocument]) -> list[GoldAnnotation]:
    params = load_params()
    gold = []
    for doc in documents:
        basename = doc.source_path.rsplit("/", 1)[-1]
        fields = params[basename]
        gold.append(
            GoldAnnotation.from_dict(
                {
                    "doc_id": doc.id,
                    "participants_total": fields["participants_total"],
                    "participants_stages": fields["participants_stages"],
                    "recruitment_method": fields["recruitment_method"],
                    "num_tasks": fields["num_tasks"],
                    "experiment_type": fields["experiment_type"],
                    "variables": fields["variables"],
                    "num_trials": fields["num_trials"],
                    "annotator": "generator",
                    "notes": basename,
                }
            )
        )
    return gold


def write_gold(path: Path, documents: list[RawDocument]) -> Path:
    rows = [json.dumps(g.to_dict(), ensure_ascii=False) for g in gold_for_documents(documents)]
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path
