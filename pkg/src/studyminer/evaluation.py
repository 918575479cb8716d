"""Score predicted records against gold annotations.

Two numeric-agreement figures are reported side by side: within_tol_rate,
the mean of indicator values 1[|y - yhat| <= approximation level], and
mae_true, the standard mean absolute error. Accuracy pools the three
numeric fields (exact and tolerance variants) with the two categorical
fields; variables are scored separately as a name-set Jaccard overlap and
never enter the pooled figures. The random baseline draws predictions
from a normal distribution fitted to the gold values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DocIdMismatch, EmptyComparison, MissingPrediction, SchemaError
from .records import ExtractionRecord

NUMERIC_FIELDS = ("participants_total", "num_tasks", "num_trials")
CATEGORICAL_FIELDS = ("recruitment_method", "experiment_type")


@dataclass
class GoldAnnotation(ExtractionRecord):
    annotator: str = ""
    notes: str = ""

    def to_dict(self) -> dict:
        base = super().to_dict()
        del base["provenance"]  # gold records carry no extraction provenance
        base["annotator"] = self.annotator
        base["notes"] = self.notes
        return base

    @classmethod
    def from_dict(cls, obj: dict) -> "GoldAnnotation":
        record = ExtractionRecord.from_dict(obj)
        gold = cls(**{k: getattr(record, k) for k in record.__dataclass_fields__
                      if k != "unparseable"})
        gold.provenance = []
        gold.annotator = obj.get("annotator", "")
        gold.notes = obj.get("notes", "")
        return gold


def canonicalize(text: str) -> str:
    """Lowercase, trim, collapse internal whitespace."""
    return " ".join(text.split()).lower()


@dataclass
class FeatureVector:
    """One paper reduced to comparable features."""

    numeric: tuple[int | None, int | None, int | None]
    categorical: tuple[str | None, str | None]

    @classmethod
    def from_record(cls, record: ExtractionRecord) -> "FeatureVector":
        return cls(
            numeric=tuple(getattr(record, f) for f in NUMERIC_FIELDS),
            categorical=tuple(
                canonicalize(v) if (v := getattr(record, f)) is not None else None
                for f in CATEGORICAL_FIELDS
            ),
        )


@dataclass
class EvalConfig:
    approximation_level: float = 1.0
    numeric_tolerance_for_accuracy: int = 1
    baseline_trials: int = 1000
    baseline_seed: int = 0

    def __post_init__(self) -> None:
        if self.approximation_level < 0:
            raise ValueError("approximation_level must be >= 0")
        if self.numeric_tolerance_for_accuracy < 0:
            raise ValueError("numeric_tolerance_for_accuracy must be >= 0")
        if self.baseline_trials < 1:
            raise ValueError("baseline_trials must be >= 1")


@dataclass
class EvalReport:
    n: int
    exact_accuracy: float
    numeric_tol_accuracy: float
    mae_true: float | None
    within_tol_rate: float | None
    per_field: dict[str, dict]
    baseline_accuracy: float | None
    unknown_pairs: int
    config: dict = field(default_factory=dict)
    perf: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "exact_accuracy": self.exact_accuracy,
            "numeric_tol_accuracy": self.numeric_tol_accuracy,
            "mae_true": self.mae_true,
            "within_tol_rate": self.within_tol_rate,
            "per_field": self.per_field,
            "baseline_accuracy": self.baseline_accuracy,
            "unknown_pairs": self.unknown_pairs,
            "config": self.config,
        }
        if self.perf is not None:
            out["perf"] = self.perf
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)

    def render_table(self) -> str:
        def fmt(value) -> str:
            if value is None:
                return "null"
            if isinstance(value, float):
                return f"{value:.3f}"
            return str(value)

        rows = [
            ("papers compared", self.n),
            ("exact accuracy", self.exact_accuracy),
            ("tolerance accuracy", self.numeric_tol_accuracy),
            ("MAE", self.mae_true),
            ("within-tolerance rate", self.within_tol_rate),
            ("baseline accuracy", self.baseline_accuracy),
            ("unknown/known pairs", self.unknown_pairs),
        ]
        width = max(len(name) for name, _ in rows)
        lines = [f"{name.ljust(width)}  {fmt(value)}" for name, value in rows]
        lines.append("")
        header = f"{'field'.ljust(20)}  {'exact':>7}  {'tol':>7}  {'mae':>8}  {'n':>5}"
        lines.append(header)
        for name, scores in self.per_field.items():
            exact = fmt(scores.get("accuracy_exact", scores.get("jaccard")))
            tol = fmt(scores.get("accuracy_tol"))
            mae = fmt(scores.get("mae"))
            lines.append(
                f"{name.ljust(20)}  {exact:>7}  {tol:>7}  {mae:>8}  {scores['compared']:>5}"
            )
        return "\n".join(lines)


def mae_true(gold: list[float], pred: list[float]) -> float:
    """Standard mean absolute error over paired values."""
    if len(gold) != len(pred):
        raise ValueError("gold and pred must have equal length")
    if not gold:
        raise EmptyComparison("no value pairs to compare")
    return float(np.mean(np.abs(np.asarray(gold, float) - np.asarray(pred, float))))


def within_tol_rate(gold: list[float], pred: list[float], approximation_level: float) -> float:
    """Mean of 1[|y_i - yhat_i| <= approximation_level] over paired values."""
    if len(gold) != len(pred):
        raise ValueError("gold and pred must have equal length")
    if not gold:
        raise EmptyComparison("no value pairs to compare")
    deltas = np.abs(np.asarray(gold, float) - np.asarray(pred, float))
    return float(np.mean(deltas <= approximation_level))


def baseline_normal(gold_numeric: list[int], cfg: EvalConfig) -> float:
    """Accuracy of predictions sampled from a normal fit to the gold values.

    The fit uses the sample mean and population (divide-by-n) standard
    deviation. Each gold value gets its own child random stream derived
    from (baseline_seed, value index), so serial and parallel runs agree;
    each stream draws baseline_trials samples, which are rounded to the
    nearest integer and scored within numeric_tolerance_for_accuracy.
    Zero spread collapses the sampler onto the mean, giving accuracy 1.0.
    """
    if not gold_numeric:
        raise EmptyComparison("no gold values to fit")
    values = np.asarray(gold_numeric, float)
    mu = float(values.mean())
    sigma = float(values.std())  # population estimator, the MLE of the fit
    hits = 0
    for i, y in enumerate(values):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=cfg.baseline_seed, spawn_key=(i,))
        )
        samples = np.rint(rng.normal(mu, sigma, cfg.baseline_trials))
        hits += int(np.count_nonzero(np.abs(samples - y) <= cfg.numeric_tolerance_for_accuracy))
    return hits / (len(values) * cfg.baseline_trials)


def _accuracy_fragments(
    gold: list[GoldAnnotation], pred: list[ExtractionRecord], cfg: EvalConfig
) -> tuple[dict[str, dict], dict]:
    by_doc = {p.doc_id: p for p in pred}
    pairs: list[tuple[GoldAnnotation, ExtractionRecord]] = []
    for g in gold:
        if g.doc_id not in by_doc:
            raise MissingPrediction(g.doc_id)
        pairs.append((g, by_doc[g.doc_id]))

    per_field: dict[str, dict] = {}
    pooled_exact = pooled_tol = pooled_compared = 0
    all_gold_known: list[float] = []
    all_pred_known: list[float] = []
    unknown_pairs = 0

    for field_name in NUMERIC_FIELDS:
        exact = tol = 0
        gold_known: list[float] = []
        pred_known: list[float] = []
        for g, p in pairs:
            gv, pv = getattr(g, field_name), getattr(p, field_name)
            if gv is None and pv is None:
                exact += 1
                tol += 1
            elif gv is None or pv is None:
                unknown_pairs += 1
            else:
                gold_known.append(gv)
                pred_known.append(pv)
                if abs(gv - pv) <= 0:
                    exact += 1
                if abs(gv - pv) <= cfg.numeric_tolerance_for_accuracy:
                    tol += 1
        per_field[field_name] = {
            "accuracy_exact": exact / len(pairs),
            "accuracy_tol": tol / len(pairs),
            "mae": mae_true(gold_known, pred_known) if gold_known else None,
            "compared": len(pairs),
        }
        pooled_exact += exact
        pooled_tol += tol
        pooled_compared += len(pairs)
        all_gold_known.extend(gold_known)
        all_pred_known.extend(pred_known)

    for field_name in CATEGORICAL_FIELDS:
        correct = 0
        for g, p in pairs:
            gv, pv = getattr(g, field_name), getattr(p, field_name)
            if gv is None and pv is None:
                correct += 1
            elif gv is not None and pv is not None and canonicalize(gv) == canonicalize(pv):
                correct += 1
        per_field[field_name] = {
            "accuracy_exact": correct / len(pairs),
            "accuracy_tol": correct / len(pairs),
            "compared": len(pairs),
        }
        pooled_exact += correct
        pooled_tol += correct
        pooled_compared += len(pairs)

    jaccards = []
    for g, p in pairs:
        gold_names = {canonicalize(v.name) for v in g.variables}
        pred_names = {canonicalize(v.name) for v in p.variables}
        if not gold_names and not pred_names:
            jaccards.append(1.0)
        else:
            jaccards.append(len(gold_names & pred_names) / len(gold_names | pred_names))
    per_field["variables"] = {
        "jaccard": sum(jaccards) / len(jaccards) if jaccards else None,
        "compared": len(pairs),
    }

    pooled = {
        "exact_accuracy": pooled_exact / pooled_compared,
        "numeric_tol_accuracy": pooled_tol / pooled_compared,
        "gold_known": all_gold_known,
        "pred_known": all_pred_known,
        "unknown_pairs": unknown_pairs,
    }
    return per_field, pooled


def field_accuracy(
    gold: list[GoldAnnotation], pred: list[ExtractionRecord], cfg: EvalConfig
) -> dict[str, dict]:
    """Per-field accuracy fragments (numeric at tolerance 0 and at the
    configured tolerance, categorical by canonicalized equality)."""
    per_field, _ = _accuracy_fragments(gold, pred, cfg)
    return per_field


def evaluate_records(
    gold: list[GoldAnnotation],
    pred: list[ExtractionRecord],
    cfg: EvalConfig,
    perf: dict | None = None,
) -> EvalReport:
    only_gold = {g.doc_id for g in gold} - {p.doc_id for p in pred}
    only_pred = {p.doc_id for p in pred} - {g.doc_id for g in gold}
    if only_gold or only_pred:
        raise DocIdMismatch(sorted(only_gold), sorted(only_pred))
    if not gold:
        raise EmptyComparison("empty corpus")
    per_field, pooled = _accuracy_fragments(gold, pred, cfg)
    gold_known = pooled["gold_known"]
    pred_known = pooled["pred_known"]
    has_numeric = bool(gold_known)
    baseline_values = [
        v for g in gold for f in NUMERIC_FIELDS if (v := getattr(g, f)) is not None
    ]
    return EvalReport(
        n=len(gold),
        exact_accuracy=pooled["exact_accuracy"],
        numeric_tol_accuracy=pooled["numeric_tol_accuracy"],
        mae_true=mae_true(gold_known, pred_known) if has_numeric else None,
        within_tol_rate=(
            within_tol_rate(gold_known, pred_known, cfg.approximation_level)
            if has_numeric
            else None
        ),
        per_field=per_field,
        baseline_accuracy=baseline_normal(baseline_values, cfg) if baseline_values else None,
        unknown_pairs=pooled["unknown_pairs"],
        config={
            "approximation_level": cfg.approximation_level,
            "numeric_tolerance_for_accuracy": cfg.numeric_tolerance_for_accuracy,
            "baseline_trials": cfg.baseline_trials,
            "baseline_seed": cfg.baseline_seed,
        },
        perf=perf,
    )


def _load_jsonl(path: str | Path, gold: bool) -> list:
    records = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(str(path), line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict) or "doc_id" not in obj:
                raise SchemaError(str(path), line_no, "expected an object with doc_id")
            try:
                record = (GoldAnnotation if gold else ExtractionRecord).from_dict(obj)
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(str(path), line_no, f"bad record: {exc}") from exc
            problems = record.validation_errors()
            if problems:
                raise SchemaError(str(path), line_no, "; ".join(problems))
            if record.doc_id in seen:
                raise SchemaError(str(path), line_no, f"duplicate doc_id {record.doc_id!r}")
            seen.add(record.doc_id)
            records.append(record)
    return records


def load_gold(path: str | Path) -> list[GoldAnnotation]:
    return _load_jsonl(path, gold=True)


def load_predictions(path: str | Path) -> list[ExtractionRecord]:
    return _load_jsonl(path, gold=False)


def evaluate_corpus(
    gold_path: str | Path,
    pred_path: str | Path,
    cfg: EvalConfig,
    perf: dict | None = None,
) -> EvalReport:
    """Load both JSONL corpora, pair by doc_id, and compute the report.

    Deterministic given cfg.baseline_seed. Raises SchemaError with a line
    number for malformed input and DocIdMismatch when the id sets differ.
    """
    gold = load_gold(gold_path)
    pred = load_predictions(pred_path)
    return evaluate_records(gold, pred, cfg, perf)
