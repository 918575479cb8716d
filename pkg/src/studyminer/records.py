"""The six-field experimental-design record and its line-oriented response
grammar.

One field per line, case-insensitive labels:

    Number of Participants: <int | N/A | "Stage: int; Stage: int">
    Recruitment Method: <text | N/A>
    Number of Tasks: <int | N/A | "<n> x <m>">
    Type of Experiment: <text | N/A>
    Experimental Variables: <"name (role)[: level, level]" list | N/A>
    Number of Trials: <int | N/A>

Missing lines parse as unknown (None); so do N/A, unknown, and
"not reported". Integer ranges "a-b" resolve to the floor midpoint.
Multi-stage participant lists are summed into the total with the
per-stage counts preserved.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field

from .preprocess.entities import SPELLED_NUMBERS

PARTICIPANTS_LABEL = "Number of Participants"
RECRUITMENT_LABEL = "Recruitment Method"
TASKS_LABEL = "Number of Tasks"
TYPE_LABEL = "Type of Experiment"
VARIABLES_LABEL = "Experimental Variables"
TRIALS_LABEL = "Number of Trials"

FIELD_LABELS = [
    PARTICIPANTS_LABEL,
    RECRUITMENT_LABEL,
    TASKS_LABEL,
    TYPE_LABEL,
    VARIABLES_LABEL,
    TRIALS_LABEL,
]

# vocabulary the annotation guidelines use for experiment design
EXPERIMENT_TYPES = ("user study", "interview", "lab experiment", "online survey")

_UNKNOWN_TOKENS = {"", "n/a", "na", "none", "unknown", "not reported", "not stated"}
_INT = re.compile(r"^\d[\d,]*$")
_RANGE = re.compile(r"^(\d[\d,]*)\s*[-–]\s*(\d[\d,]*)$")
_PRODUCT = re.compile(r"^(\d[\d,]*)\s*[x×]\s*(\d[\d,]*)$", re.IGNORECASE)
_STAGE_ITEM = re.compile(r"^\s*([^:;]+?)\s*:\s*(\d[\d,]*)\s*$")
_VARIABLE_ITEM = re.compile(
    r"^\s*(?P<name>[^():;]+?)\s*(?:\((?P<role>[^)]*)\))?\s*(?::\s*(?P<levels>.+))?\s*$"
)


class VariableRole(enum.Enum):
    INDEPENDENT = "independent"
    DEPENDENT = "dependent"
    CONTROL = "control"


@dataclass
class Variable:
    name: str
    role: VariableRole
    levels: list[str] = field(default_factory=list)


@dataclass
class ExtractionRecord:
    doc_id: str = ""
    participants_total: int | None = None
    participants_stages: list[int] = field(default_factory=list)
    recruitment_method: str | None = None
    num_tasks: int | None = None
    experiment_type: str | None = None
    variables: list[Variable] = field(default_factory=list)
    num_trials: int | None = None
    provenance: list[int] = field(default_factory=list)
    unparseable: bool = False  # parse-level flag, not serialized

    def validation_errors(self) -> list[str]:
        """Field-path messages for records arriving over the wire."""
        problems = []
        for name in ("participants_total", "num_tasks", "num_trials"):
            value = getattr(self, name)
            if value is not None and (not isinstance(value, int) or value < 0):
                problems.append(f"{name}: must be a nonnegative integer or null")
        if any(not isinstance(s, int) or s < 0 for s in self.participants_stages):
            problems.append("participants_stages: entries must be nonnegative integers")
        elif self.participants_stages and self.participants_total != sum(self.participants_stages):
            problems.append("participants_total: must equal the sum of participants_stages")
        for i, variable in enumerate(self.variables):
            if not variable.name:
                problems.append(f"variables[{i}].name: must be non-empty")
        return problems

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "participants_total": self.participants_total,
            "participants_stages": list(self.participants_stages),
            "recruitment_method": self.recruitment_method,
            "num_tasks": self.num_tasks,
            "experiment_type": self.experiment_type,
            "variables": [
                {"name": v.name, "role": v.role.value, "levels": list(v.levels)}
                for v in self.variables
            ],
            "num_trials": self.num_trials,
            "provenance": list(self.provenance),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, obj: dict) -> "ExtractionRecord":
        return cls(
            doc_id=obj.get("doc_id", ""),
            participants_total=obj.get("participants_total"),
            participants_stages=list(obj.get("participants_stages") or []),
            recruitment_method=obj.get("recruitment_method"),
            num_tasks=obj.get("num_tasks"),
            experiment_type=obj.get("experiment_type"),
            variables=[
                Variable(
                    v["name"], VariableRole(v.get("role", "independent")),
                    list(v.get("levels") or []),
                )
                for v in obj.get("variables") or []
            ],
            num_trials=obj.get("num_trials"),
            provenance=list(obj.get("provenance") or []),
        )


def _is_unknown(value: str) -> bool:
    return value.strip().rstrip(".").lower() in _UNKNOWN_TOKENS


def _parse_int(value: str) -> int | None:
    value = value.strip()
    if _INT.match(value):
        return int(value.replace(",", ""))
    if value.lower() in SPELLED_NUMBERS:
        return SPELLED_NUMBERS[value.lower()]
    m = _RANGE.match(value)
    if m:
        low = int(m.group(1).replace(",", ""))
        high = int(m.group(2).replace(",", ""))
        return (low + high) // 2
    m = re.search(r"\d[\d,]*", value)  # tolerate prose around the number
    if m:
        return int(m.group(0).replace(",", ""))
    return None


def _parse_participants(value: str) -> tuple[int | None, list[int]]:
    if _is_unknown(value):
        return None, []
    parts = value.split(";")
    stages = []
    for part in parts:
        m = _STAGE_ITEM.match(part)
        if not m:
            stages = []
            break
        stages.append(int(m.group(2).replace(",", "")))
    if stages:
        return sum(stages), stages
    return _parse_int(value), []


def normalize_tasks(n: int, m: int | None) -> int:
    """Tasks repeated across m phases count n*m times total."""
    return n * m if m is not None else n


def _parse_tasks(value: str) -> int | None:
    if _is_unknown(value):
        return None
    m = _PRODUCT.match(value.strip())
    if m:
        return normalize_tasks(
            int(m.group(1).replace(",", "")), int(m.group(2).replace(",", ""))
        )
    return _parse_int(value)


def _parse_role(text: str | None) -> VariableRole:
    lowered = (text or "").strip().lower()
    for role in VariableRole:
        if lowered.startswith(role.value[:3]) and lowered:
            return role
    return VariableRole.INDEPENDENT


def _parse_variables(value: str) -> list[Variable]:
    if _is_unknown(value):
        return []
    out = []
    for item in value.split(";"):
        m = _VARIABLE_ITEM.match(item)
        if not m or not m.group("name").strip():
            continue
        levels = [
            lvl.strip() for lvl in (m.group("levels") or "").split(",") if lvl.strip()
        ]
        out.append(Variable(m.group("name").strip(), _parse_role(m.group("role")), levels))
    return out


def parse_response(text: str) -> ExtractionRecord:
    """Tolerantly parse a backend response into a record.

    Never raises: a response with zero recognizable field labels comes
    back all-unknown with the unparseable flag set.
    """
    record = ExtractionRecord()
    found = 0
    for line in text.splitlines():
        m = re.match(r"^\s*([A-Za-z ]+?)\s*:\s*(.*)$", line)
        if not m:
            continue
        label = m.group(1).strip().lower()
        value = m.group(2).strip()
        if label == PARTICIPANTS_LABEL.lower():
            record.participants_total, record.participants_stages = _parse_participants(value)
        elif label == RECRUITMENT_LABEL.lower():
            record.recruitment_method = None if _is_unknown(value) else value
        elif label == TASKS_LABEL.lower():
            record.num_tasks = _parse_tasks(value)
        elif label == TYPE_LABEL.lower():
            record.experiment_type = None if _is_unknown(value) else value
        elif label == VARIABLES_LABEL.lower():
            record.variables = _parse_variables(value)
        elif label == TRIALS_LABEL.lower():
            record.num_trials = _parse_int(value)
        else:
            continue
        found += 1
    record.unparseable = found == 0
    return record


def render_response(record: ExtractionRecord, stage_labels: list[str] | None = None) -> str:
    """Render a record in the response grammar (inverse of parse_response)."""

    def int_or_na(value: int | None) -> str:
        return "N/A" if value is None else str(value)

    if record.participants_stages:
        labels = stage_labels or [
            f"Stage {i + 1}" for i in range(len(record.participants_stages))
        ]
        participants = "; ".join(
            f"{label}: {count}"
            for label, count in zip(labels, record.participants_stages)
        )
    else:
        participants = int_or_na(record.participants_total)
    if record.variables:
        rendered = []
        for v in record.variables:
            item = f"{v.name} ({v.role.value})"
            if v.levels:
                item += ": " + ", ".join(v.levels)
            rendered.append(item)
        variables = "; ".join(rendered)
    else:
        variables = "N/A"
    return "\n".join(
        [
            f"{PARTICIPANTS_LABEL}: {participants}",
            f"{RECRUITMENT_LABEL}: {record.recruitment_method or 'N/A'}",
            f"{TASKS_LABEL}: {int_or_na(record.num_tasks)}",
            f"{TYPE_LABEL}: {record.experiment_type or 'N/A'}",
            f"{VARIABLES_LABEL}: {variables}",
            f"{TRIALS_LABEL}: {int_or_na(record.num_trials)}",
        ]
    )
