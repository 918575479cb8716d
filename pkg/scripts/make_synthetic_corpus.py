#!/usr/bin/env python3
"""Regenerate the bundled synthetic corpus used by tests and demos.

Writes 20 small HTML papers plus a params.jsonl mapping each file to its
known-true six-field values. Deterministic: same seed, same bytes.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "data" / "synthetic_corpus"

SOURCES = [
    ("Prolific", "Prolific"),
    ("Mechanical Turk", "Mechanical Turk"),
    ("a mailing list", "mailing list"),
    ("word of mouth", "word of mouth"),
    ("social media", "social media"),
    ("campus", "campus"),
    ("snowball", "snowball"),
]
TYPES = ["user study", "interview", "lab experiment", "online survey"]
VARIABLES = [
    ("feedback modality", ["visual", "haptic"]),
    ("input technique", ["pen", "touch"]),
    ("menu layout", ["linear", "radial"]),
    ("difficulty level", ["easy", "hard"]),
]
TOPICS = [
    "adaptive text entry", "mid-air gestures", "menu navigation",
    "notification timing", "error recovery", "reading comprehension aids",
]


def build_paper(rng: random.Random, index: int) -> tuple[str, dict]:
    params: dict = {
        "file": f"paper-{index:03d}.html",
        "participants_total": None,
        "participants_stages": [],
        "recruitment_method": None,
        "num_tasks": None,
        "experiment_type": None,
        "variables": [],
        "num_trials": None,
    }
    method_lines: list[str] = []

    multi_stage = index % 7 == 3  # a couple of staged studies
    if multi_stage:
        first = rng.randint(8, 60)
        second = rng.randint(8, 60)
        method_lines.append(
            f"In Study 1, {first} participants evaluated the prototype."
        )
        method_lines.append(
            f"In Study 2, {second} participants repeated the procedure."
        )
        params["participants_stages"] = [first, second]
        params["participants_total"] = first + second
    else:
        count = rng.randint(8, 180)
        params["participants_total"] = count
        if index % 9 == 5:
            method_lines.append(f"We recruited {count} participants.")
        else:
            phrase, canonical = SOURCES[rng.randrange(len(SOURCES))]
            method_lines.append(f"We recruited {count} participants via {phrase}.")
            params["recruitment_method"] = canonical

    if index % 9 != 7:
        kind = TYPES[rng.randrange(len(TYPES))]
        method_lines.append(f"The evaluation was designed as a {kind}.")
        params["experiment_type"] = kind

    phased_tasks = index % 10 == 6
    tasks = rng.randint(2, 24)
    if phased_tasks:
        phases = rng.randint(2, 4)
        method_lines.append(
            f"Each participant completed {tasks} tasks across {phases} phases."
        )
        params["num_tasks"] = tasks * phases
    else:
        method_lines.append(f"Each participant completed {tasks} tasks.")
        params["num_tasks"] = tasks

    if index % 8 != 2:
        trials = rng.randint(6, 320)
        method_lines.append(f"Every participant performed {trials} trials.")
        params["num_trials"] = trials

    if index % 2 == 0:
        name, levels = VARIABLES[rng.randrange(len(VARIABLES))]
        method_lines.append(
            f"The independent variable was {name} ({', '.join(levels)})."
        )
        params["variables"] = [
            {"name": name, "role": "independent", "levels": levels}
        ]

    topic = TOPICS[rng.randrange(len(TOPICS))]
    body = "\n".join(f"<p>{line}</p>" for line in method_lines)
    html = f"""<!DOCTYPE html>
<html>
<head><title>Synthetic Paper {index}</title></head>
<body>
<h1>Synthetic Paper {index}: {topic}</h1>
<div>Abstract</div>
<p>This paper examines {topic} with a controlled evaluation.</p>
<div>Method</div>
{body}
<div>Results</div>
<p>Findings are summarized in the full report.</p>
</body>
</html>
"""
    return html, params


def main() -> None:
    rng = random.Random(20240501)
    docs_dir = OUT_DIR / "docs"
    docs_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for index in range(20):
        html, params = build_paper(rng, index)
        (docs_dir / params["file"]).write_text(html, encoding="utf-8")
        rows.append(json.dumps(params, ensure_ascii=False))
    (OUT_DIR / "params.jsonl").write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote 20 papers and params.jsonl under {OUT_DIR}")


if __name__ == "__main__":
    main()
