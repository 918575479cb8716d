"""Run-level performance accounting: latency, throughput, memory.

Memory is the client process's resident set in MB, sampled around backend
calls; the report keeps the peak. Platforms without process statistics
degrade to a null figure rather than aborting the run.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass

try:
    import psutil

    _PROCESS = psutil.Process()
except Exception:  # pragma: no cover - platform without process stats
    _PROCESS = None

_MB = 1024 * 1024


def sample_memory() -> float | None:
    """Current resident memory in MB, or None when unsupported."""
    if _PROCESS is None:
        return None
    try:
        return _PROCESS.memory_info().rss / _MB
    except Exception:  # pragma: no cover
        return None


@dataclass
class PerfReport:
    papers_processed: int
    mean_latency: float | None
    processing_speed: float | None  # papers per second of wall time
    peak_memory: float | None  # MB
    total_wall_time: float
    per_doc: list[dict]

    def to_dict(self) -> dict:
        return {
            "papers_processed": self.papers_processed,
            "mean_latency": self.mean_latency,
            "processing_speed": self.processing_speed,
            "peak_memory": self.peak_memory,
            "total_wall_time": self.total_wall_time,
            "memory_scope": "client process peak RSS",
            "per_doc": self.per_doc,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)

    def render_table(self) -> str:
        def fmt(value) -> str:
            return "null" if value is None else f"{value:.4f}"

        rows = [
            ("Papers Processed", str(self.papers_processed)),
            ("Latency (s)", fmt(self.mean_latency)),
            ("Processing Speed (papers/sec)", fmt(self.processing_speed)),
            ("Memory Consumption (MB)", fmt(self.peak_memory)),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


class PerfTracker:
    """Thread-safe accumulator for one extraction run."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._start = time.perf_counter()
        self._calls: list[tuple[str, float, int]] = []
        self._peak_memory: float | None = None
        self.sample_memory()

    def record_call(self, doc_id: str, latency: float, tokens: int) -> None:
        with self._lock:
            self._calls.append((doc_id, latency, tokens))

    def sample_memory(self) -> float | None:
        current = sample_memory()
        if current is not None:
            with self._lock:
                if self._peak_memory is None or current > self._peak_memory:
                    self._peak_memory = current
        return current

    def report(self) -> PerfReport:
        with self._lock:
            calls = list(self._calls)
            peak = self._peak_memory
        wall = time.perf_counter() - self._start
        latencies = [latency for _, latency, _ in calls]
        return PerfReport(
            papers_processed=len(calls),
            mean_latency=sum(latencies) / len(latencies) if latencies else None,
            processing_speed=len(calls) / wall if calls and wall > 0 else None,
            peak_memory=peak,
            total_wall_time=wall,
            per_doc=[
                {"doc_id": doc_id, "latency": latency, "prompt_tokens": tokens}
                for doc_id, latency, tokens in calls
            ],
        )
