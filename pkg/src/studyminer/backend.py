"""Text-completion backends: remote chat/completions providers and a
deterministic offline mock.

Remote calls rotate round-robin across the configured API keys. Rate
limits (429) and server errors retry on the next key; auth failures mark
the key unhealthy before rotating; other client errors are final. The
mock applies the same rule/gazetteer mining the preprocessor uses, which
makes it a reproducible stand-in for a model in tests and demos.
"""

from __future__ import annotations

import enum
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from . import prompts
from .errors import AllKeysExhausted, BackendTimeout, PromptTooLarge, ProviderError
from .preprocess.chunking import estimate_tokens
from .preprocess.entities import (
    PARTICIPANT_TRIGGERS,
    SPELLED_NUMBERS,
    phase_mentions,
    quantity_mentions,
    recruitment_mentions,
)
from .records import (
    EXPERIMENT_TYPES,
    ExtractionRecord,
    Variable,
    VariableRole,
    render_response,
)


class Provider(enum.Enum):
    OPENAI_COMPATIBLE = "openai_compatible"
    LLAMA2_HTTP = "llama2_http"
    MOCK = "mock"


@dataclass
class BackendConfig:
    provider: Provider = Provider.MOCK
    base_url: str = ""
    model_name: str = "mock"
    api_keys: list[str] = field(default_factory=list)
    max_tokens: int = 4096
    temperature: float = 0.0
    max_retries: int = 6
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.provider is not Provider.MOCK and not self.api_keys:
            raise ValueError("remote providers need at least one api key")

    def resolved_keys(self) -> list[str]:
        """Entries of the form env:NAME pull the secret from the environment."""
        keys = []
        for key in self.api_keys:
            if key.startswith("env:"):
                name = key[4:]
                value = os.environ.get(name)
                if not value:
                    raise ValueError(f"environment variable {name} is not set")
                keys.append(value)
            else:
                keys.append(key)
        return keys

    @classmethod
    def from_dict(cls, obj: dict) -> "BackendConfig":
        data = dict(obj)
        if "provider" in data:
            data["provider"] = Provider(data["provider"])
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "BackendConfig":
        return cls.from_dict(json.loads(Path(path).read_text("utf-8")))


@dataclass
class CompletionResult:
    text: str
    latency: float
    prompt_token_estimate: int
    key_index_used: int


class _RetryableStatus(Exception):
    def __init__(self, status: int) -> None:
        super().__init__(f"retryable status {status}")
        self.status = status


class Backend:
    """A shareable completion handle; key-rotation state is lock-protected."""

    def __init__(self, config: BackendConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._keys = config.resolved_keys() if config.provider is not Provider.MOCK else []
        self._lock = threading.Lock()
        self._counter = 0
        self._unhealthy: set[int] = set()
        self._client = (
            None
            if config.provider is Provider.MOCK
            else httpx.Client(timeout=config.timeout, transport=transport)
        )

    def _next_key_index(self) -> int:
        with self._lock:
            healthy = [i for i in range(len(self._keys)) if i not in self._unhealthy]
            if not healthy:
                healthy = list(range(len(self._keys)))
            index = healthy[self._counter % len(healthy)]
            self._counter += 1
            return index

    def _mark_unhealthy(self, index: int) -> None:
        with self._lock:
            if len(self._unhealthy) < len(self._keys) - 1:
                self._unhealthy.add(index)

    def complete(self, prompt: str) -> CompletionResult:
        estimate = estimate_tokens(prompt)
        if estimate > self.config.max_tokens:
            raise PromptTooLarge(
                f"prompt estimate {estimate} exceeds max_tokens {self.config.max_tokens}"
            )
        if self.config.provider is Provider.MOCK:
            start = time.perf_counter()
            text = mock_complete(prompt)
            latency = max(time.perf_counter() - start, 1e-9)
            return CompletionResult(text, latency, estimate, 0)

        last_status = None
        for _ in range(max(self.config.max_retries, 1)):
            key_index = self._next_key_index()
            start = time.perf_counter()
            try:
                text = self._call_remote(prompt, self._keys[key_index])
            except _RetryableStatus as exc:
                last_status = exc.status
                if exc.status in (401, 403):
                    self._mark_unhealthy(key_index)
                continue
            latency = time.perf_counter() - start
            return CompletionResult(text, latency, estimate, key_index)
        raise AllKeysExhausted(
            f"no key succeeded within {self.config.max_retries} attempts "
            f"(last status {last_status})"
        )

    def _call_remote(self, prompt: str, key: str) -> str:
        body = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "max_tokens": self.config.max_tokens,
            "temperature": self.config.temperature,
        }
        try:
            response = self._client.post(
                f"{self.config.base_url.rstrip('/')}/chat/completions",
                json=body,
                headers={"Authorization": f"Bearer {key}"},
            )
        except httpx.TimeoutException as exc:
            raise BackendTimeout(f"provider timed out after {self.config.timeout}s") from exc
        except httpx.HTTPError as exc:
            raise ProviderError(0, f"transport failure: {exc.__class__.__name__}") from exc
        status = response.status_code
        if status == 429 or status >= 500 or status in (401, 403):
            raise _RetryableStatus(status)
        if status >= 400:
            raise ProviderError(status, response.text)
        try:
            choice = response.json()["choices"][0]
            text = choice.get("message", {}).get("content") or choice.get("text")
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(status, "malformed completion payload") from exc
        if text is None:
            raise ProviderError(status, "completion payload has no text")
        return text

    def close(self) -> None:
        if self._client is not None:
            self._client.close()


def complete(prompt: str, config: BackendConfig) -> CompletionResult:
    """One-shot completion with a fresh handle."""
    backend = Backend(config)
    try:
        return backend.complete(prompt)
    finally:
        backend.close()


# --- deterministic mock -----------------------------------------------------

_MULTIPLIER = re.compile(
    r"\b(?:across|including|over|in)\s+(\d+|%s)\s+(?:phases|sessions|blocks)\b"
    % "|".join(SPELLED_NUMBERS),
    re.IGNORECASE,
)
_VARIABLE_STATEMENT = re.compile(
    r"\b(independent|dependent|control)\s+variables?\s+(?:was|were|is|are)\s+"
    r"(?:the\s+)?([a-zA-Z][\w -]*?)\s*\(([^)]*)\)",
    re.IGNORECASE,
)


def _parse_spelled_or_int(token: str) -> int:
    lowered = token.lower()
    return SPELLED_NUMBERS.get(lowered, 0) if not token.isdigit() else int(token)


def _first_quantity(mentions, triggers: set[str]) -> int | None:
    for mention in mentions:
        if mention.trigger in triggers:
            return mention.span.value
    return None


def _mine_record(doc_text: str) -> tuple[ExtractionRecord, list[str]]:
    mentions = sorted(quantity_mentions(doc_text), key=lambda m: m.span.start)
    record = ExtractionRecord()
    stage_labels: list[str] = []

    phases = sorted(phase_mentions(doc_text), key=lambda p: p.span.start)
    stage_counts = []
    for phase in phases:
        window_end = phase.span.end + 80
        for mention in mentions:
            if (
                mention.trigger in PARTICIPANT_TRIGGERS
                and phase.span.end <= mention.span.start < window_end
            ):
                stage_counts.append(mention.span.value)
                stage_labels.append(phase.span.surface)
                break
    if len(stage_counts) >= 2:
        record.participants_stages = stage_counts
        record.participants_total = sum(stage_counts)
    else:
        stage_labels = []
        record.participants_total = _first_quantity(mentions, PARTICIPANT_TRIGGERS)

    record.num_tasks = _first_quantity(mentions, {"task"})
    record.num_trials = _first_quantity(mentions, {"trial"})

    sources = recruitment_mentions(doc_text)
    if sources:
        record.recruitment_method = min(sources, key=lambda s: s.start).surface

    lowered = doc_text.lower()
    hits = [(lowered.find(t), t) for t in EXPERIMENT_TYPES if t in lowered]
    if hits:
        record.experiment_type = min(hits)[1]

    for m in _VARIABLE_STATEMENT.finditer(doc_text):
        levels = [lvl.strip() for lvl in m.group(3).split(",") if lvl.strip()]
        record.variables.append(
            Variable(m.group(2).strip(), VariableRole(m.group(1).lower()), levels)
        )
    return record, stage_labels


def _mock_extraction(doc_text: str) -> str:
    record, stage_labels = _mine_record(doc_text)
    response = render_response(record, stage_labels or None)
    if record.num_tasks is not None:
        multiplier = _MULTIPLIER.search(doc_text)
        if multiplier:
            m_value = _parse_spelled_or_int(multiplier.group(1))
            if m_value:
                response = re.sub(
                    r"^Number of Tasks: \d+$",
                    f"Number of Tasks: {record.num_tasks} x {m_value}",
                    response,
                    flags=re.MULTILINE,
                )
    return response


# ordered: count topics before recruitment/type so "how many participants
# were recruited" answers the count, and no generic quantifier words so
# "how many tasks" never routes to participants
_QA_TOPICS = [
    ({"task", "tasks"}, "tasks"),
    ({"trial", "trials"}, "trials"),
    ({"participant", "participants", "subjects", "people"}, "participants"),
    ({"recruit", "recruited", "recruitment"}, "recruitment"),
    ({"type", "kind", "design"}, "type"),
]


def _mock_qa(passages: str, question: str) -> str:
    words = set(re.findall(r"[a-z]+", question.lower()))
    mentions = sorted(quantity_mentions(passages), key=lambda m: m.span.start)
    for vocabulary, topic in _QA_TOPICS:
        if not words & vocabulary:
            continue
        if topic == "participants":
            value = _first_quantity(mentions, PARTICIPANT_TRIGGERS)
            if value is not None:
                return f"{value} participants"
        elif topic in ("tasks", "trials"):
            value = _first_quantity(mentions, {topic.rstrip("s")})
            if value is not None:
                return f"{value} {topic}"
        elif topic == "recruitment":
            sources = recruitment_mentions(passages)
            if sources:
                return min(sources, key=lambda s: s.start).surface
        elif topic == "type":
            lowered = passages.lower()
            hits = [(lowered.find(t), t) for t in EXPERIMENT_TYPES if t in lowered]
            if hits:
                return min(hits)[1]
    return prompts.NOT_STATED


def mock_complete(prompt: str) -> str:
    """Pure function from prompt text to a canned or rule-mined response."""
    if prompts.CANNED_START in prompt and prompts.CANNED_END in prompt:
        start = prompt.index(prompts.CANNED_START) + len(prompts.CANNED_START)
        end = prompt.index(prompts.CANNED_END, start)
        return prompt[start:end]
    if prompts.SIX_FIELD_MARKER in prompt and prompts.DOC_MARKER in prompt:
        doc_text = prompt.split(prompts.DOC_MARKER, 1)[1]
        return _mock_extraction(doc_text)
    if prompts.QA_MARKER in prompt and prompts.PASSAGES_MARKER in prompt:
        rest = prompt.split(prompts.PASSAGES_MARKER, 1)[1]
        passages, _, question = rest.partition(prompts.QUESTION_MARKER)
        return _mock_qa(prompts.strip_passage_headers(passages), question.strip())
    return prompts.NOT_STATED
