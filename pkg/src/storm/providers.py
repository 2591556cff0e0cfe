"""Provider contracts plus the two interchangeable implementations.

Every neural role the pipeline needs (event inference, template infilling,
sequence scoring, embedding similarity, semantic role labeling) is a small
protocol. Deterministic fixture providers back the protocols with committed
lookup tables for exact, reproducible runs; HTTP providers speak the JSON
wire protocol to a model service. Scores on the wire are natural-log
probabilities.
"""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Protocol, Sequence, TypeVar

import jsonschema
import requests

from .acquisition import SrlProvider, SrlRecord
from .errors import FixtureError, TransportError, ValidationError

MASK = "<mask>"

# Social-interaction relations used by the event track, in request order.
EVENT_RELATIONS: tuple[str, ...] = ("xWant", "xNeed", "xEffect", "oWant", "oEffect")


class EventInferenceProvider(Protocol):
    def infer(self, text: str, relation: str, beam: int) -> list[str]: ...


class InfillProvider(Protocol):
    def infill(self, context: str, template: str) -> tuple[str, float]: ...


class SequenceScorerProvider(Protocol):
    def token_logprobs(self, context: str, continuation: str) -> list[float]: ...


class EmbeddingSimilarityProvider(Protocol):
    def similarity(self, a: Sequence[str], b: Sequence[str]) -> list[list[float]]: ...


# ---------------------------------------------------------------------------
# Fixture providers


@dataclass
class FixtureTables:
    """Deterministic lookup tables; missing keys mean empty, never a crash."""

    events: dict[tuple[str, str], list[str]] = field(default_factory=dict)
    infill: dict[tuple[str, str], tuple[str, float]] = field(default_factory=dict)
    scores: dict[str, list[float]] = field(default_factory=dict)
    similarity: dict[tuple[str, str], float] = field(default_factory=dict)
    srl: dict[str, list[SrlRecord]] = field(default_factory=dict)

    def lookup_events(self, text: str, relation: str) -> list[str]:
        return list(self.events.get((text, relation), []))

    def lookup_infill(self, template: str, context: str) -> tuple[str, float] | None:
        hit = self.infill.get((template, context))
        if hit is None:
            hit = self.infill.get((template, ""))  # wildcard-context row
        return hit

    def lookup_scores(self, sentence: str) -> list[float] | None:
        return self.scores.get(sentence)

    def lookup_similarity(self, a: str, b: str) -> float:
        if a == b:
            return 1.0
        return self.similarity.get((a, b), self.similarity.get((b, a), 0.0))

    def lookup_srl(self, sentence: str) -> list[SrlRecord]:
        return list(self.srl.get(sentence, []))


def _reject_duplicate(section: str, key, positions: dict, index: int) -> None:
    if key in positions:
        raise FixtureError(
            f"duplicate {section} key {key!r}: entries {positions[key]} and {index}"
        )
    positions[key] = index


def load_fixtures(path: str | Path) -> FixtureTables:
    """Parse a fixture bundle. Duplicate keys are rejected, naming both entries."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureError(f"cannot load fixtures from {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise FixtureError(f"fixture bundle {path} must be a JSON object")

    tables = FixtureTables()
    seen: dict = {}
    for i, row in enumerate(raw.get("events", []), start=1):
        key = (row["text"], row["relation"])
        _reject_duplicate("events", key, seen, i)
        tables.events[key] = [str(r) for r in row["results"]]
    seen = {}
    for i, row in enumerate(raw.get("infill", []), start=1):
        key = (row["template"], row.get("context", ""))
        _reject_duplicate("infill", key, seen, i)
        tables.infill[key] = (row["filled"], float(row.get("score", 0.0)))
    seen = {}
    for i, row in enumerate(raw.get("scores", []), start=1):
        key = row["sentence"]
        _reject_duplicate("scores", key, seen, i)
        tables.scores[key] = [float(x) for x in row["token_logprobs"]]
    seen = {}
    for i, row in enumerate(raw.get("similarity", []), start=1):
        key = (row["a"], row["b"])
        _reject_duplicate("similarity", key, seen, i)
        tables.similarity[key] = float(row["value"])
    seen = {}
    for i, row in enumerate(raw.get("srl", []), start=1):
        key = row["sentence"]
        _reject_duplicate("srl", key, seen, i)
        tables.srl[key] = [
            SrlRecord(frame=rec["frame"], args=dict(rec.get("args", {})))
            for rec in row["records"]
        ]
    return tables


class FixtureEventInference:
    def __init__(self, tables: FixtureTables):
        self._tables = tables

    def infer(self, text: str, relation: str, beam: int) -> list[str]:
        if beam < 1:
            raise ValidationError(f"beam must be >= 1, got {beam}")
        return self._tables.lookup_events(text, relation)[:beam]


class FixtureInfill:
    def __init__(self, tables: FixtureTables):
        self._tables = tables

    def infill(self, context: str, template: str) -> tuple[str, float]:
        hit = self._tables.lookup_infill(template, context)
        if hit is None:
            return "", 0.0  # empty fill; the caller drops the candidate
        return hit


class FixtureScorer:
    """Token scores from the table; unknown sentences fall back to a flat
    per-token log-probability so longer unknowns still score lower."""

    DEFAULT_TOKEN_LOGPROB = -2.0

    def __init__(self, tables: FixtureTables):
        self._tables = tables

    def token_logprobs(self, context: str, continuation: str) -> list[float]:
        hit = self._tables.lookup_scores(continuation)
        if hit is not None:
            return list(hit)
        return [self.DEFAULT_TOKEN_LOGPROB] * max(1, len(continuation.split()))


class FixtureSimilarity:
    def __init__(self, tables: FixtureTables):
        self._tables = tables

    def similarity(self, a: Sequence[str], b: Sequence[str]) -> list[list[float]]:
        return [[self._tables.lookup_similarity(x, y) for y in b] for x in a]


class TableSrlProvider:
    """SRL records keyed by exact sentence text; unknown sentences are empty."""

    def __init__(self, tables: FixtureTables):
        self._tables = tables

    def records(self, sentence: str, index: int) -> list[SrlRecord]:
        return [
            SrlRecord(frame=rec.frame, args=dict(rec.args), sentence_index=index)
            for rec in self._tables.lookup_srl(sentence)
        ]


# ---------------------------------------------------------------------------
# HTTP providers


@dataclass(frozen=True)
class ProviderEndpointConfig:
    base_url: str
    timeout_ms: int = 10_000
    retries: int = 2
    request_id_seed: int = 0
    max_in_flight: int = 8

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValidationError("timeout must be positive")
        if self.retries < 0:
            raise ValidationError("retries must be >= 0")


RESPONSE_SCHEMAS: dict[str, dict] = {
    "/v1/infer_events": {
        "type": "object",
        "required": ["results"],
        "properties": {
            "results": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["relation", "text", "score"],
                    "properties": {
                        "relation": {"type": "string"},
                        "text": {"type": "string"},
                        "score": {"type": "number"},
                    },
                },
            },
        },
    },
    "/v1/infill": {
        "type": "object",
        "required": ["filled", "score"],
        "properties": {"filled": {"type": "string"}, "score": {"type": "number"}},
    },
    "/v1/score": {
        "type": "object",
        "required": ["token_logprobs"],
        "properties": {"token_logprobs": {"type": "array", "items": {"type": "number"}}},
    },
    "/v1/similarity": {
        "type": "object",
        "required": ["matrix"],
        "properties": {
            "matrix": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        },
    },
    "/v1/srl": {
        "type": "object",
        "required": ["records"],
        "properties": {
            "records": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["frame", "args"],
                    "properties": {
                        "frame": {"type": "string"},
                        "args": {"type": "object", "additionalProperties": {"type": "string"}},
                    },
                },
            },
        },
    },
}

REQUEST_SCHEMAS: dict[str, dict] = {
    "/v1/infer_events": {
        "type": "object",
        "required": ["text", "relations", "beam"],
        "properties": {
            "text": {"type": "string"},
            "relations": {"type": "array", "items": {"type": "string"}},
            "beam": {"type": "integer", "minimum": 1},
        },
    },
    "/v1/infill": {
        "type": "object",
        "required": ["context", "template"],
        "properties": {"context": {"type": "string"}, "template": {"type": "string"}},
    },
    "/v1/score": {
        "type": "object",
        "required": ["context", "continuation"],
        "properties": {"context": {"type": "string"}, "continuation": {"type": "string"}},
    },
    "/v1/similarity": {
        "type": "object",
        "required": ["a", "b"],
        "properties": {
            "a": {"type": "array", "items": {"type": "string"}},
            "b": {"type": "array", "items": {"type": "string"}},
        },
    },
    "/v1/srl": {
        "type": "object",
        "required": ["sentence"],
        "properties": {"sentence": {"type": "string"}},
    },
}

_request_counter = itertools.count()


def http_call(endpoint: ProviderEndpointConfig, path: str, payload: dict) -> dict:
    """POST one JSON request, retrying transient failures, validating the reply."""
    url = endpoint.base_url.rstrip("/") + path
    body = dict(payload)
    body.setdefault("request_id", f"req-{endpoint.request_id_seed}-{next(_request_counter)}")
    timeout = endpoint.timeout_ms / 1000.0
    last_exc: Exception | None = None
    for attempt in range(endpoint.retries + 1):
        try:
            response = requests.post(url, json=body, timeout=timeout)
        except requests.Timeout as exc:
            last_exc = TransportError("timeout", f"{path} timed out after {endpoint.timeout_ms}ms")
            last_exc.__cause__ = exc
            continue
        except requests.ConnectionError as exc:
            last_exc = TransportError("connection", f"{path}: {exc}")
            continue
        if 500 <= response.status_code < 600:
            last_exc = TransportError("status", f"{path} returned {response.status_code}")
            time.sleep(0.05 * attempt)
            continue
        if response.status_code != 200:
            raise TransportError("status", f"{path} returned {response.status_code}")
        try:
            data = response.json()
        except ValueError as exc:
            raise TransportError("schema", f"{path} returned non-JSON body") from exc
        try:
            jsonschema.validate(data, RESPONSE_SCHEMAS[path])
        except jsonschema.ValidationError as exc:
            raise TransportError("schema", f"{path} response invalid: {exc.message}") from exc
        return data
    assert last_exc is not None
    raise last_exc


class HttpEventInference:
    def __init__(self, endpoint: ProviderEndpointConfig):
        self._endpoint = endpoint

    def infer(self, text: str, relation: str, beam: int) -> list[str]:
        if beam < 1:
            raise ValidationError(f"beam must be >= 1, got {beam}")
        data = http_call(self._endpoint, "/v1/infer_events", {"text": text, "relations": [relation], "beam": beam})
        rows = [r for r in data["results"] if r["relation"] == relation]
        rows.sort(key=lambda r: (-r["score"], r["text"]))
        return [r["text"] for r in rows[:beam]]


class HttpInfill:
    def __init__(self, endpoint: ProviderEndpointConfig):
        self._endpoint = endpoint

    def infill(self, context: str, template: str) -> tuple[str, float]:
        data = http_call(self._endpoint, "/v1/infill", {"context": context, "template": template})
        return data["filled"], float(data["score"])


class HttpScorer:
    def __init__(self, endpoint: ProviderEndpointConfig):
        self._endpoint = endpoint

    def token_logprobs(self, context: str, continuation: str) -> list[float]:
        data = http_call(self._endpoint, "/v1/score", {"context": context, "continuation": continuation})
        return [float(x) for x in data["token_logprobs"]]


class HttpSimilarity:
    def __init__(self, endpoint: ProviderEndpointConfig):
        self._endpoint = endpoint

    def similarity(self, a: Sequence[str], b: Sequence[str]) -> list[list[float]]:
        data = http_call(self._endpoint, "/v1/similarity", {"a": list(a), "b": list(b)})
        matrix = [[float(x) for x in row] for row in data["matrix"]]
        # Map cosine output onto [0, 1] only when the service emits negatives.
        if any(x < 0 for row in matrix for x in row):
            matrix = [[(1.0 + x) / 2.0 for x in row] for row in matrix]
        return matrix


class HttpSrlProvider:
    def __init__(self, endpoint: ProviderEndpointConfig):
        self._endpoint = endpoint

    def records(self, sentence: str, index: int) -> list[SrlRecord]:
        data = http_call(self._endpoint, "/v1/srl", {"sentence": sentence})
        return [
            SrlRecord(frame=rec["frame"], args=dict(rec["args"]), sentence_index=index)
            for rec in data["records"]
        ]


# ---------------------------------------------------------------------------
# Bundles

T = TypeVar("T")
U = TypeVar("U")


@dataclass
class ProviderSet:
    """All five neural roles behind one handle."""

    events: EventInferenceProvider
    infill: InfillProvider
    scorer: SequenceScorerProvider
    similarity: EmbeddingSimilarityProvider
    srl: SrlProvider
    max_concurrency: int = 1


def fixture_providers(tables: FixtureTables) -> ProviderSet:
    return ProviderSet(
        events=FixtureEventInference(tables),
        infill=FixtureInfill(tables),
        scorer=FixtureScorer(tables),
        similarity=FixtureSimilarity(tables),
        srl=TableSrlProvider(tables),
        max_concurrency=1,
    )


def http_providers(endpoint: ProviderEndpointConfig) -> ProviderSet:
    return ProviderSet(
        events=HttpEventInference(endpoint),
        infill=HttpInfill(endpoint),
        scorer=HttpScorer(endpoint),
        similarity=HttpSimilarity(endpoint),
        srl=HttpSrlProvider(endpoint),
        max_concurrency=endpoint.max_in_flight,
    )


def map_ordered(fn: Callable[[T], U], items: Iterable[T], workers: int = 1) -> list[U]:
    """Apply fn to items, optionally on a thread pool; results keep input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
