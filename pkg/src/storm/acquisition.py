"""Turn prompt/goal/continuation text into knowledge-graph triples.

Sentences are run through a semantic-role-labeling provider; each labeled
frame becomes edges between its canonicalized arguments. A coreference map
collapses pronouns onto character names first so the graph keeps one node
per entity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Protocol, Sequence

from .errors import ProviderError, ValidationError
from .kg import KnowledgeGraph, Node, NodeKind, Triple
from .text import (
    ALL_PRONOUNS,
    PRONOUNS_FEMALE,
    PRONOUNS_MALE,
    PRONOUNS_NEUTER,
    PRONOUNS_PLURAL,
    is_name,
    normalize_concept,
    words,
)

# Hand-maintained name/gender rows used by the rule-based coreference pass.
# Names absent from the table match gendered pronouns of either gender.
NAME_GENDERS: dict[str, str] = {
    "jenny": "f", "jennifer": "f", "anna": "f", "sarah": "f", "mary": "f",
    "alice": "f", "emma": "f", "lucy": "f", "kate": "f", "sally": "f",
    "girl": "f", "woman": "f", "queen": "f", "princess": "f",
    "bob": "m", "charles": "m", "david": "m", "justin": "m", "john": "m",
    "jack": "m", "tom": "m", "henry": "m", "sam": "m", "robin": "m",
    "hero": "m", "king": "m", "man": "m", "boy": "m", "soldier": "m",
    "sherlock": "m", "bearskin": "m",
}

# Which argument role acts as the triple subject, highest priority first.
SUBJECT_ROLE_PRIORITY: tuple[str, ...] = ("Agent", "Theme", "Experiencer", "Stimulus")


@dataclass(frozen=True)
class SrlRecord:
    """One labeled frame for one sentence."""

    frame: str
    args: dict[str, str] = field(default_factory=dict)
    sentence_index: int = 0

    def __post_init__(self) -> None:
        if not self.frame:
            raise ValidationError("SRL record has an empty frame")


class SrlProvider(Protocol):
    def records(self, sentence: str, index: int) -> list[SrlRecord]: ...


@dataclass(frozen=True)
class CorefMap:
    """Mention text (lower-cased) -> canonical entity id.

    Canonical ids are fixed points of the map, checked at construction.
    """

    mapping: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for target in self.mapping.values():
            if self.mapping.get(target, target) != target:
                raise ValidationError(f"canonical id {target!r} is not a fixed point of the coref map")

    def resolve(self, mention: str) -> str:
        key = mention.strip().lower()
        return self.mapping.get(key, key)


CorefProvider = Callable[[Sequence[str]], CorefMap]


def rule_coref(sentences: Sequence[str]) -> CorefMap:
    """Desk-scale coreference: third-person pronouns resolve to the most
    recent preceding capitalized name of a compatible gender.

    Each pronoun surface form is resolved once, at its first occurrence.
    Neuter "it" never resolves to a name; unresolvable pronouns get a fresh
    ``unknown_<n>`` id. Distinct capitalized names are never merged.
    """
    mapping: dict[str, str] = {}
    seen_names: list[tuple[str, str]] = []  # (id, gender), in order of appearance
    unknown_count = 0
    for sentence in sentences:
        for token in words(sentence):
            low = token.lower()
            if is_name(token):
                name_id = normalize_concept(token)
                if name_id and name_id not in mapping:
                    mapping[name_id] = name_id
                if name_id and all(name_id != n for n, _ in seen_names):
                    seen_names.append((name_id, NAME_GENDERS.get(name_id, "?")))
            elif low in ALL_PRONOUNS and low not in mapping:
                antecedent = _match_antecedent(low, seen_names)
                if antecedent is None:
                    antecedent = f"unknown_{unknown_count}"
                    unknown_count += 1
                    mapping[antecedent] = antecedent
                mapping[low] = antecedent
    return CorefMap(mapping)


def _match_antecedent(pronoun: str, seen_names: list[tuple[str, str]]) -> str | None:
    if pronoun in PRONOUNS_NEUTER:
        return None
    if pronoun in PRONOUNS_MALE:
        accept = {"m", "?"}
    elif pronoun in PRONOUNS_FEMALE:
        accept = {"f", "?"}
    else:  # plural pronouns accept any antecedent
        accept = {"m", "f", "?"}
    for name_id, gender in reversed(seen_names):
        if gender in accept:
            return name_id
    return None


def srl_to_triples(
    record: SrlRecord, coref: CorefMap
) -> tuple[list[tuple[Triple, Node, Node]], list[Node]]:
    """Convert one SRL record into subject-relation-object triples.

    The subject is the highest-priority filled role; every other filled role
    becomes one object. Argument texts pass through the coreference map and
    are then lemma-normalized. Records with fewer than two usable arguments
    yield their lone node and no edge.
    """
    filled = {role: text for role, text in record.args.items() if text and text.strip()}
    nodes: dict[str, Node] = {}

    def node_for(arg_text: str) -> Node | None:
        canonical = coref.resolve(arg_text)
        node_id = normalize_concept(canonical)
        if not node_id:
            return None
        if node_id not in nodes:
            nodes[node_id] = Node(id=node_id, surface=arg_text.strip(), kind=NodeKind.STORY_ENTITY)
        return nodes[node_id]

    subject_role = next((r for r in SUBJECT_ROLE_PRIORITY if r in filled), None)
    if subject_role is None and filled:
        subject_role = sorted(filled)[0]

    subject = node_for(filled[subject_role]) if subject_role else None
    object_nodes = []
    for role in sorted(r for r in filled if r != subject_role):
        obj = node_for(filled[role])
        if obj is not None and (subject is None or obj.id != subject.id):
            object_nodes.append(obj)

    if subject is None:
        return [], []
    if not object_nodes:
        return [], [subject]
    out = []
    for obj in object_nodes:
        out.append((Triple(subject.id, record.frame, obj.id), subject, obj))
    return out, []


def build_graph(
    sentences: Sequence[str],
    srl: SrlProvider,
    coref: CorefProvider = rule_coref,
    label: str = "",
) -> KnowledgeGraph:
    """Union of the triple conversions of every SRL record of every sentence."""
    if not sentences:
        raise ValidationError("build_graph needs at least one sentence")
    coref_map = coref(sentences)
    graph = KnowledgeGraph.empty(label)
    for index, sentence in enumerate(sentences):
        try:
            records = srl.records(sentence, index)
        except Exception as exc:  # noqa: BLE001 - provider contract: attach the index
            raise ProviderError(f"SRL provider failed on sentence {index}: {exc}") from exc
        for record in records:
            edges, lone = srl_to_triples(record, coref_map)
            for triple, subj, obj in edges:
                graph = graph.add_triple(triple, subj, obj)
            for node in lone:
                graph = graph.add_node(node)
    return graph


class FileSrlProvider:
    """Fixture provider reading precomputed records from a JSON array of
    {"sentence_index": int, "frame": str, "args": {role: text}}."""

    def __init__(self, records: Iterable[SrlRecord]):
        self._by_index: dict[int, list[SrlRecord]] = {}
        for record in records:
            self._by_index.setdefault(record.sentence_index, []).append(record)

    @classmethod
    def from_file(cls, path: str | Path) -> "FileSrlProvider":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, list):
            raise ValidationError(f"SRL fixture {path} must be a JSON array")
        return cls(
            SrlRecord(frame=entry["frame"], args=dict(entry.get("args", {})),
                      sentence_index=int(entry.get("sentence_index", 0)))
            for entry in raw
        )

    def records(self, sentence: str, index: int) -> list[SrlRecord]:
        return list(self._by_index.get(index, []))
