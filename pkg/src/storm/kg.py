"""Immutable knowledge-graph values used for reader models and goal states.

A graph is a set of typed nodes plus relation edges. Graphs are values:
every mutation-shaped operation returns a new graph and never touches its
inputs, so graphs can be shared freely across beams and threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from .errors import ValidationError
from .text import collapse_whitespace


class NodeKind(Enum):
    STORY_ENTITY = "StoryEntity"
    STORY_EVENT = "StoryEvent"
    INFERRED_ENTITY = "InferredEntity"
    INFERRED_EVENT = "InferredEvent"

    @property
    def is_story(self) -> bool:
        return self in (NodeKind.STORY_ENTITY, NodeKind.STORY_EVENT)

    @property
    def is_inferred(self) -> bool:
        return not self.is_story

    @property
    def is_entity(self) -> bool:
        return self in (NodeKind.STORY_ENTITY, NodeKind.INFERRED_ENTITY)

    @property
    def is_event(self) -> bool:
        return not self.is_entity


STORY_KINDS = frozenset({NodeKind.STORY_ENTITY, NodeKind.STORY_EVENT})
INFERRED_KINDS = frozenset({NodeKind.INFERRED_ENTITY, NodeKind.INFERRED_EVENT})
ALL_KINDS = STORY_KINDS | INFERRED_KINDS


@dataclass(frozen=True)
class Node:
    """A typed graph node.

    ``id`` is the canonical lower-cased lemma string; ``surface`` keeps the
    original spelling for rendering. Story nodes sit at depth 0; inferred
    nodes carry the expansion depth that produced them plus the relation
    label they were inferred through.
    """

    id: str
    surface: str
    kind: NodeKind
    depth: int = 0
    source_relation: str | None = None

    def __post_init__(self) -> None:
        if not self.id or self.id != collapse_whitespace(self.id.lower()):
            raise ValidationError(f"node id must be non-empty, lower-cased, whitespace-normalized: {self.id!r}")
        if self.kind.is_story and self.depth != 0:
            raise ValidationError(f"story node {self.id!r} must have depth 0, got {self.depth}")
        if self.kind.is_inferred:
            if self.depth < 1:
                raise ValidationError(f"inferred node {self.id!r} must have depth >= 1, got {self.depth}")
            if not self.source_relation:
                raise ValidationError(f"inferred node {self.id!r} needs a source relation")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "surface": self.surface,
            "kind": self.kind.value,
            "depth": self.depth,
            "source_relation": self.source_relation,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Node":
        return cls(
            id=d["id"],
            surface=d["surface"],
            kind=NodeKind(d["kind"]),
            depth=d["depth"],
            source_relation=d.get("source_relation"),
        )


@dataclass(frozen=True)
class Triple:
    """A directed edge: subject and object are node ids."""

    subject: str
    relation: str
    object: str

    def __post_init__(self) -> None:
        if not self.subject or not self.relation or not self.object:
            raise ValidationError(f"triple fields must be non-empty: {self!r}")

    def to_dict(self) -> dict:
        return {"s": self.subject, "r": self.relation, "o": self.object}

    @classmethod
    def from_dict(cls, d: dict) -> "Triple":
        return cls(subject=d["s"], relation=d["r"], object=d["o"])

    def key(self) -> tuple[str, str, str]:
        return (self.subject, self.relation, self.object)


def _prefer(a: Node, b: Node) -> Node:
    """Deterministic collision winner: story beats inferred, then shallower,
    then a stable lexicographic tie-break so merging is order-independent."""
    def rank(n: Node) -> tuple:
        return (n.kind.is_inferred, n.depth, n.kind.value, n.source_relation or "", n.surface)
    return min((a, b), key=rank)


class KnowledgeGraph:
    """Duplicate-free node and edge sets with a free-form label."""

    __slots__ = ("_nodes", "_edges", "label")

    def __init__(self, nodes: Iterable[Node] = (), edges: Iterable[Triple] = (), label: str = ""):
        merged: dict[str, Node] = {}
        for node in nodes:
            merged[node.id] = _prefer(merged[node.id], node) if node.id in merged else node
        edge_set = frozenset(edges)
        for edge in edge_set:
            if edge.subject not in merged or edge.object not in merged:
                raise ValidationError(f"edge {edge.key()} references a node missing from the graph")
        self._nodes = MappingProxyType(dict(sorted(merged.items())))
        self._edges = edge_set
        self.label = label

    @classmethod
    def empty(cls, label: str = "") -> "KnowledgeGraph":
        return cls(label=label)

    @property
    def nodes(self) -> Mapping[str, Node]:
        return self._nodes

    @property
    def edges(self) -> frozenset[Triple]:
        return self._edges

    @property
    def size(self) -> int:
        """Number of distinct node ids; the normalizer in overlap scores."""
        return len(self._nodes)

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def __iter__(self) -> Iterator[Node]:
        return iter(self._nodes.values())

    def add_triple(self, triple: Triple, subject_node: Node, object_node: Node) -> "KnowledgeGraph":
        """New graph with the triple and its endpoint nodes added.

        Idempotent for duplicates; endpoint ids must match the triple.
        """
        if subject_node.id != triple.subject or object_node.id != triple.object:
            raise ValidationError(
                f"node ids ({subject_node.id!r}, {object_node.id!r}) do not match triple {triple.key()}"
            )
        return KnowledgeGraph(
            nodes=list(self._nodes.values()) + [subject_node, object_node],
            edges=self._edges | {triple},
            label=self.label,
        )

    def add_node(self, node: Node) -> "KnowledgeGraph":
        return KnowledgeGraph(list(self._nodes.values()) + [node], self._edges, self.label)

    def merge(self, other: "KnowledgeGraph") -> "KnowledgeGraph":
        """Union by node id and edge key; keeps this graph's label.

        On node-id collisions the story-extracted node wins over an inferred
        one, and the shallower node wins among inferred ones.
        """
        return KnowledgeGraph(
            nodes=list(self._nodes.values()) + list(other._nodes.values()),
            edges=self._edges | other._edges,
            label=self.label,
        )

    def entities(self, kinds: Iterable[NodeKind]) -> list[Node]:
        """Nodes of the given kinds, sorted by id for deterministic iteration."""
        wanted = frozenset(kinds)
        return [node for node in self._nodes.values() if node.kind in wanted]

    def story_nodes(self) -> list[Node]:
        return self.entities(STORY_KINDS)

    def with_label(self, label: str) -> "KnowledgeGraph":
        return KnowledgeGraph(self._nodes.values(), self._edges, label)

    def content_key(self) -> tuple:
        """Label-independent identity used by the merge algebra properties."""
        return (
            tuple((n.id, n.surface, n.kind.value, n.depth, n.source_relation) for n in self._nodes.values()),
            tuple(sorted(e.key() for e in self._edges)),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return self.label == other.label and self.content_key() == other.content_key()

    def __hash__(self) -> int:
        return hash((self.label, self.content_key()))

    def __repr__(self) -> str:
        return f"KnowledgeGraph(label={self.label!r}, nodes={len(self._nodes)}, edges={len(self._edges)})"

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "nodes": [n.to_dict() for n in self._nodes.values()],
            "edges": [e.to_dict() for e in sorted(self._edges, key=Triple.key)],
        }

    def to_json(self) -> str:
        """Canonical serialization: nodes sorted by id, edges lexicographically."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "KnowledgeGraph":
        return cls(
            nodes=[Node.from_dict(n) for n in d["nodes"]],
            edges=[Triple.from_dict(e) for e in d["edges"]],
            label=d.get("label", ""),
        )

    @classmethod
    def from_json(cls, text: str) -> "KnowledgeGraph":
        return cls.from_dict(json.loads(text))
