"""Commonsense expansion of reader-model and goal graphs.

Two tracks grow a graph outward from what the story states explicitly:

* the entity track walks a weighted concept-triple store (physical
  relations such as AtLocation or UsedFor) breadth-first;
* the event track asks an inference provider for social-interaction
  follow-ons (xWant, xNeed, ...) of event phrases, then attaches the
  physical entities those events mention.

Depths are absolute: a node's depth counts hops from the story-extracted
layer (depth 0), so a candidate seeded at depth 1 and expanded under a
budget of 2 gains exactly one more hop.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ExpansionError, ValidationError
from .kg import KnowledgeGraph, Node, NodeKind, Triple
from .providers import EVENT_RELATIONS, EventInferenceProvider
from .text import event_phrase, normalize_concept

# Physical-relation vocabulary accepted by the concept store.
ENTITY_RELATIONS: frozenset[str] = frozenset({
    "AtLocation", "CapableOf", "HasA", "HasProperty", "MadeOf",
    "MadeUpOf", "MotivatedByGoal", "UsedFor", "PartOf",
})


class ConceptStore:
    """Weighted (head, relation, tail) triples indexed by normalized head.

    Lookups are deterministic: rows sort by descending weight, then tail,
    then relation.
    """

    def __init__(self, triples: Iterable[tuple[str, str, str, float]] = ()):
        self._index: dict[str, list[tuple[str, str, float]]] = {}
        self._count = 0
        for relation, head, tail, weight in triples:
            if relation not in ENTITY_RELATIONS:
                raise ValidationError(f"relation {relation!r} is not in the allowed physical-relation set")
            head_id = normalize_concept(head)
            if not head_id or not tail.strip():
                raise ValidationError(f"empty head or tail in store triple {(relation, head, tail)!r}")
            self._index.setdefault(head_id, []).append((relation, tail.strip(), float(weight)))
            self._count += 1
        for rows in self._index.values():
            rows.sort(key=lambda r: (-r[2], r[1], r[0]))

    @classmethod
    def from_tsv(cls, path: str | Path) -> "ConceptStore":
        """Load ``relation<TAB>head<TAB>tail<TAB>weight`` lines (UTF-8)."""
        triples = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValidationError(f"{path}:{lineno}: expected 4 tab-separated fields, got {len(parts)}")
            relation, head, tail, weight = parts
            if relation not in ENTITY_RELATIONS:
                raise ValidationError(f"{path}:{lineno}: unknown relation {relation!r}")
            try:
                w = float(weight)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: bad weight {weight!r}") from None
            triples.append((relation, head, tail, w))
        return cls(triples)

    def lookup(self, head_id: str) -> list[tuple[str, str, float]]:
        """Rows (relation, tail, weight) for a normalized head, best first."""
        return list(self._index.get(head_id, []))

    def __len__(self) -> int:
        return self._count


@dataclass(frozen=True)
class InferenceChain:
    """A path of inferred events: a root label plus (event text, relation) hops."""

    root: str
    hops: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        for _text, relation in self.hops:
            if relation not in EVENT_RELATIONS:
                raise ValidationError(f"chain hop relation {relation!r} is not a social relation")

    def events(self) -> list[str]:
        return [text for text, _relation in self.hops]

    def texts(self) -> list[str]:
        return [self.root] + self.events()

    def extended(self, text: str, relation: str) -> "InferenceChain":
        return InferenceChain(self.root, self.hops + ((text, relation),))

    def rerooted(self, new_root: str, seed_relation: str) -> "InferenceChain":
        """Turn a chain rooted at a seed into one rooted at the seed's source."""
        return InferenceChain(new_root, ((self.root, seed_relation),) + self.hops)

    def __len__(self) -> int:
        return len(self.hops)

    def __str__(self) -> str:
        return " -> ".join(self.texts())


@dataclass(frozen=True)
class CandidateExpansion:
    """One candidate concept with its inference set and expanded graph."""

    seed: Node
    inference_set: frozenset[Node]
    graph: KnowledgeGraph
    chains: tuple[InferenceChain, ...] = ()

    def __post_init__(self) -> None:
        if self.seed not in self.inference_set:
            raise ValidationError(f"candidate seed {self.seed.id!r} missing from its inference set")


def _entity_bfs(
    seed: Node, store: ConceptStore, max_depth: int, fanout: int | None
) -> tuple[dict[str, Node], list[Triple]]:
    """Breadth-first walk of the concept store under an absolute depth budget.

    Self-loops and already-visited tails are skipped; the fanout cap applies
    to store rows per head before that filtering.
    """
    visited: dict[str, Node] = {seed.id: seed}
    edges: list[Triple] = []
    queue: list[Node] = [seed]
    while queue:
        node = queue.pop(0)
        if node.depth >= max_depth:
            continue
        rows = store.lookup(node.id)
        if fanout is not None:
            rows = rows[:fanout]
        for relation, tail, _weight in rows:
            child_id = normalize_concept(tail)
            if not child_id or child_id == node.id or child_id in visited:
                continue
            child = Node(child_id, tail, NodeKind.INFERRED_ENTITY, node.depth + 1, relation)
            visited[child_id] = child
            edges.append(Triple(node.id, relation, child_id))
            queue.append(child)
    return visited, edges


def expand_entity(seed: Node, store: ConceptStore, depth: int, fanout: int) -> set[Node]:
    """Entity-track closure of one seed; includes the seed itself."""
    if depth < 1 or fanout < 1:
        raise ValidationError("depth and fanout must be >= 1")
    visited, _edges = _entity_bfs(seed, store, depth, fanout)
    return set(visited.values())


def infer_events(
    story_history: Sequence[str], provider: EventInferenceProvider, beam: int
) -> list[Node]:
    """First-level social-event inferences of the concatenated story history.

    One provider request per relation, in the fixed relation order; results
    are flattened and deduplicated by id, keeping (relation, rank) order.
    """
    if not story_history:
        raise ValidationError("infer_events needs a non-empty story history")
    if beam < 1:
        raise ValidationError(f"beam must be >= 1, got {beam}")
    query = " ".join(story_history)
    out: dict[str, Node] = {}
    for relation in EVENT_RELATIONS:
        try:
            texts = provider.infer(query, relation, beam)
        except Exception as exc:  # noqa: BLE001
            raise ExpansionError(relation, str(exc)) from exc
        for text in texts:
            node_id = normalize_concept(text)
            if node_id and node_id not in out:
                out[node_id] = Node(node_id, text, NodeKind.INFERRED_EVENT, 1, relation)
    return list(out.values())


def _event_bfs(
    seed: Node,
    provider: EventInferenceProvider,
    store: ConceptStore,
    max_depth: int,
    beam: int,
    fanout: int | None,
) -> tuple[dict[str, Node], list[Triple], list[InferenceChain]]:
    """Event-track walk: hop on social relations, then attach entities.

    Chains are rooted at the seed's text and record every root-to-leaf path
    of the hop tree. Entity attachment runs over every visited event whose
    depth leaves room under the budget.
    """
    visited: dict[str, Node] = {seed.id: seed}
    edges: list[Triple] = []
    chain_at: dict[str, InferenceChain] = {seed.id: InferenceChain(seed.surface)}
    children_of: dict[str, int] = {}
    queue: list[Node] = [seed]
    while queue:
        node = queue.pop(0)
        if node.depth >= max_depth:
            continue
        for relation in EVENT_RELATIONS:
            try:
                texts = provider.infer(node.surface, relation, beam)
            except Exception as exc:  # noqa: BLE001
                raise ExpansionError(relation, str(exc)) from exc
            for text in texts:
                child_id = normalize_concept(text)
                if not child_id or child_id == node.id or child_id in visited:
                    continue
                child = Node(child_id, text, NodeKind.INFERRED_EVENT, node.depth + 1, relation)
                visited[child_id] = child
                edges.append(Triple(node.id, relation, child_id))
                chain_at[child_id] = chain_at[node.id].extended(text, relation)
                children_of[node.id] = children_of.get(node.id, 0) + 1
                queue.append(child)
    chains = [
        chain_at[node_id]
        for node_id, node in visited.items()
        if node_id != seed.id and children_of.get(node_id, 0) == 0
    ]
    # Attach the physical entities each inferred event mentions.
    for node in list(visited.values()):
        if not node.kind.is_event or node.depth >= max_depth:
            continue
        rows = store.lookup(normalize_concept(node.surface))
        if fanout is not None:
            rows = rows[:fanout]
        for relation, tail, _weight in rows:
            child_id = normalize_concept(tail)
            if not child_id or child_id == node.id or child_id in visited:
                continue
            visited[child_id] = Node(child_id, tail, NodeKind.INFERRED_ENTITY, node.depth + 1, relation)
            edges.append(Triple(node.id, relation, child_id))
    return visited, edges, chains


def expand_event(
    seed: Node,
    provider: EventInferenceProvider,
    store: ConceptStore,
    depth: int,
    beam: int,
    fanout: int | None = None,
) -> tuple[set[Node], list[InferenceChain]]:
    """Event-track closure of one seed plus its root-to-leaf chains."""
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    visited, _edges, chains = _event_bfs(seed, provider, store, depth, beam, fanout)
    return set(visited.values()), chains


def candidate_expansions(
    graph: KnowledgeGraph,
    history: Sequence[str],
    store: ConceptStore,
    provider: EventInferenceProvider,
    *,
    depth: int,
    fanout: int,
    beam: int,
) -> list[CandidateExpansion]:
    """All candidate concepts for one reader model, each with its own
    inference set and merged graph.

    Entity candidates are the first-hop store inferences of every story
    entity; event candidates are the first-level social inferences of the
    story history. Candidates come back entities first, then events, each
    group ordered by seed id.
    """
    if len(graph) == 0:
        raise ValidationError("cannot expand an empty graph")

    story_root = event_phrase(history[-1]) if history else ""

    entity_seeds: dict[str, tuple[Node, Triple]] = {}
    for story_node in graph.entities({NodeKind.STORY_ENTITY}):
        for relation, tail, _weight in store.lookup(story_node.id)[:fanout]:
            seed_id = normalize_concept(tail)
            if not seed_id or seed_id == story_node.id or seed_id in graph or seed_id in entity_seeds:
                continue
            seed = Node(seed_id, tail, NodeKind.INFERRED_ENTITY, 1, relation)
            entity_seeds[seed_id] = (seed, Triple(story_node.id, relation, seed_id))

    event_seeds = [
        node for node in infer_events(history, provider, beam)
        if node.id not in entity_seeds and node.id not in graph
    ] if history else []

    out: list[CandidateExpansion] = []
    for seed_id in sorted(entity_seeds):
        seed, provenance = entity_seeds[seed_id]
        visited, edges = _entity_bfs(seed, store, depth, fanout)
        expanded = KnowledgeGraph(
            nodes=list(graph.nodes.values()) + list(visited.values()),
            edges=graph.edges | {provenance} | set(edges),
            label=graph.label,
        )
        out.append(CandidateExpansion(seed, frozenset(visited.values()), expanded))

    for seed in sorted(event_seeds, key=lambda n: n.id):
        visited, edges, chains = _event_bfs(seed, provider, store, depth, beam, fanout)
        rooted = tuple(c.rerooted(story_root, seed.source_relation or "") for c in chains)
        if not chains:
            rooted = (InferenceChain(story_root, ((seed.surface, seed.source_relation or ""),)),)
        expanded = KnowledgeGraph(
            nodes=list(graph.nodes.values()) + list(visited.values()),
            edges=graph.edges | set(edges),
            label=graph.label,
        )
        out.append(CandidateExpansion(seed, frozenset(visited.values()), expanded, rooted))
    return out


def expand_goal(
    goal_graph: KnowledgeGraph,
    goal_text: str,
    store: ConceptStore,
    provider: EventInferenceProvider,
    depth: int,
    *,
    beam: int = 5,
    fanout: int | None = 5,
) -> tuple[KnowledgeGraph, list[InferenceChain]]:
    """Expanded goal world state plus goal-rooted event chains."""
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    goal_root = event_phrase(goal_text)
    nodes: list[Node] = list(goal_graph.nodes.values())
    edges: set[Triple] = set(goal_graph.edges)

    for node in goal_graph.entities({NodeKind.STORY_ENTITY, NodeKind.STORY_EVENT}):
        visited, new_edges = _entity_bfs(node, store, depth, fanout)
        nodes.extend(visited.values())
        edges.update(new_edges)

    chains: list[InferenceChain] = []
    for seed in infer_events([goal_text], provider, beam):
        visited, new_edges, seed_chains = _event_bfs(seed, provider, store, depth, beam, fanout)
        nodes.extend(visited.values())
        edges.update(new_edges)
        if seed_chains:
            chains.extend(c.rerooted(goal_root, seed.source_relation or "") for c in seed_chains)
        else:
            chains.append(InferenceChain(goal_root, ((seed.surface, seed.source_relation or ""),)))
    return KnowledgeGraph(nodes, edges, goal_graph.label), chains
