"""Score candidate expansions against the goal world state.

Two overlap fractions feed a weighted combination:

* the story overlap counts goal nodes matched by story-extracted candidate
  nodes, over the goal's node count;
* the inference overlap counts expanded-goal nodes matched by the
  candidate's inference set, over the expanded goal's node count.

A match is id equality; each goal node counts at most once no matter how
many candidate nodes hit it, which keeps both fractions within [0, 1].
Detecting an inference link between a story-side chain and a goal-side
chain overrides the combined score to 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .expansion import CandidateExpansion, InferenceChain
from .kg import KnowledgeGraph, Node
from .providers import EmbeddingSimilarityProvider


@dataclass(frozen=True)
class Link:
    """A story-side chain joined to a goal-side chain at similar events."""

    story_chain: InferenceChain
    goal_chain: InferenceChain
    story_event: str
    goal_event: str
    similarity: float

    def joined_path(self) -> list[str]:
        """Full path from story root to goal root through the matched events."""
        story_part = self.story_chain.texts()
        story_part = story_part[: story_part.index(self.story_event) + 1]
        goal_part = self.goal_chain.texts()
        goal_part = goal_part[: goal_part.index(self.goal_event) + 1]
        tail = list(reversed(goal_part))
        if self.goal_event == self.story_event:
            tail = tail[1:]  # drop the duplicated junction event
        return story_part + tail

    def story_events_to_junction(self) -> list[str]:
        """The story-side hop events up to and including the matched one;
        empty when the chain carries no hops."""
        events = self.story_chain.events()
        if self.story_event not in events:
            return []
        return events[: events.index(self.story_event) + 1]


@dataclass(frozen=True)
class ScoreBreakdown:
    r1: float
    r2: float
    alpha: float
    combined: float
    link: Link | None = None

    def to_dict(self) -> dict:
        d = {"r1": self.r1, "r2": self.r2, "alpha": self.alpha, "R": self.combined}
        if self.link is not None:
            d["link"] = {
                "path": self.link.joined_path(),
                "similarity": self.link.similarity,
                "story_event": self.link.story_event,
                "goal_event": self.link.goal_event,
            }
        return d


def entity_overlap_r1(candidate: KnowledgeGraph, goal: KnowledgeGraph) -> float:
    """Fraction of goal story nodes whose id appears among the candidate's
    story-extracted nodes; inference nodes on either side do not count."""
    goal_story = [n.id for n in goal.story_nodes()]
    if not goal_story:
        raise ValidationError("goal graph has no story nodes to match against")
    candidate_story = {n.id for n in candidate.story_nodes()}
    matched = sum(1 for node_id in goal_story if node_id in candidate_story)
    return matched / len(goal_story)


def inference_overlap_r2(inference_set: frozenset[Node] | set[Node], expanded_goal: KnowledgeGraph) -> float:
    """Fraction of expanded-goal nodes matched by the candidate's inference set."""
    if len(expanded_goal) == 0:
        raise ValidationError("expanded goal graph is empty")
    inferred_ids = {n.id for n in inference_set}
    matched = sum(1 for node_id in expanded_goal.nodes if node_id in inferred_ids)
    return matched / len(expanded_goal)


def combined_score(
    candidate: CandidateExpansion,
    goal: KnowledgeGraph,
    expanded_goal: KnowledgeGraph,
    alpha: float,
    link: Link | None = None,
) -> ScoreBreakdown:
    """Weighted overlap score; a detected link forces the score to 1."""
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must be within [0, 1], got {alpha}")
    r1 = entity_overlap_r1(candidate.graph, goal)
    r2 = inference_overlap_r2(candidate.inference_set, expanded_goal)
    if link is not None:
        return ScoreBreakdown(r1=r1, r2=r2, alpha=alpha, combined=1.0, link=link)
    return ScoreBreakdown(r1=r1, r2=r2, alpha=alpha, combined=alpha * r1 + (1.0 - alpha) * r2)


def detect_link(
    story_chains: list[InferenceChain],
    goal_chains: list[InferenceChain],
    embed: EmbeddingSimilarityProvider,
    threshold: float,
) -> Link | None:
    """Best event pair across story and goal chains, if similar enough.

    Similarity is computed pairwise over every hop event of every chain on
    each side; the comparison against the threshold is inclusive. Ties are
    broken toward the lexicographically smallest (story event, goal event).
    """
    if not 0.0 < threshold <= 1.0:
        raise ValidationError(f"threshold must be within (0, 1], got {threshold}")
    story_events = sorted({e for chain in story_chains for e in chain.events()})
    goal_events = sorted({e for chain in goal_chains for e in chain.events()})
    if not story_events or not goal_events:
        return None
    matrix = embed.similarity(story_events, goal_events)
    best: tuple[float, str, str] | None = None
    for i, s_event in enumerate(story_events):
        for j, g_event in enumerate(goal_events):
            value = matrix[i][j]
            if value < threshold:
                continue
            key = (-value, s_event, g_event)
            if best is None or key < (-best[0], best[1], best[2]):
                best = (value, s_event, g_event)
    if best is None:
        return None
    value, s_event, g_event = best
    story_chain = _first_chain_with(story_chains, s_event)
    goal_chain = _first_chain_with(goal_chains, g_event)
    return Link(story_chain, goal_chain, s_event, g_event, value)


def _first_chain_with(chains: list[InferenceChain], event: str) -> InferenceChain:
    matches = [c for c in chains if event in c.events()]
    # Prefer the shortest path to the junction, then lexicographic stability.
    return min(matches, key=lambda c: (c.events().index(event), len(c), str(c)))


def select_topk(
    scored: list[tuple[int, CandidateExpansion, ScoreBreakdown]], k: int
) -> list[tuple[int, CandidateExpansion, ScoreBreakdown]]:
    """Global top-k across all (beam, candidate) pairs.

    Orders by combined score descending, then r1 and r2 descending, then
    candidate seed id ascending, then beam index ascending. Returns fewer
    than k selections only when fewer candidates exist.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    ranked = sorted(
        scored,
        key=lambda row: (-row[2].combined, -row[2].r1, -row[2].r2, row[1].seed.id, row[0]),
    )
    return ranked[:k]
