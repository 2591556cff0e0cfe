"""The story-planning loop.

Each step expands every beam's reader model into candidate graphs, scores
them against the goal world state, keeps the global top-k, verbalizes the
chosen concepts into sentences, and folds the new sentences back into the
reader models. The run stops as soon as a beam reaches the goal (full
story-node overlap), clears the score threshold, consumes a detected
inference link, or the length budget runs out.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

from .acquisition import build_graph, rule_coref
from .errors import GenerationError, PipelineError, StormError, ValidationError
from .expansion import CandidateExpansion, ConceptStore, InferenceChain, candidate_expansions, expand_goal
from .generation import (
    cap_templates,
    decompose_event,
    fill_templates,
    make_templates,
    score_candidates,
    select_continuation,
)
from .kg import KnowledgeGraph, Node, NodeKind
from .providers import ProviderSet
from .scoring import Link, ScoreBreakdown, combined_score, detect_link, entity_overlap_r1, select_topk
from .text import detect_tense, event_phrase, normalize_concept, split_sentences

PROFILES: dict[str, dict] = {
    "roc": {"max_length": 4},
    "wp": {"max_length": 5},
    "ft": {"max_length": 4},
}


class StopReason(Enum):
    GOAL_REACHED = "GoalReached"
    SCORE_THRESHOLD = "ScoreThreshold"
    LINK_CONSUMED = "LinkConsumed"
    MAX_LENGTH = "MaxLength"
    EXHAUSTED = "Exhausted"


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = 0.5
    top_k: int = 2
    depth_story: int = 2
    depth_goal: int = 2
    provider_beam: int = 5
    fanout: int = 5
    template_cap: int = 512
    link_threshold: float = 0.8
    stop_threshold: float = 0.8
    max_length: int = 4  # generated sentences per segment, prompt excluded
    profile: str = "roc"
    append_goal: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError(f"alpha must be within [0, 1], got {self.alpha}")
        if not 0.0 < self.link_threshold <= 1.0:
            raise ValidationError(f"link threshold must be within (0, 1], got {self.link_threshold}")
        if not 0.0 < self.stop_threshold <= 1.0:
            raise ValidationError(f"stop threshold must be within (0, 1], got {self.stop_threshold}")
        for name in ("top_k", "depth_story", "depth_goal", "provider_beam", "fanout", "template_cap", "max_length"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.profile not in PROFILES:
            raise ValidationError(f"unknown profile {self.profile!r}; expected one of {sorted(PROFILES)}")

    @classmethod
    def for_profile(cls, profile: str, **overrides) -> "PipelineConfig":
        base = dict(PROFILES.get(profile) or {})
        if profile not in PROFILES:
            raise ValidationError(f"unknown profile {profile!r}; expected one of {sorted(PROFILES)}")
        base["profile"] = profile
        base.update(overrides)
        return cls(**base)


@dataclass(frozen=True)
class TraceStep:
    step: int
    beam: int
    chosen_concept: str
    score: ScoreBreakdown
    sentence: str
    nodes_added: tuple[str, ...]
    edges_added: int
    warning: str | None = None

    def to_dict(self) -> dict:
        record = {
            "step": self.step,
            "beam": self.beam,
            "chosen_concept": self.chosen_concept,
            "sentence": self.sentence,
            "graph_delta": {"nodes_added": list(self.nodes_added), "edges_added": self.edges_added},
        }
        record.update(self.score.to_dict())
        if self.warning:
            record["warning"] = self.warning
        return record


@dataclass(frozen=True)
class BeamState:
    """One (story, reader model) pair tracked by the search."""

    story: tuple[str, ...]
    graph: KnowledgeGraph
    trace: tuple[TraceStep, ...] = ()
    subjects: tuple[str, ...] = ()  # character surfaces, first-appearance order
    last_subject: str | None = None
    stopped: StopReason | None = None

    @property
    def generated(self) -> int:
        return len(self.trace)

    @property
    def final_score(self) -> float:
        return self.trace[-1].score.combined if self.trace else 0.0


@dataclass(frozen=True)
class StoryResult:
    beams: tuple[BeamState, ...]  # ranked best-first
    stop_reason: StopReason
    trace: tuple[TraceStep, ...]

    @property
    def best_story(self) -> list[str]:
        return list(self.beams[0].story)

    def trace_jsonl(self) -> str:
        return "\n".join(json.dumps(step.to_dict(), sort_keys=True) for step in self.trace)


@dataclass(frozen=True)
class _GoalState:
    graph: KnowledgeGraph
    expanded: KnowledgeGraph
    chains: tuple[InferenceChain, ...]


class _NoCandidates(StormError):
    pass


def _acquire(sentences: Sequence[str], providers: ProviderSet, label: str, context: Sequence[str] = ()) -> KnowledgeGraph:
    """Graph for new sentences, resolving pronouns against the full context."""
    full = list(context) + list(sentences)
    return build_graph(list(sentences), providers.srl, coref=lambda _s: rule_coref(full), label=label)


def _subject_surfaces(graph: KnowledgeGraph) -> list[str]:
    """Surfaces of story entities that act as triple subjects, id-sorted."""
    subject_ids = {edge.subject for edge in graph.edges}
    return [
        node.surface
        for node in graph.entities({NodeKind.STORY_ENTITY})
        if node.id in subject_ids
    ]


def _merge_subjects(beam: BeamState, sentence_graph: KnowledgeGraph) -> tuple[tuple[str, ...], str | None]:
    new_subjects = _subject_surfaces(sentence_graph)
    merged = list(beam.subjects)
    for surface in new_subjects:
        if surface not in merged:
            merged.append(surface)
    last = new_subjects[0] if new_subjects else beam.last_subject
    return tuple(merged), last


def _prior_subjects(beam: BeamState) -> list[str]:
    """Previous sentence's subject first, then every other prior character."""
    ordered = list(beam.subjects)
    if beam.last_subject and beam.last_subject in ordered:
        ordered.remove(beam.last_subject)
        ordered.insert(0, beam.last_subject)
    return ordered


def _generate_sentence(
    event_text: str,
    beam: BeamState,
    tense: str,
    config: PipelineConfig,
    providers: ProviderSet,
) -> str:
    context = " ".join(beam.story)
    parts = decompose_event(event_text, tense)
    templates = cap_templates(make_templates(parts, _prior_subjects(beam)), config.template_cap)
    workers = max(1, min(config.workers, providers.max_concurrency))
    candidates = fill_templates(templates, context, providers.infill, workers)
    if not candidates:
        raise GenerationError(f"no usable fills for event {event_text!r}")
    candidates = score_candidates(candidates, context, providers.scorer, workers)
    return select_continuation(candidates).text


def _append_sentence(
    beam: BeamState,
    sentence: str,
    base_graph: KnowledgeGraph,
    providers: ProviderSet,
) -> tuple[BeamState, tuple[str, ...], int]:
    """New beam with the sentence appended and re-acquired into the graph."""
    sentence_graph = _acquire([sentence], providers, label="", context=beam.story)
    new_graph = base_graph.merge(sentence_graph)
    nodes_added = tuple(sorted(set(new_graph.nodes) - set(beam.graph.nodes)))
    edges_added = len(new_graph.edges) - len(beam.graph.edges)
    subjects, last = _merge_subjects(beam, sentence_graph)
    return (
        replace(beam, story=beam.story + (sentence,), graph=new_graph, subjects=subjects, last_subject=last),
        nodes_added,
        edges_added,
    )


def verbalize_link(
    link: Link,
    beam: BeamState,
    config: PipelineConfig,
    providers: ProviderSet,
    tense: str,
) -> list[tuple[str, str | None]]:
    """Sentences (with optional warnings) realizing the story-side hop events.

    A hop whose generation fails falls back to a templated literal sentence
    and is flagged rather than aborting the link.
    """
    out: list[tuple[str, str | None]] = []
    current = beam
    for event in link.story_events_to_junction():
        try:
            sentence = _generate_sentence(event, current, tense, config, providers)
            warning = None
        except (GenerationError, ValidationError) as exc:
            subject = current.last_subject or (current.subjects[0] if current.subjects else "They")
            sentence = f"Then, {subject} {event}."
            warning = f"fallback sentence for hop {event!r}: {exc}"
        out.append((sentence, warning))
        current, _nodes, _edges = _append_sentence(current, sentence, current.graph, providers)
    return out


def _score_all(
    beams: Sequence[BeamState],
    goal: _GoalState,
    config: PipelineConfig,
    providers: ProviderSet,
    store: ConceptStore,
) -> list[tuple[int, CandidateExpansion, ScoreBreakdown]]:
    scored: list[tuple[int, CandidateExpansion, ScoreBreakdown]] = []
    for beam_index, beam in enumerate(beams):
        candidates = candidate_expansions(
            beam.graph,
            list(beam.story),
            store,
            providers.events,
            depth=config.depth_story,
            fanout=config.fanout,
            beam=config.provider_beam,
        )
        for candidate in candidates:
            link = None
            if candidate.chains and goal.chains:
                link = detect_link(list(candidate.chains), list(goal.chains), providers.similarity, config.link_threshold)
            scored.append((beam_index, candidate, combined_score(candidate, goal.graph, goal.expanded, config.alpha, link)))
    return scored


def step(
    beams: Sequence[BeamState],
    goal: _GoalState,
    config: PipelineConfig,
    providers: ProviderSet,
    store: ConceptStore,
    step_index: int,
    tense: str,
) -> list[BeamState]:
    """One beam-search step: expand, score, select top-k, verbalize, update.

    Selections that fail to produce a sentence are dropped and backfilled
    from the next-best scored candidates while any remain.
    """
    if not beams:
        raise ValidationError("step needs at least one beam")
    scored = _score_all(beams, goal, config, providers, store)
    if not scored:
        raise _NoCandidates("no candidate expansions for any beam")
    ranked = select_topk(scored, k=len(scored))

    next_beams: list[BeamState] = []
    for beam_index, candidate, breakdown in ranked:
        if len(next_beams) >= config.top_k:
            break
        base_beam = beams[beam_index]
        if breakdown.link is not None:
            new_beam = base_beam
            for sentence, warning in verbalize_link(breakdown.link, base_beam, config, providers, tense):
                new_beam, nodes_added, edges_added = _append_sentence(
                    new_beam, sentence, new_beam.graph.merge(candidate.graph), providers
                )
                new_beam = replace(
                    new_beam,
                    trace=new_beam.trace + (TraceStep(
                        step=step_index, beam=len(next_beams), chosen_concept=candidate.seed.id,
                        score=breakdown, sentence=sentence, nodes_added=nodes_added,
                        edges_added=edges_added, warning=warning,
                    ),),
                )
            next_beams.append(replace(new_beam, stopped=StopReason.LINK_CONSUMED))
            continue
        try:
            sentence = _generate_sentence(candidate.seed.surface, base_beam, tense, config, providers)
        except (GenerationError, ValidationError):
            continue  # drop this selection; later ranked rows backfill
        new_beam, nodes_added, edges_added = _append_sentence(base_beam, sentence, candidate.graph, providers)
        new_beam = replace(
            new_beam,
            trace=new_beam.trace + (TraceStep(
                step=step_index, beam=len(next_beams), chosen_concept=candidate.seed.id,
                score=breakdown, sentence=sentence, nodes_added=nodes_added, edges_added=edges_added,
            ),),
        )
        if entity_overlap_r1(new_beam.graph, goal.graph) == 1.0:
            new_beam = replace(new_beam, stopped=StopReason.GOAL_REACHED)
        elif breakdown.combined >= config.stop_threshold:
            new_beam = replace(new_beam, stopped=StopReason.SCORE_THRESHOLD)
        next_beams.append(new_beam)
    if not next_beams:
        raise _NoCandidates("every selected candidate failed to produce a sentence")
    return next_beams


def run(
    prompt: str,
    goal: str,
    config: PipelineConfig,
    providers: ProviderSet,
    store: ConceptStore,
) -> StoryResult:
    """Generate one story segment from a prompt toward a goal world state."""
    if not prompt.strip() or not goal.strip():
        raise ValidationError("prompt and goal must be non-empty")

    prompt_sentences = split_sentences(prompt)
    tense = detect_tense(prompt)
    try:
        story_graph = _acquire(prompt_sentences, providers, label="story")
        goal_graph = _acquire([goal], providers, label="goal")
    except StormError as exc:
        raise PipelineError("acquisition", str(exc)) from exc
    story_graph = _fallback_node(story_graph, prompt)
    goal_graph = _fallback_node(goal_graph, goal)

    try:
        expanded_goal, goal_chains = expand_goal(
            goal_graph, goal, store, providers.events, config.depth_goal,
            beam=config.provider_beam, fanout=config.fanout,
        )
    except StormError as exc:
        raise PipelineError("goal-expansion", str(exc)) from exc
    goal_state = _GoalState(goal_graph, expanded_goal.with_label("goal-expanded"), tuple(goal_chains))

    first = BeamState(story=tuple(prompt_sentences), graph=story_graph)
    subjects, last = _merge_subjects(first, story_graph)
    first = replace(first, subjects=subjects, last_subject=last)

    if entity_overlap_r1(story_graph, goal_graph) == 1.0:
        final = _maybe_append_goal(first, goal, config, providers)
        return StoryResult((final,), StopReason.GOAL_REACHED, final.trace)

    beams: list[BeamState] = [first]
    for step_index in range(1, config.max_length + 1):
        try:
            beams = step(beams, goal_state, config, providers, store, step_index, tense)
        except _NoCandidates:
            ranked = _ranked(beams)
            return StoryResult(ranked, StopReason.EXHAUSTED, _flat_trace(ranked))
        except StormError as exc:
            raise PipelineError(f"step-{step_index}", str(exc)) from exc
        stopped = [b for b in beams if b.stopped is not None]
        if stopped:
            ranked = _ranked(beams)
            winner = next(b for b in ranked if b.stopped is not None)
            if winner.stopped in (StopReason.GOAL_REACHED, StopReason.LINK_CONSUMED):
                ranked = tuple(
                    _maybe_append_goal(b, goal, config, providers) if b is winner else b for b in ranked
                )
            return StoryResult(ranked, winner.stopped, _flat_trace(ranked))
    ranked = _ranked(beams)
    return StoryResult(ranked, StopReason.MAX_LENGTH, _flat_trace(ranked))


def run_chain(
    prompt: str,
    goals: Sequence[str],
    config: PipelineConfig,
    providers: ProviderSet,
    store: ConceptStore,
) -> tuple[list[str], list[StoryResult]]:
    """Multi-goal protocol: generate toward each goal in turn, appending each
    reached goal to the story before continuing toward the next one."""
    if not goals:
        raise ValidationError("run_chain needs at least one goal")
    story: list[str] = split_sentences(prompt)
    results: list[StoryResult] = []
    for goal in goals:
        result = run(" ".join(story), goal, config, providers, store)
        results.append(result)
        story = list(result.best_story)
        goal_sentence = goal if goal.endswith((".", "!", "?")) else goal + "."
        if not story or story[-1] != goal_sentence:  # run() may have appended it
            story.append(goal_sentence)
    return story, results


def _fallback_node(graph: KnowledgeGraph, text: str) -> KnowledgeGraph:
    """Guarantee at least one story node even when labeling finds nothing."""
    if len(graph) > 0:
        return graph
    node_id = normalize_concept(event_phrase(text))
    if not node_id:
        node_id = normalize_concept(text) or "story"
    return graph.add_node(Node(node_id, text.strip().rstrip("."), NodeKind.STORY_EVENT))


def _maybe_append_goal(beam: BeamState, goal: str, config: PipelineConfig, providers: ProviderSet) -> BeamState:
    if not config.append_goal:
        return beam
    sentence = goal if goal.endswith((".", "!", "?")) else goal + "."
    new_beam, _nodes, _edges = _append_sentence(beam, sentence, beam.graph, providers)
    return new_beam


def _ranked(beams: Sequence[BeamState]) -> tuple[BeamState, ...]:
    return tuple(sorted(beams, key=lambda b: (-b.final_score, b.story)))


def _flat_trace(beams: Sequence[BeamState]) -> tuple[TraceStep, ...]:
    # Surviving beams can share ancestors; emit each lineage record once.
    records = list(dict.fromkeys(step_record for beam in beams for step_record in beam.trace))
    records.sort(key=lambda r: (r.step, r.beam, r.sentence))
    return tuple(records)
