"""Acceptance suite: one test per exit criterion, at its stated tolerance.

Each test prints a single `[criterion] PASS/FAIL <name>` line (visible with
pytest -s; captured output is shown automatically on failure). The whole
suite runs on deterministic fixture providers only.
"""

import json
import math
import random
import time
from contextlib import contextmanager

import pytest

from storm.cli import main
from storm.errors import ValidationError
from storm.expansion import CandidateExpansion, InferenceChain, expand_entity, expand_event
from storm.generation import (
    ContinuationCandidate,
    EventParts,
    Literal,
    Mask,
    SubjectSlot,
    Template,
    decompose_event,
    make_templates,
    select_continuation,
    template_count,
)
from storm.expansion import candidate_expansions
from storm.kg import KnowledgeGraph, Node, NodeKind
from storm.pipeline import PipelineConfig, StopReason, run
from storm.pipeline import _GoalState, step  # step-level beam checks
from storm.acquisition import build_graph
from storm.providers import TableSrlProvider
from storm.expansion import expand_goal
from storm.metrics import SMOOTHING_FLOOR, bleu_n, rouge_l, self_bleu
from storm.scoring import Link, combined_score, entity_overlap_r1, inference_overlap_r2

from conftest import DATA
from oracles import (
    entity_bfs_oracle,
    event_bfs_oracle,
    enumerated_template_count,
    load_event_rows,
    load_store_rows,
    r1_oracle,
    r2_oracle,
)

LINKWORLD_CONFIG = PipelineConfig(top_k=1, template_cap=4096)


@contextmanager
def criterion(name: str):
    try:
        yield
    except Exception:
        print(f"[criterion] FAIL {name}")
        raise
    print(f"[criterion] PASS {name}")


# ---------------------------------------------------------------------------
# 1. Scoring oracle equivalence


def random_scoring_case(rng: random.Random):
    ids = [f"c{i}" for i in range(16)]

    def node(cid: str, force_story: bool = False) -> Node:
        if force_story or rng.random() < 0.5:
            kind = rng.choice((NodeKind.STORY_ENTITY, NodeKind.STORY_EVENT))
            return Node(cid, cid, kind)
        kind = rng.choice((NodeKind.INFERRED_ENTITY, NodeKind.INFERRED_EVENT))
        relation = "HasA" if kind is NodeKind.INFERRED_ENTITY else "xWant"
        return Node(cid, cid, kind, 1 + rng.randrange(2), relation)

    def graph(min_story: int = 0) -> KnowledgeGraph:
        chosen = rng.sample(ids, rng.randrange(max(1, min_story), 13))
        nodes = [node(cid, force_story=i < min_story) for i, cid in enumerate(chosen)]
        return KnowledgeGraph(nodes)

    goal = graph(min_story=1)
    candidate_graph = graph()
    inference = frozenset(
        Node(cid, cid, NodeKind.INFERRED_ENTITY, 1, "HasA")
        for cid in rng.sample(ids, rng.randrange(0, 8))
    )
    seed = Node("zseed", "zseed", NodeKind.INFERRED_ENTITY, 1, "HasA")
    candidate = CandidateExpansion(
        seed, inference | {seed},
        KnowledgeGraph(list(candidate_graph.nodes.values()) + [seed] + list(inference)),
    )
    expanded_goal = goal.merge(KnowledgeGraph(
        [Node(cid, cid, NodeKind.INFERRED_EVENT, 1, "xWant") for cid in rng.sample(ids, rng.randrange(0, 6))]
    ))
    return candidate, goal, expanded_goal


def test_criterion_1_scoring_oracle_equivalence():
    with criterion("scoring matches brute-force oracle on 200 random graph pairs"):
        rng = random.Random(2025)
        started = time.perf_counter()
        for _ in range(200):
            candidate, goal, expanded_goal = random_scoring_case(rng)
            alpha = rng.choice((0.0, 0.25, 0.5, 0.9, 1.0, rng.random()))

            r1 = entity_overlap_r1(candidate.graph, goal)
            r1_expected = r1_oracle(
                [(n.id, n.kind.is_story) for n in candidate.graph],
                [(n.id, n.kind.is_story) for n in goal],
            )
            assert abs(r1 - r1_expected) <= 1e-12

            r2 = inference_overlap_r2(candidate.inference_set, expanded_goal)
            r2_expected = r2_oracle(
                [n.id for n in candidate.inference_set], list(expanded_goal.nodes)
            )
            assert abs(r2 - r2_expected) <= 1e-12

            breakdown = combined_score(candidate, goal, expanded_goal, alpha)
            assert abs(breakdown.combined - (alpha * r1_expected + (1 - alpha) * r2_expected)) <= 1e-12
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0, f"scoring oracle sweep took {elapsed:.2f}s"


# ---------------------------------------------------------------------------
# 2. Combination affinity and link override


def test_criterion_2_combination_affinity():
    with criterion("combined score is affine in alpha; a link forces it to 1"):
        goal = KnowledgeGraph([Node(i, i, NodeKind.STORY_ENTITY) for i in ("a1", "b1", "c1", "d1")])
        expanded = KnowledgeGraph([Node(f"g{i}", f"g{i}", NodeKind.STORY_ENTITY) for i in range(8)])
        seed = Node("g0", "g0", NodeKind.INFERRED_ENTITY, 1, "HasA")
        inference = frozenset({seed} | {
            Node(i, i, NodeKind.INFERRED_ENTITY, 2, "HasA") for i in ("g3", "g5")
        })
        base = KnowledgeGraph([Node(i, i, NodeKind.STORY_ENTITY) for i in ("b1", "d1", "x1")])
        candidate = CandidateExpansion(
            seed, inference, KnowledgeGraph(list(base.nodes.values()) + list(inference))
        )
        for alpha in (0.0, 0.25, 0.5, 0.9, 1.0):
            breakdown = combined_score(candidate, goal, expanded, alpha)
            assert abs(breakdown.r1 - 0.5) <= 1e-12
            assert abs(breakdown.r2 - 0.375) <= 1e-12
            assert abs(breakdown.combined - (alpha * 0.5 + (1 - alpha) * 0.375)) <= 1e-12
        link = Link(
            InferenceChain("s", (("hop", "xWant"),)),
            InferenceChain("g", (("hop", "xNeed"),)),
            "hop", "hop", 0.92,
        )
        assert combined_score(candidate, goal, expanded, 0.5, link).combined == 1.0


# ---------------------------------------------------------------------------
# 3. Expansion BFS equivalence on the 50-triple store


def test_criterion_3_expansion_bfs_equivalence(bfs_store, bfs_tables):
    with criterion("both expansion tracks match the independent BFS oracle"):
        from storm.providers import FixtureEventInference

        store_rows = load_store_rows(DATA / "bfs_store.tsv")
        event_rows = load_event_rows(DATA / "bfs_fixtures.json")
        assert sum(len(r) for r in store_rows.values()) == 50
        provider = FixtureEventInference(bfs_tables)
        rng = random.Random(777)
        for case in range(100):
            depth = rng.randrange(1, 4)
            fanout = rng.randrange(1, 6)
            beam = rng.randrange(1, 4)
            if case % 2 == 0:
                seed_id = f"e{rng.randrange(10):02d}"
                seed = Node(seed_id, seed_id, NodeKind.STORY_ENTITY)
                nodes = expand_entity(seed, bfs_store, depth, fanout)
                expected = entity_bfs_oracle(store_rows, seed_id, 0, depth, fanout)
                assert {(n.id, n.depth, n.source_relation) for n in nodes} == expected
            else:
                seed_id = f"v{rng.randrange(8):02d}"
                seed = Node(seed_id, seed_id, NodeKind.STORY_EVENT)
                nodes, chains = expand_event(seed, provider, bfs_store, depth, beam, fanout)
                expected_nodes, expected_chains = event_bfs_oracle(
                    event_rows, store_rows, seed_id, 0, depth, beam, fanout
                )
                assert {(n.id, n.depth, n.source_relation) for n in nodes} == expected_nodes
                assert {tuple(c.hops) for c in chains} == expected_chains
                assert all(len(c) <= depth for c in chains)
            assert all(n.depth <= depth for n in nodes)


# ---------------------------------------------------------------------------
# 4. End-to-end inference-link run


def test_criterion_4_link_end_to_end(linkworld_providers, linkworld_store):
    with criterion("link run joins the expected path, stops LinkConsumed, golden trace stable"):
        started = time.perf_counter()
        result = run("Jenny lived in Florida.", "enjoy sunshine", LINKWORLD_CONFIG, linkworld_providers, linkworld_store)
        elapsed = time.perf_counter() - started
        assert elapsed < 1.0, f"link run took {elapsed:.2f}s"
        assert result.stop_reason is StopReason.LINK_CONSUMED
        [link] = {record.score.link for record in result.trace}
        assert link.joined_path() == ["live in Florida", "swim", "go to beach", "enjoy sunshine"]
        golden = (DATA / "linkworld_golden_trace.jsonl").read_text()
        assert result.trace_jsonl() + "\n" == golden
        rerun = run("Jenny lived in Florida.", "enjoy sunshine", LINKWORLD_CONFIG, linkworld_providers, linkworld_store)
        assert rerun.trace_jsonl() + "\n" == golden


# ---------------------------------------------------------------------------
# 5. Template rule fidelity


def mask_runs(template: Template) -> list[int]:
    runs, current = [], 0
    for token in template.tokens:
        if isinstance(token, Mask):
            current += 1
        else:
            runs.append(current)
            current = 0
    runs.append(current)
    return runs


def test_criterion_5_template_rule_fidelity():
    with criterion("template counts equal the closed form for 50 random shapes"):
        rng = random.Random(31)
        for _ in range(50):
            verbs = tuple(rng.sample(["swam", "went", "ate", "ran"], rng.randrange(0, 3)))
            nouns = tuple(rng.sample(["gift", "beach"], rng.randrange(0, 2)))
            adjectives = tuple(rng.sample(["fat", "happy"], rng.randrange(0, 2)))
            if not (verbs or nouns or adjectives):
                verbs = ("swam",)
            parts = EventParts(verbs, nouns, adjectives, "past")
            n_subjects = rng.randrange(0, 3)
            templates = make_templates(parts, [f"Name{i}" for i in range(n_subjects)])
            expected = enumerated_template_count(
                len(set(verbs)), bool(adjectives), bool(nouns), n_subjects
            )
            assert len(templates) == expected
            assert template_count(parts, n_subjects) == expected
            for template in templates:
                runs = mask_runs(template)
                assert 0 <= runs[0] <= 5
                assert all(0 <= r <= 2 for r in runs[1:-1])
                assert 0 <= runs[-1] <= 8


# ---------------------------------------------------------------------------
# 6. Filtering argmax equivalence


def test_criterion_6_filtering_argmax():
    with criterion("continuation selection equals the linear-scan max oracle"):
        rng = random.Random(47)
        template = Template((SubjectSlot("X"), Literal("went")))
        for _ in range(100):
            pool = [
                ContinuationCandidate(f"sentence {i} words " + "pad " * rng.randrange(4), template,
                                      -rng.random() * 12)
                for i in range(rng.randrange(2, 60))
            ]
            oracle = pool[0]
            for cand in pool[1:]:
                key = (-cand.log_prob, len(cand.text.split()), cand.text)
                best = (-oracle.log_prob, len(oracle.text.split()), oracle.text)
                if key < best:
                    oracle = cand
            assert select_continuation(pool) == oracle
            shift = -rng.random() * 5
            shifted = [ContinuationCandidate(c.text, c.template, c.log_prob + shift) for c in pool]
            assert select_continuation(shifted).text == oracle.text


# ---------------------------------------------------------------------------
# 7. Beam invariants


def _realizable(candidates) -> int:
    count = 0
    for cand in candidates:
        try:
            decompose_event(cand.seed.surface, "past")
            count += 1
        except ValidationError:
            continue
    return count


def test_criterion_7_beam_invariants(beam_providers, beam_store, linkworld_providers, linkworld_store):
    with criterion("beam width, length caps and early stop hold over 100 runs"):
        srl = beam_providers.srl
        prompt_graph = build_graph(["Anna met Bob."], srl)
        goal_graph = build_graph(["find treasure"], srl)
        expanded_goal, goal_chains = expand_goal(
            goal_graph, "find treasure", beam_store, beam_providers.events, 2, beam=5, fanout=5
        )
        goal_state = _GoalState(goal_graph, expanded_goal, tuple(goal_chains))

        from storm.pipeline import BeamState

        # 86 step-level runs + 4 profile runs + 10 early-stop runs = 100.
        for case in range(86):
            k = 1 + case % 5
            n_steps = 2 + (case // 5) % 2
            config = PipelineConfig(top_k=k, max_length=n_steps)
            beams = [BeamState(story=("Anna met Bob.",), graph=prompt_graph,
                               subjects=("Anna",), last_subject="Anna")]
            for step_index in range(1, n_steps + 1):
                available = sum(
                    _realizable(candidate_expansions(
                        b.graph, list(b.story), beam_store, beam_providers.events,
                        depth=2, fanout=5, beam=5,
                    ))
                    for b in beams
                )
                beams = step(beams, goal_state, config, beam_providers, beam_store, step_index, "past")
                if step_index == 1:
                    assert len(beams) == min(k, available)
                else:
                    assert len(beams) == min(k, available)
                assert all(b.generated <= config.max_length for b in beams)

        # Profile caps hold on full runs.
        for profile, cap in (("roc", 4), ("wp", 5)):
            for k in (1, 2):
                config = PipelineConfig.for_profile(profile, top_k=k)
                result = run("Anna met Bob.", "find treasure", config, beam_providers, beam_store)
                assert all(beam.generated <= cap for beam in result.beams)

        # Early stop: an R >= threshold / r1 = 1 beam gains no further sentences.
        for extra in range(10):
            config = PipelineConfig(top_k=1, template_cap=4096, max_length=1 + extra % 4)
            result = run("Jenny lived in Florida.", "enjoy sunshine", config, linkworld_providers, linkworld_store)
            assert result.stop_reason is StopReason.LINK_CONSUMED
            assert len(result.best_story) == 3  # prompt + the two link sentences


# ---------------------------------------------------------------------------
# 8. Metrics goldens


def test_criterion_8_metrics_goldens():
    with criterion("metric values reproduce hand-computed goldens to 1e-9"):
        floor = SMOOTHING_FLOOR
        partial2 = math.exp((math.log(4 / 6) + math.log(1 / 5)) / 2)
        partial3 = math.exp((math.log(4 / 6) + math.log(1 / 5) + math.log(floor)) / 3)
        mixed_self2 = (1.0 + 1.0 + math.sqrt(0.5 * floor)) / 3
        corpus = [
            ("bleu2", ("the cat sat", ["the cat sat"]), 1.0),
            ("bleu3", ("the cat sat", ["the cat sat"]), 1.0),
            ("bleu2", ("the cat sat", ["the cat sat down"]), math.exp(1.0 - 4.0 / 3.0)),
            ("bleu2", ("the cat sat on the mat", ["the cat lay on a mat"]), partial2),
            ("bleu3", ("the cat sat on the mat", ["the cat lay on a mat"]), partial3),
            ("bleu2", ("aa bb cc", ["xx yy zz"]), floor),
            ("self2", ["a b", "a b", "a c"], mixed_self2),
            ("self2", ["same line", "same line", "same line"], 1.0),
            ("self3", ["aa bb cc", "dd ee ff", "gg hh ii"], floor),
            ("rouge", ("a b c d", "a c d e"), 0.75),
        ]
        assert len(corpus) == 10
        for kind, args, expected in corpus:
            if kind == "bleu2":
                value = bleu_n(args[0], args[1], 2)
            elif kind == "bleu3":
                value = bleu_n(args[0], args[1], 3)
            elif kind == "self2":
                value = self_bleu(args, 2)
            elif kind == "self3":
                value = self_bleu(args, 3)
            else:
                value = rouge_l(args[0], args[1])
            assert abs(value - expected) <= 1e-9, f"{kind} {args} -> {value} != {expected}"
        assert rouge_l("a b c d", "a b c d") == pytest.approx(1.0, abs=1e-9)
        assert rouge_l("a b", "x y") == 0.0


# ---------------------------------------------------------------------------
# 9. Alpha-sweep report format


def test_criterion_9_ablation_format(tmp_path):
    with criterion("alpha sweep emits mean +/- std per alpha in the fixed layout"):
        out = tmp_path / "ablation"
        code = main([
            "ablate", "--dataset", str(DATA / "ablate_pairs.json"),
            "--fixtures", str(DATA / "linkworld_fixtures.json"),
            "--store", str(DATA / "linkworld_store.tsv"),
            "--template-cap", "4096", "--out", str(out),
        ])
        assert code == 0
        lines = (out / "ablation.txt").read_text().strip().splitlines()
        assert lines[0] == "Model           Avg. len"
        assert [line.split()[0] for line in lines[1:]] == ["alpha=0.50", "alpha=0.90", "alpha=0.25"]
        for line in lines[1:]:
            _model, mean, sep, std = line.split()
            assert sep == "+/-"
            float(mean), float(std)
        rows = json.loads((out / "ablation.json").read_text())
        # Fixture-determined lengths: the three link pairs stop after two
        # generated sentences, the two dead-end pairs exhaust after one.
        for row in rows:
            assert row["lengths"] == [2, 2, 2, 1, 1]
            assert abs(row["mean"] - 1.6) <= 1e-9
            assert abs(row["std"] - math.sqrt(0.24)) <= 1e-9
