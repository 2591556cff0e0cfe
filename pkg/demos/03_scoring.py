#!/usr/bin/env python3
"""Score candidate expansions against a goal world state.

The combined score weighs story-node overlap against inference-set overlap;
an inference link between story-side and goal-side chains overrides
everything and pins the score to 1.
Run from the repository root: python3 demos/03_scoring.py
"""

from storm.acquisition import build_graph
from storm.expansion import ConceptStore, candidate_expansions, expand_goal
from storm.providers import TableSrlProvider, fixture_providers, load_fixtures
from storm.scoring import combined_score, detect_link

tables = load_fixtures("tests/data/linkworld_fixtures.json")
providers = fixture_providers(tables)
store = ConceptStore.from_tsv("tests/data/linkworld_store.tsv")

srl = TableSrlProvider(tables)
story = build_graph(["Jenny lived in Florida."], srl, label="story")
goal = build_graph(["enjoy sunshine"], srl, label="goal")
expanded_goal, goal_chains = expand_goal(goal, "enjoy sunshine", store, providers.events, depth=2)

for candidate in candidate_expansions(
    story, ["Jenny lived in Florida."], store, providers.events, depth=2, fanout=5, beam=5,
):
    link = None
    if candidate.chains:
        link = detect_link(list(candidate.chains), list(goal_chains), providers.similarity, threshold=0.8)
    breakdown = combined_score(candidate, goal, expanded_goal, alpha=0.5, link=link)
    print(f"candidate {candidate.seed.id!r}: r1={breakdown.r1:.3f} r2={breakdown.r2:.3f} "
          f"R={breakdown.combined:.3f}")
    if link is not None:
        print("  link found:", " -> ".join(link.joined_path()), f"(similarity {link.similarity:.2f})")
