#!/usr/bin/env python3
"""Expand a story graph with commonsense inference.

Two tracks: physical entities walk a weighted concept-triple store, social
events come from an inference provider keyed on relations like xWant.
Run from the repository root: python3 demos/02_expansion.py
"""

from storm.acquisition import build_graph
from storm.expansion import ConceptStore, candidate_expansions, expand_entity, expand_goal
from storm.kg import Node, NodeKind
from storm.providers import TableSrlProvider, fixture_providers, load_fixtures

tables = load_fixtures("tests/data/linkworld_fixtures.json")
providers = fixture_providers(tables)
store = ConceptStore.from_tsv("tests/data/linkworld_store.tsv")

# Entity track: breadth-first closure of "florida" two hops deep.
florida = Node("florida", "Florida", NodeKind.STORY_ENTITY)
closure = expand_entity(florida, store, depth=2, fanout=5)
for node in sorted(closure, key=lambda n: (n.depth, n.id)):
    print(f"  depth {node.depth}  {node.id:12s}  via {node.source_relation}")

# Candidate expansions: one per inferred concept, each carrying its own
# inference set and the merged graph the scorer will compare to the goal.
graph = build_graph(["Jenny lived in Florida."], TableSrlProvider(tables))
candidates = candidate_expansions(
    graph, ["Jenny lived in Florida."], store, providers.events,
    depth=2, fanout=5, beam=5,
)
print("\ncandidates:")
for cand in candidates:
    chain_note = f", chains: {[str(c) for c in cand.chains]}" if cand.chains else ""
    print(f"  {cand.seed.id:12s} inference set {sorted(n.id for n in cand.inference_set)}{chain_note}")

# Goal expansion mirrors the story side and returns goal-rooted chains.
goal_graph = build_graph(["enjoy sunshine"], TableSrlProvider(tables), label="goal")
expanded_goal, goal_chains = expand_goal(goal_graph, "enjoy sunshine", store, providers.events, depth=2)
print("\nexpanded goal nodes:", sorted(expanded_goal.nodes))
print("goal chains:", [str(c) for c in goal_chains])
