#!/usr/bin/env python3
"""Walk through the reader-model graph basics.

A reader model is a knowledge graph of what a reader believes about the
story world: nodes are entities and events, edges are labeled relations.
Run from the repository root: python3 demos/01_reader_model.py
"""

from storm.kg import KnowledgeGraph, Node, NodeKind, Triple

# A tiny story world: "Jenny lived in Florida."
jenny = Node("jenny", "Jenny", NodeKind.STORY_ENTITY)
florida = Node("florida", "Florida", NodeKind.STORY_ENTITY)
lived = Triple("jenny", "EXIST_LIVE", "florida")

graph = KnowledgeGraph.empty("story").add_triple(lived, jenny, florida)
print("nodes:", sorted(graph.nodes))
print("edges:", [e.key() for e in graph.edges])

# Graphs are values: adding returns a new graph, the original is untouched.
beach = Node("beach", "beach", NodeKind.INFERRED_ENTITY, depth=1, source_relation="HasA")
expanded = graph.add_node(beach).add_triple(Triple("florida", "HasA", "beach"),
                                            florida, beach)
print("expanded nodes:", sorted(expanded.nodes))
print("original unchanged:", sorted(graph.nodes))

# Merging unions node and edge sets; story-extracted nodes win collisions.
other = KnowledgeGraph([Node("beach", "beach", NodeKind.STORY_ENTITY)])
merged = expanded.merge(other)
print("after merge, beach is", merged.nodes["beach"].kind.value)

# The canonical JSON form round-trips exactly (nodes sorted by id).
payload = merged.to_json()
assert KnowledgeGraph.from_json(payload) == merged
print("serialized:", payload[:88], "...")
