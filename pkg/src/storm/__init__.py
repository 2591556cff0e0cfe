"""Goal-directed story generation guided by knowledge-graph reader models.

The package keeps an explicit graph of what a reader believes about the
story world, expands it with commonsense inference, scores candidate
expansions against a goal world state, and drives template-based sentence
generation with beam search toward that goal.
"""

from .kg import KnowledgeGraph, Node, NodeKind, Triple
from .pipeline import PipelineConfig, StopReason, StoryResult, run, run_chain

__all__ = [
    "KnowledgeGraph",
    "Node",
    "NodeKind",
    "Triple",
    "PipelineConfig",
    "StopReason",
    "StoryResult",
    "run",
    "run_chain",
]
