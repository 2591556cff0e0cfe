"""Shared fixtures: committed fixture bundles and small graph builders."""

from pathlib import Path

import pytest

from storm.expansion import ConceptStore
from storm.kg import KnowledgeGraph, Node, NodeKind, Triple
from storm.providers import FixtureTables, ProviderSet, fixture_providers, load_fixtures

DATA = Path(__file__).parent / "data"


def story_node(node_id: str, surface: str | None = None, kind: NodeKind = NodeKind.STORY_ENTITY) -> Node:
    return Node(node_id, surface or node_id, kind)


def inferred_node(node_id: str, depth: int = 1, relation: str = "HasA",
                  kind: NodeKind = NodeKind.INFERRED_ENTITY) -> Node:
    return Node(node_id, node_id, kind, depth, relation)


def graph_of(*node_ids: str, label: str = "", kind: NodeKind = NodeKind.STORY_ENTITY) -> KnowledgeGraph:
    return KnowledgeGraph([story_node(n, kind=kind) for n in node_ids], label=label)


@pytest.fixture(scope="session")
def linkworld_tables() -> FixtureTables:
    return load_fixtures(DATA / "linkworld_fixtures.json")


@pytest.fixture(scope="session")
def linkworld_providers(linkworld_tables) -> ProviderSet:
    return fixture_providers(linkworld_tables)


@pytest.fixture(scope="session")
def linkworld_store() -> ConceptStore:
    return ConceptStore.from_tsv(DATA / "linkworld_store.tsv")


@pytest.fixture(scope="session")
def bfs_tables() -> FixtureTables:
    return load_fixtures(DATA / "bfs_fixtures.json")


@pytest.fixture(scope="session")
def bfs_store() -> ConceptStore:
    return ConceptStore.from_tsv(DATA / "bfs_store.tsv")


@pytest.fixture(scope="session")
def beam_providers() -> ProviderSet:
    return fixture_providers(load_fixtures(DATA / "beam_fixtures.json"))


@pytest.fixture(scope="session")
def beam_store() -> ConceptStore:
    return ConceptStore.from_tsv(DATA / "beam_store.tsv")


def make_triple(subject: str, relation: str, obj: str) -> tuple[Triple, Node, Node]:
    return Triple(subject, relation, obj), story_node(subject), story_node(obj)
