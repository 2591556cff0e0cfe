"""Text-to-graph conversion: SRL records, coreference, graph building."""

import json

import pytest

from storm.acquisition import (
    CorefMap,
    FileSrlProvider,
    SrlRecord,
    build_graph,
    rule_coref,
    srl_to_triples,
)
from storm.errors import ProviderError, ValidationError
from storm.kg import NodeKind
from storm.providers import TableSrlProvider, load_fixtures

from conftest import DATA


class TestSrlToTriples:
    def test_theme_attribute_pair(self):
        record = SrlRecord(frame="EXIST_LIVE", args={"Theme": "Jenny", "Attribute": "Florida"})
        edges, lone = srl_to_triples(record, CorefMap())
        assert lone == []
        [(triple, subj, obj)] = edges
        assert (triple.subject, triple.relation, triple.object) == ("jenny", "EXIST_LIVE", "florida")
        assert subj.kind is NodeKind.STORY_ENTITY and subj.depth == 0
        assert obj.kind is NodeKind.STORY_ENTITY and obj.depth == 0

    def test_single_argument_yields_lone_node(self):
        record = SrlRecord(frame="EXIST_LIVE", args={"Theme": "Jenny"})
        edges, lone = srl_to_triples(record, CorefMap())
        assert edges == []
        assert [n.id for n in lone] == ["jenny"]

    def test_coref_canonicalizes_subject(self):
        coref = rule_coref(["Jenny ate.", "She slept in Florida."])
        record = SrlRecord(frame="SLEEP", args={"Theme": "She", "Location": "Florida"})
        edges, _ = srl_to_triples(record, coref)
        [(triple, subj, _obj)] = edges
        assert triple.subject == "jenny"
        assert subj.surface == "She"

    def test_multi_role_fanout_is_pairwise(self):
        record = SrlRecord(frame="GIVE", args={"Agent": "Bob", "Theme": "gift", "Recipient": "Jenny"})
        edges, _ = srl_to_triples(record, CorefMap())
        assert [(t.subject, t.object) for t, _s, _o in edges] == [("bob", "jenny"), ("bob", "gift")]

    def test_empty_frame_rejected(self):
        with pytest.raises(ValidationError):
            SrlRecord(frame="", args={"Theme": "x"})


class TestRuleCoref:
    def test_single_antecedent(self):
        coref = rule_coref(["Jenny ate.", "She slept."])
        assert coref.resolve("She") == "jenny"

    def test_no_antecedent_gets_fresh_unknown(self):
        coref = rule_coref(["It rained."])
        assert coref.resolve("It") == "unknown_0"

    def test_gendered_resolution(self):
        # Name/gender rows used here: jenny -> f, bob -> m (see NAME_GENDERS).
        coref = rule_coref(["Jenny met Bob.", "He waved.", "She left."])
        assert coref.resolve("He") == "bob"
        assert coref.resolve("She") == "jenny"

    def test_names_are_fixed_points(self):
        coref = rule_coref(["Jenny met Bob."])
        assert coref.resolve("Jenny") == "jenny"
        assert coref.resolve("jenny") == "jenny"

    def test_never_merges_two_names(self):
        coref = rule_coref(["Jenny met Anna."])
        assert coref.resolve("Jenny") != coref.resolve("Anna")

    def test_fixed_point_invariant_enforced(self):
        with pytest.raises(ValidationError):
            CorefMap({"she": "jenny", "jenny": "her"})


class TestBuildGraph:
    def test_linkworld_prompt(self, linkworld_tables):
        srl = TableSrlProvider(linkworld_tables)
        graph = build_graph(["Jenny lived in Florida."], srl)
        assert len(graph) == 2
        assert len(graph.edges) == 1
        assert all(n.kind.is_story and n.depth == 0 for n in graph)

    def test_empty_sentence_list_rejected(self, linkworld_tables):
        with pytest.raises(ValidationError):
            build_graph([], TableSrlProvider(linkworld_tables))

    def test_shared_entity_appears_once(self, tmp_path):
        records = [
            {"sentence_index": 0, "frame": "EXIST_LIVE", "args": {"Theme": "Jenny", "Attribute": "Florida"}},
            {"sentence_index": 1, "frame": "EAT", "args": {"Agent": "Jenny", "Theme": "apple"}},
        ]
        path = tmp_path / "srl.json"
        path.write_text(json.dumps(records))
        srl = FileSrlProvider.from_file(path)
        graph = build_graph(["Jenny lived in Florida.", "Jenny ate an apple."], srl)
        assert sorted(graph.nodes) == ["apple", "florida", "jenny"]

    def test_record_order_within_sentence_irrelevant(self):
        records = [
            SrlRecord(frame="A", args={"Agent": "x", "Theme": "y"}, sentence_index=0),
            SrlRecord(frame="B", args={"Agent": "y", "Theme": "z"}, sentence_index=0),
        ]
        forward = build_graph(["s."], FileSrlProvider(records))
        backward = build_graph(["s."], FileSrlProvider(list(reversed(records))))
        assert forward.to_json() == backward.to_json()

    def test_provider_failure_carries_sentence_index(self):
        class Boom:
            def records(self, sentence, index):
                raise RuntimeError("model offline")

        with pytest.raises(ProviderError, match="sentence 0"):
            build_graph(["x."], Boom())
