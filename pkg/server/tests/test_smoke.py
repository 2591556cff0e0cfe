"""End-to-end smoke: the planning pipeline drives the live service.

The checkpoints are tiny and randomly initialized, so the story text is
meaningless; what this verifies is the full path through real model
inference: acquisition over the wire, two-track expansion, scoring,
template infilling, sequence scoring and beam updates, with the length cap
and trace contract intact.
"""

from storm.expansion import ConceptStore
from storm.pipeline import PipelineConfig, StopReason, run
from storm.providers import ProviderEndpointConfig, http_providers


def test_pipeline_against_live_checkpoints(live_endpoint, tmp_path):
    store_path = tmp_path / "store.tsv"
    store_path.write_text(
        "HasA\tflorida\tbeach\t2.0\n"
        "UsedFor\tbeach\tswim\t1.5\n"
        "AtLocation\tswim\tsea\t1.0\n"
    )
    providers = http_providers(ProviderEndpointConfig(base_url=live_endpoint, timeout_ms=30_000))
    config = PipelineConfig(
        top_k=1, max_length=2, template_cap=12, fanout=2, provider_beam=2,
        depth_story=2, depth_goal=2,
    )
    result = run("Jenny lived in Florida.", "enjoy sunshine", config, providers,
                 ConceptStore.from_tsv(store_path))

    assert result.stop_reason in set(StopReason)
    best = result.beams[0]
    assert best.story[0] == "Jenny lived in Florida."
    assert best.generated <= config.max_length
    assert len(result.trace) >= best.generated  # complete trace for the winner
    for record in result.trace:
        payload = record.to_dict()
        for key in ("step", "beam", "chosen_concept", "sentence", "r1", "r2", "R", "graph_delta"):
            assert key in payload
        assert 0.0 <= payload["R"] <= 1.0

    # Same inputs, same service, same story: greedy decoding end to end.
    rerun = run("Jenny lived in Florida.", "enjoy sunshine", config, providers,
                ConceptStore.from_tsv(store_path))
    assert rerun.best_story == result.best_story
    assert rerun.trace_jsonl() == result.trace_jsonl()
