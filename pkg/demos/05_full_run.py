#!/usr/bin/env python3
"""The whole loop: prompt to goal with beam search, on committed fixtures.

On this fixture world the planner discovers an inference link from
"live in Florida" through "swim" and "go to beach" to the goal
"enjoy sunshine", verbalizes the hop events, and stops early.
Run from the repository root: python3 demos/05_full_run.py
"""

import json

from storm.expansion import ConceptStore
from storm.pipeline import PipelineConfig, run
from storm.providers import fixture_providers, load_fixtures

providers = fixture_providers(load_fixtures("tests/data/linkworld_fixtures.json"))
store = ConceptStore.from_tsv("tests/data/linkworld_store.tsv")
config = PipelineConfig(top_k=1, template_cap=4096)

result = run("Jenny lived in Florida.", "enjoy sunshine", config, providers, store)

print("stop reason:", result.stop_reason.value)
print("story:")
for sentence in result.best_story:
    print("   ", sentence)

print("\ntrace:")
for record in result.trace:
    print(json.dumps(record.to_dict(), sort_keys=True))
