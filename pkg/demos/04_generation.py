#!/usr/bin/env python3
"""From a chosen concept to a story sentence.

The concept phrase splits into verb/noun/adjective literals, a family of
masked templates is enumerated around them, an infilling provider fills the
masks, and the fill with the best summed token log-probability wins.
Run from the repository root: python3 demos/04_generation.py
"""

from storm.generation import (
    cap_templates,
    decompose_event,
    fill_templates,
    make_templates,
    score_candidates,
    select_continuation,
)
from storm.providers import fixture_providers, load_fixtures

providers = fixture_providers(load_fixtures("tests/data/linkworld_fixtures.json"))

parts = decompose_event("go to beach", context_tense="past")
print("decomposed:", parts.verbs, parts.nouns, parts.adjectives)

templates = make_templates(parts, prior_subjects=["Jenny"])
print("template family size:", len(templates))
for template in templates[:3]:
    print("  ", template.render())

capped = cap_templates(templates, 4096)
context = "Jenny lived in Florida."
candidates = fill_templates(capped, context, providers.infill)
print("filled candidates:", len(candidates))

scored = score_candidates(candidates, context, providers.scorer)
best = select_continuation(scored)
print(f"selected: {best.text!r} (log-prob {best.log_prob:.2f})")
