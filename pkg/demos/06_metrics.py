#!/usr/bin/env python3
"""Automatic evaluation metrics on a toy corpus.

Run from the repository root: python3 demos/06_metrics.py
"""

from storm.metrics import bleu_n, evaluate_corpus, rouge_l, self_bleu

hypothesis = "the cat sat on the mat"
reference = "the cat lay on a mat"
print("BLEU-2:", round(bleu_n(hypothesis, [reference], 2), 4))
print("BLEU-3:", round(bleu_n(hypothesis, [reference], 3), 6))
print("ROUGE-L:", round(rouge_l(hypothesis, reference), 4))

story = ["Jenny went to the beach.", "Jenny swam in the sea.", "The beach was warm."]
print("Self-BLEU-2 (lower = more diverse):", round(self_bleu(story, 2), 4))

report = evaluate_corpus(
    stories=[story],
    golds=["Jenny went to the beach. She swam all day. The water was warm."],
)
print("\ncorpus report:")
print(report.to_csv())
