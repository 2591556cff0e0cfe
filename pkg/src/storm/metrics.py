"""Automatic evaluation: n-gram overlap, within-story diversity, LCS
coverage, and an embedding-based sentence-matching similarity.

Tokenization lower-cases and splits punctuation into separate tokens.
Zero n-gram matches are floored at a tiny epsilon so short sentences do
not zero out whole geometric means; the floor is part of the contract.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ValidationError
from .providers import EmbeddingSimilarityProvider
from .text import split_sentences, tokenize

SMOOTHING_FLOOR = 1e-9


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_n(hypothesis: str, references: Sequence[str], n: int) -> float:
    """Modified n-gram precision with brevity penalty, uniform 1..n weights."""
    if n not in (2, 3):
        raise ValidationError(f"n must be 2 or 3, got {n}")
    if not hypothesis.strip() or not references or not any(r.strip() for r in references):
        raise ValidationError("hypothesis and references must be non-empty")
    hyp = tokenize(hypothesis)
    refs = [tokenize(r) for r in references if r.strip()]

    log_sum = 0.0
    for order in range(1, n + 1):
        hyp_counts = _ngrams(hyp, order)
        max_ref_counts: Counter = Counter()
        for ref in refs:
            for gram, count in _ngrams(ref, order).items():
                max_ref_counts[gram] = max(max_ref_counts[gram], count)
        total = max(1, sum(hyp_counts.values()))
        clipped = sum(min(count, max_ref_counts[gram]) for gram, count in hyp_counts.items())
        precision = clipped / total if clipped > 0 else SMOOTHING_FLOOR
        log_sum += math.log(precision) / n

    hyp_len = len(hyp)
    ref_len = min((len(r) for r in refs), key=lambda L: (abs(L - hyp_len), L))
    brevity = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / max(1, hyp_len))
    return brevity * math.exp(log_sum)


def self_bleu(story: Sequence[str], n: int) -> float:
    """Mean of each sentence's overlap with the rest of the story.

    Lower means more diverse sentences.
    """
    sentences = [s for s in story if s.strip()]
    if len(sentences) < 2:
        raise ValidationError("self-BLEU needs at least 2 sentences")
    scores = []
    for i, sentence in enumerate(sentences):
        others = sentences[:i] + sentences[i + 1 :]
        scores.append(bleu_n(sentence, others, n))
    return sum(scores) / len(scores)


def rouge_l(hypothesis: str, reference: str) -> float:
    """Longest-common-subsequence F-measure over tokens (beta = 1)."""
    if not hypothesis.strip() or not reference.strip():
        raise ValidationError("hypothesis and reference must be non-empty")
    hyp = tokenize(hypothesis)
    ref = tokenize(reference)
    lcs = _lcs_length(hyp, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(hyp)
    recall = lcs / len(ref)
    return 2 * precision * recall / (precision + recall)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            current.append(prev[j - 1] + 1 if x == y else max(prev[j], current[j - 1]))
        prev = current
    return prev[-1]


def sentence_mover(hypothesis: str, reference: str, embed: EmbeddingSimilarityProvider) -> float:
    """Greedy one-to-one matching of sentence similarities, normalized to [0, 1].

    Repeatedly takes the most similar unmatched pair; the sum of matched
    similarities is divided by the larger sentence count, so missing or
    extra sentences cost score.
    """
    hyp_sentences = split_sentences(hypothesis)
    ref_sentences = split_sentences(reference)
    if not hyp_sentences or not ref_sentences:
        raise ValidationError("hypothesis and reference must contain sentences")
    matrix = embed.similarity(hyp_sentences, ref_sentences)
    open_rows = set(range(len(hyp_sentences)))
    open_cols = set(range(len(ref_sentences)))
    total = 0.0
    while open_rows and open_cols:
        best = max(
            ((matrix[i][j], -i, -j) for i in open_rows for j in open_cols),
        )
        value, i, j = best[0], -best[1], -best[2]
        total += value
        open_rows.remove(i)
        open_cols.remove(j)
    return total / max(len(hyp_sentences), len(ref_sentences))


@dataclass
class MetricReport:
    """Per-story metric values plus corpus means."""

    per_story: list[dict] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)

    @property
    def corpus_means(self) -> dict[str, float]:
        keys = sorted({k for row in self.per_story for k in row if isinstance(row[k], (int, float))})
        means = {}
        for key in keys:
            values = [row[key] for row in self.per_story if key in row]
            if values:
                means[key] = sum(values) / len(values)
        return means

    def to_dict(self) -> dict:
        return {
            "per_story": self.per_story,
            "corpus_means": self.corpus_means,
            "errors": self.errors,
        }

    def to_csv(self) -> str:
        keys = sorted({k for row in self.per_story for k in row})
        lines = [",".join(["story"] + keys)]
        for index, row in enumerate(self.per_story):
            lines.append(",".join([str(index)] + [_csv_cell(row.get(k)) for k in keys]))
        means = self.corpus_means
        lines.append(",".join(["mean"] + [_csv_cell(means.get(k)) for k in keys]))
        return "\n".join(lines) + "\n"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def evaluate_corpus(
    stories: Sequence[Sequence[str]],
    golds: Sequence[str] | None = None,
    embed: EmbeddingSimilarityProvider | None = None,
) -> MetricReport:
    """Full report for a story corpus; gold references unlock the
    reference-based metrics, the embedding provider unlocks the mover score.

    A story too short for self-BLEU is recorded as a per-story error and
    the rest of the corpus still evaluates.
    """
    report = MetricReport()
    for index, sentences in enumerate(stories):
        row: dict = {"tokens": sum(len(tokenize(s)) for s in sentences)}
        try:
            row["self_bleu_2"] = self_bleu(sentences, 2)
            row["self_bleu_3"] = self_bleu(sentences, 3)
        except ValidationError as exc:
            report.errors.append({"story": index, "error": str(exc)})
        if golds is not None:
            hypothesis = " ".join(sentences)
            gold = golds[index]
            row["bleu_2"] = bleu_n(hypothesis, [gold], 2)
            row["bleu_3"] = bleu_n(hypothesis, [gold], 3)
            row["rouge_l"] = rouge_l(hypothesis, gold)
            if embed is not None:
                row["sentence_mover"] = sentence_mover(hypothesis, gold, embed)
        report.per_story.append(row)
    return report
