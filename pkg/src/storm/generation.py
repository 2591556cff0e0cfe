"""Turn a chosen concept into a story sentence.

The concept phrase is split into verb/noun/adjective sets, a family of
masked sentence templates is enumerated around those literals, an infilling
provider completes each template, and the completion with the highest
summed token log-probability under a sequence scorer wins.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .errors import GenerationError, ValidationError
from .providers import MASK, InfillProvider, SequenceScorerProvider, map_ordered
from .text import (
    COMMON_VERBS,
    FUNCTION_WORDS,
    conjugate,
    is_adjective,
    lemmatize_token,
    words,
)

# Per-position mask-run bounds of the template grammar.
LEADING_MASKS = range(0, 6)     # before the subject
GAP_MASKS = range(0, 3)         # between subject/verb/adjective/noun literals
TRAILING_MASKS = range(0, 9)    # after the last literal


@dataclass(frozen=True)
class EventParts:
    """A concept phrase split into conjugated verbs, nouns and adjectives."""

    verbs: tuple[str, ...]
    nouns: tuple[str, ...]
    adjectives: tuple[str, ...]
    tense: str

    def __post_init__(self) -> None:
        if not (self.verbs or self.nouns or self.adjectives):
            raise ValidationError("event decomposition produced no content words")


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Mask:
    pass


@dataclass(frozen=True)
class SubjectSlot:
    name: str | None  # None renders as a mask


TemplateToken = Literal | Mask | SubjectSlot


@dataclass(frozen=True)
class Template:
    tokens: tuple[TemplateToken, ...]

    def __post_init__(self) -> None:
        subjects = [t for t in self.tokens if isinstance(t, SubjectSlot)]
        if len(subjects) != 1:
            raise ValidationError(f"template must contain exactly one subject slot, got {len(subjects)}")

    def render(self) -> str:
        out = []
        for token in self.tokens:
            if isinstance(token, Literal):
                out.append(token.text)
            elif isinstance(token, Mask):
                out.append(MASK)
            else:
                out.append(token.name if token.name is not None else MASK)
        return " ".join(out)

    @property
    def mask_count(self) -> int:
        count = sum(1 for t in self.tokens if isinstance(t, Mask))
        subject = next(t for t in self.tokens if isinstance(t, SubjectSlot))
        return count + (1 if subject.name is None else 0)


@dataclass(frozen=True)
class ContinuationCandidate:
    text: str
    template: Template
    log_prob: float = 0.0

    def __post_init__(self) -> None:
        if MASK in self.text:
            raise ValidationError("continuation text still contains the mask sentinel")
        if self.log_prob > 0.0:
            raise ValidationError(f"log-probability must be <= 0, got {self.log_prob}")


def decompose_event(event: str, context_tense: str) -> EventParts:
    """Split an event phrase into verb/noun/adjective sets.

    The first content word of each "and"-joined segment is treated as the
    verb when the verb lexicon knows it; other content words are sorted
    into adjectives or nouns by table and suffix. Verbs come back already
    conjugated to the given tense.
    """
    if not event.strip():
        raise ValidationError("cannot decompose an empty event")
    verbs: list[str] = []
    nouns: list[str] = []
    adjectives: list[str] = []
    for segment in " ".join(words(event)).split(" and "):
        first_content = True
        for token in segment.split():
            low = token.lower()
            if low in FUNCTION_WORDS:
                continue
            lemma = lemmatize_token(low)
            if first_content and lemma in COMMON_VERBS:
                verbs.append(conjugate(lemma, context_tense))
            elif is_adjective(low):
                adjectives.append(low)
            else:
                nouns.append(low)
            first_content = False
    return EventParts(tuple(verbs), tuple(nouns), tuple(adjectives), context_tense)


def make_templates(parts: EventParts, prior_subjects: Sequence[str]) -> list[Template]:
    """Enumerate every template the mask-run grammar allows.

    Layout per template: 0-5 leading masks, one subject slot (each prior
    subject in the given order, then a masked subject), 0-2 masks before
    each literal element, the verb / adjective / noun literals that exist,
    and 0-8 trailing masks. Enumeration is odometer-style and deterministic.
    """
    element_rows: list[tuple[str, ...]] = []
    adj_literal = " ".join(parts.adjectives)
    noun_literal = " ".join(parts.nouns)
    for verb in dict.fromkeys(parts.verbs) or (None,):
        row = tuple(x for x in (verb, adj_literal or None, noun_literal or None) if x)
        if row and row not in element_rows:
            element_rows.append(row)

    subjects: list[str | None] = list(prior_subjects) + [None]
    out: list[Template] = []
    for elements in element_rows:
        for lead in LEADING_MASKS:
            for subject in subjects:
                for gaps in _gap_combinations(len(elements)):
                    for trail in TRAILING_MASKS:
                        tokens: list[TemplateToken] = [Mask()] * lead
                        tokens.append(SubjectSlot(subject))
                        for gap, element in zip(gaps, elements):
                            tokens.extend([Mask()] * gap)
                            tokens.append(Literal(element))
                        tokens.extend([Mask()] * trail)
                        out.append(Template(tuple(tokens)))
    return out


def _gap_combinations(n_elements: int) -> list[tuple[int, ...]]:
    combos: list[tuple[int, ...]] = [()]
    for _ in range(n_elements):
        combos = [prefix + (gap,) for prefix in combos for gap in GAP_MASKS]
    return combos


def template_count(parts: EventParts, n_prior_subjects: int) -> int:
    """Closed-form size of the template family, before any cap."""
    distinct_verbs = len(dict.fromkeys(parts.verbs))
    n_elements = (1 if parts.adjectives else 0) + (1 if parts.nouns else 0)
    if distinct_verbs:
        per_verb = len(LEADING_MASKS) * (n_prior_subjects + 1) * len(GAP_MASKS) ** (n_elements + 1) * len(TRAILING_MASKS)
        return distinct_verbs * per_verb
    return len(LEADING_MASKS) * (n_prior_subjects + 1) * len(GAP_MASKS) ** n_elements * len(TRAILING_MASKS)


def cap_templates(templates: list[Template], cap: int) -> list[Template]:
    """Deterministic stratified downsampling across mask-count strata."""
    if cap < 1:
        raise ValidationError(f"template cap must be >= 1, got {cap}")
    if len(templates) <= cap:
        return list(templates)
    strata: dict[int, list[Template]] = {}
    for template in templates:
        strata.setdefault(template.mask_count, []).append(template)
    total = len(templates)
    keys = sorted(strata)
    allocs = {k: (cap * len(strata[k])) // total for k in keys}
    remainders = sorted(
        keys,
        key=lambda k: (-((cap * len(strata[k])) % total), k),
    )
    shortfall = cap - sum(allocs.values())
    for k in remainders[:shortfall]:
        allocs[k] += 1
    out: list[Template] = []
    for k in keys:
        group, alloc = strata[k], allocs[k]
        out.extend(group[(i * len(group)) // alloc] for i in range(alloc))
    return out


def fill_templates(
    templates: Sequence[Template],
    context: str,
    infill: InfillProvider,
    workers: int = 1,
) -> list[ContinuationCandidate]:
    """Complete each template; drop empty fills and residual sentinels.

    Mask-free templates come back verbatim without a provider round-trip.
    """
    if not templates:
        raise ValidationError("fill_templates needs at least one template")

    def fill_one(indexed: tuple[int, Template]) -> ContinuationCandidate | None:
        index, template = indexed
        rendered = template.render()
        if template.mask_count == 0:
            return ContinuationCandidate(rendered, template)
        try:
            filled, _score = infill.infill(context, rendered)
        except Exception as exc:  # noqa: BLE001
            raise GenerationError(f"infill failed: {exc}", template_index=index) from exc
        if not filled.strip() or MASK in filled:
            return None
        return ContinuationCandidate(filled, template)

    results = map_ordered(fill_one, enumerate(templates), workers)
    return [c for c in results if c is not None]


def score_sentence(context: str, sentence: str, scorer: SequenceScorerProvider) -> float:
    """Summed conditional token log-probabilities of the sentence."""
    if not sentence.strip():
        raise ValidationError("cannot score an empty sentence")
    return sum(scorer.token_logprobs(context, sentence))


def score_candidates(
    candidates: Sequence[ContinuationCandidate],
    context: str,
    scorer: SequenceScorerProvider,
    workers: int = 1,
) -> list[ContinuationCandidate]:
    def score_one(candidate: ContinuationCandidate) -> ContinuationCandidate:
        return replace(candidate, log_prob=score_sentence(context, candidate.text, scorer))

    return map_ordered(score_one, candidates, workers)


def select_continuation(candidates: Sequence[ContinuationCandidate]) -> ContinuationCandidate:
    """Highest log-probability wins; ties go to fewer tokens, then lexicographic."""
    if not candidates:
        raise GenerationError("no continuation candidates to select from")
    return min(candidates, key=lambda c: (-c.log_prob, len(c.text.split()), c.text))
