"""Deterministic text utilities underpinning node identity and templates."""

from storm.text import (
    conjugate,
    detect_tense,
    event_phrase,
    lemmatize_token,
    normalize_concept,
    split_sentences,
    tokenize,
)


class TestLemmatizer:
    def test_irregular_verbs(self):
        assert lemmatize_token("went") == "go"
        assert lemmatize_token("got") == "get"
        assert lemmatize_token("swam") == "swim"
        assert lemmatize_token("was") == "be"

    def test_plural_stripping(self):
        assert lemmatize_token("beaches") == "beach"
        assert lemmatize_token("gifts") == "gift"
        assert lemmatize_token("stories") == "story"
        assert lemmatize_token("glass") == "glass"

    def test_regular_inflection_stripping(self):
        assert lemmatize_token("lived") == "live"
        assert lemmatize_token("walked") == "walk"
        assert lemmatize_token("stopped") == "stop"
        assert lemmatize_token("swimming") == "swim"
        assert lemmatize_token("making") == "make"

    def test_idempotent_on_lemmas(self):
        for lemma in ("go", "beach", "swim", "florida", "degree"):
            assert lemmatize_token(lemma) == lemma


class TestConjugation:
    def test_common_conjugation_pairs(self):
        assert conjugate("get", "past") == "got"
        assert conjugate("get", "present") == "gets"
        assert conjugate("swim", "past") == "swam"
        assert conjugate("walk", "past") == "walked"
        assert conjugate("carry", "present") == "carries"
        assert conjugate("go", "present") == "goes"


class TestNormalization:
    def test_lowercase_article_strip_lemmatize(self):
        assert normalize_concept("the Beaches") == "beach"
        assert normalize_concept("A gift") == "gift"
        assert normalize_concept("go to beach") == "go to beach"
        assert normalize_concept("  Florida  ") == "florida"

    def test_event_phrase_strips_subject_and_lemmatizes_verb(self):
        assert event_phrase("Jenny lived in Florida.") == "live in Florida"
        assert event_phrase("enjoy sunshine") == "enjoy sunshine"
        assert event_phrase("She swam.") == "swim"


class TestTenseAndTokens:
    def test_detect_tense(self):
        assert detect_tense("Jenny lived in Florida.") == "past"
        assert detect_tense("Jenny eats a lot of ice cream.") == "present"

    def test_split_sentences(self):
        story = "Jenny lived in Florida. She swam! Did she enjoy it?"
        assert split_sentences(story) == ["Jenny lived in Florida.", "She swam!", "Did she enjoy it?"]

    def test_metric_tokenization_splits_punctuation(self):
        assert tokenize("The cat, sat.") == ["the", "cat", ",", "sat", "."]
