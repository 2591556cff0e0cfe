"""Rule-based English text utilities: normalization, lemmatization, conjugation.

Everything here is table- plus suffix-driven so that identical inputs always
produce identical outputs. The tables are intentionally small; they cover the
closed-class words and the irregular verbs that show up in short commonsense
story phrases. Unknown words fall through to regular suffix rules.
"""

from __future__ import annotations

import re

# Irregular verb conjugation, lemma -> simple past. The reverse direction
# (past -> lemma) is derived below for the lemmatizer.
IRREGULAR_PAST: dict[str, str] = {
    "be": "was", "have": "had", "do": "did", "go": "went", "get": "got",
    "swim": "swam", "eat": "ate", "feel": "felt", "meet": "met",
    "fall": "fell", "take": "took", "make": "made", "come": "came",
    "see": "saw", "find": "found", "give": "gave", "know": "knew",
    "think": "thought", "tell": "told", "say": "said", "leave": "left",
    "run": "ran", "sit": "sat", "stand": "stood", "buy": "bought",
    "bring": "brought", "catch": "caught", "teach": "taught",
    "fight": "fought", "sleep": "slept", "keep": "kept", "hold": "held",
    "wear": "wore", "write": "wrote", "ride": "rode", "rise": "rose",
    "drive": "drove", "break": "broke", "speak": "spoke", "steal": "stole",
    "wake": "woke", "choose": "chose", "begin": "began", "drink": "drank",
    "sing": "sang", "ring": "rang", "win": "won", "sell": "sold",
    "send": "sent", "spend": "spent", "build": "built", "lose": "lost",
    "shoot": "shot", "bite": "bit", "hide": "hid", "hit": "hit",
    "cut": "cut", "put": "put", "let": "let", "set": "set", "read": "read",
    "hear": "heard", "pay": "paid", "fly": "flew", "grow": "grew",
    "draw": "drew", "throw": "threw", "blow": "blew", "become": "became",
    "forget": "forgot", "understand": "understood",
}

# Extra form -> lemma entries the suffix rules cannot recover.
_EXTRA_LEMMAS: dict[str, str] = {
    "is": "be", "are": "be", "am": "be", "were": "be", "been": "be",
    "being": "be",
    "has": "have", "having": "have",
    "does": "do", "goes": "go", "going": "go", "gone": "go",
    "gotten": "get", "getting": "get",
    "men": "man", "women": "woman", "children": "child", "people": "person",
    "feet": "foot", "teeth": "tooth", "mice": "mouse",
    "visited": "visit", "graduated": "graduate", "celebrated": "celebrate",
}

IRREGULAR_LEMMA: dict[str, str] = {past: lemma for lemma, past in IRREGULAR_PAST.items() if past != lemma}
IRREGULAR_LEMMA.update(_EXTRA_LEMMAS)

# Small verb lexicon used to spot the verb slot of an event phrase.
COMMON_VERBS: frozenset[str] = frozenset(IRREGULAR_PAST) | frozenset({
    "want", "need", "like", "love", "hate", "enjoy", "live", "work",
    "play", "walk", "talk", "look", "ask", "call", "help", "start",
    "stop", "stay", "move", "turn", "open", "close", "use", "try",
    "visit", "travel", "cook", "clean", "wash", "watch", "listen",
    "dance", "jump", "climb", "smile", "laugh", "cry", "yell", "wave",
    "rest", "relax", "celebrate", "graduate", "propose", "marry",
    "order", "pick", "carry", "push", "pull", "wait", "plan", "learn",
    "study", "practice", "exercise", "rain", "snow",
})

# Closed-class words dropped from the head of concept ids and skipped when
# splitting event phrases into verb/noun/adjective sets.
ARTICLES: frozenset[str] = frozenset({"a", "an", "the"})
FUNCTION_WORDS: frozenset[str] = ARTICLES | frozenset({
    "to", "of", "in", "on", "at", "for", "with", "from", "by", "about",
    "into", "onto", "and", "or", "some", "any", "his", "her", "their",
    "its", "my", "your", "our", "up", "down", "out", "off",
})

# Adjectives that suffix rules alone would misclassify as nouns.
COMMON_ADJECTIVES: frozenset[str] = frozenset({
    "fat", "thin", "big", "small", "happy", "sad", "angry", "glad",
    "good", "bad", "old", "new", "young", "rich", "poor", "hot", "cold",
    "warm", "tired", "hungry", "thirsty", "sick", "healthy", "strong",
    "weak", "tall", "short", "long", "fast", "slow", "nervous", "calm",
    "afraid", "scared", "proud", "great", "nice", "fine", "better",
    "worse", "powerful", "famous", "quiet", "loud", "clean", "dirty",
    "full", "empty", "dark", "bright", "friendly", "lonely",
})

_ADJ_SUFFIXES = ("ful", "ous", "ish", "ive", "less", "able", "ible")

PRONOUNS_MALE: frozenset[str] = frozenset({"he", "him", "his", "himself"})
PRONOUNS_FEMALE: frozenset[str] = frozenset({"she", "her", "hers", "herself"})
PRONOUNS_NEUTER: frozenset[str] = frozenset({"it", "its", "itself"})
PRONOUNS_PLURAL: frozenset[str] = frozenset({"they", "them", "their", "theirs", "themselves"})
ALL_PRONOUNS: frozenset[str] = PRONOUNS_MALE | PRONOUNS_FEMALE | PRONOUNS_NEUTER | PRONOUNS_PLURAL

# Capitalized sentence-starters that are never character names.
_NON_NAME_CAPITALS: frozenset[str] = frozenset({
    "the", "a", "an", "then", "when", "after", "before", "now", "but",
    "so", "and", "or", "finally", "suddenly", "in", "on", "at", "one",
    "once", "this", "that", "there", "here", "however", "immediately",
})

_VOWELS = "aeiou"


def _is_consonant(ch: str) -> bool:
    return ch.isalpha() and ch not in _VOWELS


def lemmatize_token(token: str) -> str:
    """Reduce one lower-cased token to a base form.

    Order matters: irregular table, plural stripping, then -ed / -ing
    stripping with undoubling and e-restoration.
    """
    t = token.lower()
    if t in IRREGULAR_LEMMA:
        return IRREGULAR_LEMMA[t]
    if t in IRREGULAR_PAST:  # already a lemma such as "hit" or "read"
        return t
    if len(t) > 4 and t.endswith("ies"):
        return t[:-3] + "y"
    if len(t) > 4 and t.endswith(("sses", "xes", "zes", "ches", "shes")):
        return t[:-2]
    if len(t) > 3 and t.endswith("s") and not t.endswith(("ss", "us", "is")):
        return t[:-1]
    if len(t) > 4 and t.endswith("ied"):
        return t[:-3] + "y"
    if len(t) > 4 and t.endswith("ed"):
        return _restore_stem(t[:-2])
    if len(t) > 5 and t.endswith("ing"):
        return _restore_stem(t[:-3])
    return t


def _restore_stem(stem: str) -> str:
    """Undouble a final consonant or restore a dropped final 'e'."""
    if len(stem) >= 3 and stem[-1] == stem[-2] and _is_consonant(stem[-1]) and stem[-1] not in "ls":
        return stem[:-1]
    if (
        len(stem) >= 3
        and _is_consonant(stem[-1])
        and stem[-1] not in "wxy"
        and stem[-2] in _VOWELS
        and _is_consonant(stem[-3])
    ):
        return stem + "e"
    return stem


def conjugate(lemma: str, tense: str) -> str:
    """Conjugate a verb lemma to 'past' or 'present' (third person singular)."""
    v = lemma.lower()
    if tense == "past":
        if v in IRREGULAR_PAST:
            return IRREGULAR_PAST[v]
        if v.endswith("e"):
            return v + "d"
        if len(v) > 2 and v.endswith("y") and _is_consonant(v[-2]):
            return v[:-1] + "ied"
        if (
            len(v) >= 3
            and _is_consonant(v[-1])
            and v[-1] not in "wxy"
            and v[-2] in _VOWELS
            and _is_consonant(v[-3])
            and v not in ("visit", "open", "listen", "happen", "order")
        ):
            return v + v[-1] + "ed"
        return v + "ed"
    if tense == "present":
        if v == "be":
            return "is"
        if v == "have":
            return "has"
        if v.endswith(("s", "x", "z", "ch", "sh", "o")):
            return v + "es"
        if len(v) > 2 and v.endswith("y") and _is_consonant(v[-2]):
            return v[:-1] + "ies"
        return v + "s"
    raise ValueError(f"unknown tense {tense!r}")


_PAST_FORMS: frozenset[str] = frozenset(IRREGULAR_PAST.values()) | frozenset({"were"})


def is_past_form(token: str) -> bool:
    t = token.lower()
    return t in _PAST_FORMS or (len(t) > 4 and t.endswith("ed"))


def detect_tense(text: str) -> str:
    """'past' if any token looks like a simple past form, else 'present'."""
    for token in words(text):
        if is_past_form(token):
            return "past"
    return "present"


def is_adjective(token: str) -> bool:
    t = token.lower()
    return t in COMMON_ADJECTIVES or t.endswith(_ADJ_SUFFIXES)


def is_name(token: str) -> bool:
    """Capitalized token that is plausibly a character or place name."""
    return (
        len(token) > 1
        and token[0].isupper()
        and token.lower() not in ALL_PRONOUNS
        and token.lower() not in _NON_NAME_CAPITALS
    )


def words(text: str) -> list[str]:
    """Word tokens with punctuation stripped, original case preserved."""
    return re.findall(r"[A-Za-z0-9']+", text)


def tokenize(text: str) -> list[str]:
    """Metric tokenization: lower-case, punctuation split into own tokens."""
    return re.findall(r"[a-z0-9']+|[^\sa-z0-9']", text.lower())


def split_sentences(text: str) -> list[str]:
    """Split on sentence-final period / question mark / exclamation mark."""
    parts = re.split(r"(?<=[.!?])\s+", text.strip())
    return [p for p in (part.strip() for part in parts) if p]


def collapse_whitespace(text: str) -> str:
    return " ".join(text.split())


def normalize_concept(text: str) -> str:
    """Canonical node id: lower-cased, article-stripped, lemmatized phrase."""
    tokens = [t.lower() for t in words(text)]
    while tokens and tokens[0] in ARTICLES:
        tokens = tokens[1:]
    return " ".join(lemmatize_token(t) for t in tokens)


def event_phrase(sentence: str, known_names: frozenset[str] | set[str] = frozenset()) -> str:
    """Subject-stripped clause with the leading verb lemmatized.

    Used as the display root of inference chains: "Jenny lived in Florida."
    becomes "live in Florida". Case of non-verb tokens is preserved.
    """
    tokens = words(sentence)
    names = {n.lower() for n in known_names}
    while tokens and (tokens[0].lower() in ALL_PRONOUNS or tokens[0].lower() in names or is_name(tokens[0])):
        tokens = tokens[1:]
    if not tokens:
        return collapse_whitespace(sentence)
    head = lemmatize_token(tokens[0])
    return " ".join([head] + tokens[1:])
