"""Shared text pipeline: whitespace/punctuation split, lowercase, Porter
stemming. Documents and questions go through the identical pipeline; golden
tests pin the stemmer's behavior.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_VOWELS = "aeiou"


def tokenize(text: str) -> list[str]:
    """Lowercase, split on anything non-alphanumeric, stem each token."""
    return [stem(tok) for tok in _TOKEN_RE.findall(text.lower())]


def split_words(text: str) -> list[str]:
    """Lowercase split without stemming (schema-split token groups)."""
    return _TOKEN_RE.findall(text.lower())


# -- Porter stemmer (1980 algorithm) ----------------------------------------


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem_part: str) -> int:
    """Number of VC sequences in [C](VC)^m[V]."""
    forms = []
    for i in range(len(stem_part)):
        c = _is_consonant(stem_part, i)
        if not forms or forms[-1] != c:
            forms.append(c)
    # forms is alternating [C?]V C V C ... ; count VC pairs
    count = 0
    for k in range(len(forms) - 1):
        if not forms[k] and forms[k + 1]:
            count += 1
    return count


def _has_vowel(stem_part: str) -> bool:
    return any(not _is_consonant(stem_part, i) for i in range(len(stem_part)))


def _ends_double_consonant(word: str) -> bool:
    return (len(word) >= 2 and word[-1] == word[-2]
            and _is_consonant(word, len(word) - 1))


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (_is_consonant(word, len(word) - 3)
            and not _is_consonant(word, len(word) - 2)
            and _is_consonant(word, len(word) - 1)):
        return False
    return word[-1] not in "wxy"


def _replace(word: str, suffix: str, repl: str, min_measure: int) -> str | None:
    if not word.endswith(suffix):
        return None
    stem_part = word[:len(word) - len(suffix)]
    if _measure(stem_part) > min_measure - 1:
        return stem_part + repl
    return word


def stem(token: str) -> str:
    """Porter stem of a lowercase token; non-alphabetic tokens pass through."""
    if len(token) <= 2 or not token.isalpha():
        return token
    word = token

    # step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif not word.endswith("ss") and word.endswith("s"):
        word = word[:-1]

    # step 1b
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    else:
        matched = None
        if word.endswith("ed") and _has_vowel(word[:-2]):
            matched = word[:-2]
        elif word.endswith("ing") and _has_vowel(word[:-3]):
            matched = word[:-3]
        if matched is not None:
            word = matched
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_consonant(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure(word) == 1 and _ends_cvc(word):
                word += "e"

    # step 1c
    if word.endswith("y") and _has_vowel(word[:-1]):
        word = word[:-1] + "i"

    # step 2
    for suffix, repl in (
        ("ational", "ate"), ("tional", "tion"), ("enci", "ence"),
        ("anci", "ance"), ("izer", "ize"), ("abli", "able"), ("alli", "al"),
        ("entli", "ent"), ("eli", "e"), ("ousli", "ous"), ("ization", "ize"),
        ("ation", "ate"), ("ator", "ate"), ("alism", "al"),
        ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous"),
        ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
    ):
        if word.endswith(suffix):
            word = _replace(word, suffix, repl, 1) or word
            break

    # step 3
    for suffix, repl in (
        ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
        ("ical", "ic"), ("ful", ""), ("ness", ""),
    ):
        if word.endswith(suffix):
            word = _replace(word, suffix, repl, 1) or word
            break

    # step 4
    for suffix in ("al", "ance", "ence", "er", "ic", "able", "ible", "ant",
                   "ement", "ment", "ent", "ion", "ou", "ism", "ate", "iti",
                   "ous", "ive", "ize"):
        if word.endswith(suffix):
            stem_part = word[:len(word) - len(suffix)]
            if suffix == "ion" and (not stem_part or stem_part[-1] not in "st"):
                break
            if _measure(stem_part) > 1:
                word = stem_part
            break

    # step 5a
    if word.endswith("e"):
        m = _measure(word[:-1])
        if m > 1 or (m == 1 and not _ends_cvc(word[:-1])):
            word = word[:-1]

    # step 5b
    if _measure(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
        word = word[:-1]

    return word
