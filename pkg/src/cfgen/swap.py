"""Opposite-gender rewriting of the English source sentence.

Only the single selected pronoun changes: he/she flip, him maps to her,
his maps to her, and her maps to his or him depending on whether the token
functions as a possessive. ``hers`` is never produced.
"""

from __future__ import annotations

from .conllu import AnnotatedSentence

SWAPPABLE = frozenset({"he", "she", "him", "his", "her"})

_LEMMAS = {
    ("he", False): "he",
    ("she", False): "she",
    ("him", False): "he",
    ("her", False): "she",
    ("her", True): "her",
    ("his", True): "his",
}


class SwapError(ValueError):
    """The token at the requested index is not a swappable pronoun."""


def _is_possessive(token) -> bool:
    return token.upos == "DET" or token.feats.get("Poss") == "Yes"


def _match_case(model: str, form: str) -> str:
    if model.isupper() and len(model) > 1:
        return form.upper()
    if model[0].isupper():
        return form[0].upper() + form[1:]
    return form


def swap_english_gender(sent: AnnotatedSentence, pronoun_index: int) -> AnnotatedSentence:
    token = sent.token(pronoun_index)
    low = token.surface.lower()
    if low not in SWAPPABLE:
        raise SwapError(f"token {pronoun_index} ({token.surface!r}) is not a swappable pronoun")

    possessive = _is_possessive(token)
    if low == "he":
        new = "she"
    elif low == "she":
        new = "he"
    elif low == "him":
        new = "her"
    elif low == "his":
        new = "her"
    else:  # her
        new = "his" if possessive else "him"

    new_possessive = possessive  # swapping never changes syntactic function
    feats = token.feats
    if feats.gender == "Masc":
        feats = feats.updated(Gender="Fem")
    elif feats.gender == "Fem":
        feats = feats.updated(Gender="Masc")
    swapped = token.with_(
        surface=_match_case(token.surface, new),
        lemma=_LEMMAS[(new, new_possessive)],
        feats=feats,
    )
    tokens = list(sent.tokens)
    tokens[pronoun_index - 1] = swapped
    return sent.with_tokens(tokens)
