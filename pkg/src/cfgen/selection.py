"""Sentence-pair filters and samplers for building fine-tuning corpora.

Two filter profiles exist: the strict one used to pick counterfactual
candidates (length 20, animacy, wellformedness, no proper nouns) and the
relaxed one used for the neutral random mix-in (length 100, ratio,
wellformedness only). Filters are pure and report every failed criterion,
not just the first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .corpus import ParallelPair
from .lexicons import AnimacyLexicon, GENDERED_PRONOUNS

GENDERED_LENGTH_LIMIT = 20
NEUTRAL_LENGTH_LIMIT = 100
LENGTH_RATIO_LIMIT = 3.0
FINAL_PUNCTUATION = frozenset({".", "!", "?"})
DEFAULT_PER_PROFESSION_CAP = 10


class FilterReason(str, Enum):
    LENGTH = "Length"
    LENGTH_RATIO = "LengthRatio"
    ANIMACY = "Animacy"
    WELLFORMEDNESS = "Wellformedness"
    PROPER_NOUN = "ProperNoun"


@dataclass(frozen=True)
class FilterVerdict:
    accepted: bool
    reasons: frozenset[FilterReason]

    def __post_init__(self) -> None:
        if self.accepted != (not self.reasons):
            raise ValueError("verdict accepted flag disagrees with reasons")

    @classmethod
    def from_reasons(cls, reasons) -> "FilterVerdict":
        reasons = frozenset(reasons)
        return cls(accepted=not reasons, reasons=reasons)


@dataclass(frozen=True)
class GenderedSelection:
    pair: ParallelPair
    pronoun_index: int
    profession_index: int
    profession_lemma: str


def _whitespace_count(raw: str) -> int:
    return len(raw.split())


def _length_ok(raw: str, limit: int) -> bool:
    return 0 < _whitespace_count(raw) <= limit


def _ratio_ok(src_raw: str, tgt_raw: str) -> bool:
    a = _whitespace_count(src_raw)
    b = _whitespace_count(tgt_raw)
    if min(a, b) == 0:
        return False
    return max(a, b) / min(a, b) <= LENGTH_RATIO_LIMIT


def _wellformed(pair: ParallelPair) -> bool:
    raw = pair.src_raw
    if not raw or not raw[0].isupper():
        return False
    return pair.src.tokens[-1].surface in FINAL_PUNCTUATION


def filter_neutral(pair: ParallelPair) -> FilterVerdict:
    reasons = set()
    if not _length_ok(pair.src_raw, NEUTRAL_LENGTH_LIMIT):
        reasons.add(FilterReason.LENGTH)
    if not _ratio_ok(pair.src_raw, pair.tgt_raw):
        reasons.add(FilterReason.LENGTH_RATIO)
    if not _wellformed(pair):
        reasons.add(FilterReason.WELLFORMEDNESS)
    return FilterVerdict.from_reasons(reasons)


def filter_gendered(
    pair: ParallelPair, lexicon: AnimacyLexicon
) -> tuple[FilterVerdict, GenderedSelection | None]:
    """Full candidate filter; on acceptance also returns the selection."""
    reasons = set()
    if not _length_ok(pair.src_raw, GENDERED_LENGTH_LIMIT):
        reasons.add(FilterReason.LENGTH)
    if not _ratio_ok(pair.src_raw, pair.tgt_raw):
        reasons.add(FilterReason.LENGTH_RATIO)
    if not _wellformed(pair):
        reasons.add(FilterReason.WELLFORMEDNESS)
    if any(t.upos == "PROPN" for t in pair.src.tokens):
        reasons.add(FilterReason.PROPER_NOUN)

    pronouns = [t for t in pair.src.tokens if t.surface.lower() in GENDERED_PRONOUNS]
    lemmas = lexicon.en_lemmas()
    professions = [t for t in pair.src.tokens if t.lemma.lower() in lemmas]
    animate_ok = (
        len(pronouns) == 1
        and len(professions) == 1
        and professions[0].upos == "NOUN"
        and professions[0].feats.number == "Sing"
    )
    if not animate_ok:
        reasons.add(FilterReason.ANIMACY)

    verdict = FilterVerdict.from_reasons(reasons)
    if not verdict.accepted:
        return verdict, None
    return verdict, GenderedSelection(
        pair=pair,
        pronoun_index=pronouns[0].index,
        profession_index=professions[0].index,
        profession_lemma=professions[0].lemma.lower(),
    )


def sample_per_profession(
    selections, cap: int = DEFAULT_PER_PROFESSION_CAP, *, seed
) -> list[GenderedSelection]:
    """At most ``cap`` selections per profession, sampled without replacement.

    Output is ordered lexicographically by lemma and by corpus order within a
    lemma. The draw for each lemma is seeded independently, so adding data
    for one profession never reshuffles another.
    """
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    groups: dict[str, list[GenderedSelection]] = {}
    for sel in selections:
        groups.setdefault(sel.profession_lemma, []).append(sel)
    out: list[GenderedSelection] = []
    for lemma in sorted(groups):
        group = groups[lemma]
        if len(group) <= cap:
            out.extend(group)
            continue
        rng = random.Random(f"{seed}:{lemma}")
        keep = sorted(rng.sample(range(len(group)), cap))
        out.extend(group[i] for i in keep)
    return out


def random_sample(pairs, n: int, *, seed) -> list[ParallelPair]:
    """Reservoir-sample ``n`` pairs passing the neutral filter.

    Single sequential pass, so corpora far larger than memory can be
    streamed through; the result is deterministic for a fixed seed and
    input order, and is returned in corpus order.
    """
    if n < 0:
        raise ValueError(f"sample size must be >= 0, got {n}")
    if n == 0:
        return []
    rng = random.Random(seed)
    reservoir: list[tuple[int, ParallelPair]] = []
    accepted = 0
    for pair in pairs:
        if not filter_neutral(pair).accepted:
            continue
        if accepted < n:
            reservoir.append((accepted, pair))
        else:
            j = rng.randint(0, accepted)
            if j < n:
                reservoir[j] = (accepted, pair)
        accepted += 1
    reservoir.sort(key=lambda item: item[0])
    return [pair for _, pair in reservoir]
