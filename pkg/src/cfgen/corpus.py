"""Parallel-pair model and corpus readers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .conllu import AnnotatedSentence, MorphFeatures, Token, parse_conllu_file

SUPPORTED_TARGET_LANGS = frozenset({"fr", "es", "it"})


class Origin(str, Enum):
    ORIGINAL = "Original"
    COUNTERFACTUAL = "Counterfactual"
    RANDOM = "Random"
    HANDCRAFTED = "Handcrafted"


@dataclass(frozen=True)
class ParallelPair:
    src: AnnotatedSentence
    tgt: AnnotatedSentence
    src_raw: str
    tgt_raw: str
    origin: Origin
    uid: str = ""

    def __post_init__(self) -> None:
        if self.src.lang != "en":
            raise ValueError(f"pair {self.uid!r}: source language must be en, got {self.src.lang!r}")
        if self.tgt.lang not in SUPPORTED_TARGET_LANGS:
            raise ValueError(
                f"pair {self.uid!r}: target language {self.tgt.lang!r} not in "
                f"{sorted(SUPPORTED_TARGET_LANGS)}"
            )


def sentence_from_raw(raw: str, lang: str) -> AnnotatedSentence:
    """Minimal annotation for text-only stages: whitespace tokens, no tags.

    The first token is the root and everything else hangs off it, which
    satisfies the tree invariant without claiming any real syntax.
    """
    surfaces = raw.split()
    if not surfaces:
        raise ValueError("cannot annotate an empty sentence")
    tokens = tuple(
        Token(
            index=i,
            surface=s,
            lemma="_",
            upos="_",
            feats=MorphFeatures(),
            head=0 if i == 1 else 1,
            deprel="root" if i == 1 else "dep",
        )
        for i, s in enumerate(surfaces, start=1)
    )
    return AnnotatedSentence(tokens=tokens, raw=raw, lang=lang)


def read_parallel_corpus(src_path, tgt_path, tgt_lang: str, repair_multiroot: bool = True):
    """Zip two line-aligned CoNLL-U files into ParallelPairs (origin Original)."""
    src_sentences = parse_conllu_file(src_path, lang="en", repair_multiroot=repair_multiroot)
    tgt_sentences = parse_conllu_file(tgt_path, lang=tgt_lang, repair_multiroot=repair_multiroot)
    if len(src_sentences) != len(tgt_sentences):
        raise ValueError(
            f"corpus sides differ in length: {len(src_sentences)} vs {len(tgt_sentences)}"
        )
    return [
        ParallelPair(
            src=s,
            tgt=t,
            src_raw=s.raw,
            tgt_raw=t.raw,
            origin=Origin.ORIGINAL,
            uid=str(i),
        )
        for i, (s, t) in enumerate(zip(src_sentences, tgt_sentences), start=1)
    ]


def write_pairs_tsv(pairs, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for pair in pairs:
            handle.write(f"{pair.src_raw}\t{pair.tgt_raw}\n")


def read_raw_pairs_tsv(path) -> list[tuple[str, str]]:
    rows: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}: line {line_no}: expected 2 columns, got {len(parts)}")
            rows.append((parts[0], parts[1]))
    return rows
