"""Final fine-tuning corpus assembly: balancing, mixing, and hazard lint.

The gender-balanced set keeps an original only together with its
counterfactual twin, so every profession ends up with exactly as many
masculine-pronoun as feminine-pronoun sources. Pairs whose counterfactual
target came out identical to the original are dropped on both sides.

The lint surfaces the known failure mode of pronoun-only source swapping:
an English subject pronoun of one gender facing a target-side subject
pronoun of the other. By default flagged pairs are reported but kept,
which reproduces the shipped behavior of such datasets; strict mode drops
them.
"""

from __future__ import annotations

import json
import random
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .corpus import Origin, ParallelPair, read_raw_pairs_tsv

COMPONENT_NAMES = ("GB", "Random", "SB")

SUBJECT_PRONOUNS = {
    "en": {"he": "Male", "she": "Female"},
    "fr": {"il": "Male", "elle": "Female"},
    "es": {"él": "Male", "ella": "Female"},
    "it": {"lui": "Male", "egli": "Male", "lei": "Female", "ella": "Female"},
}


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class LintFlag:
    pair_uid: str
    kind: str  # PronounMappingHazard | IdenticalCounterfactual
    detail: str


@dataclass(frozen=True)
class DatasetRecipe:
    components: tuple[tuple[str, Path], ...]
    shuffle_seed: int

    def __post_init__(self) -> None:
        if not self.components:
            raise AssemblyError("recipe needs at least one component")
        names = [name for name, _ in self.components]
        if len(set(names)) != len(names):
            raise AssemblyError(f"duplicate component names in {names}")
        for name in names:
            if name not in COMPONENT_NAMES:
                raise AssemblyError(
                    f"unknown component {name!r}, expected one of {COMPONENT_NAMES}"
                )


@dataclass
class BalancedDataset:
    pairs: list[ParallelPair]
    flags: list[LintFlag]
    dropped_uids: list[str]


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def build_balanced_dataset(originals, counterfactuals) -> BalancedDataset:
    """Interleave originals with their counterfactual twins.

    ``originals`` are the accepted selections; ``counterfactuals`` must
    have been generated from them (uid convention ``<uid>#cf``). Originals
    whose counterfactual was skipped are dropped to preserve balance.
    """
    by_base: dict[str, ParallelPair] = {}
    original_uids = {sel.pair.uid for sel in originals}
    for cf in counterfactuals:
        base, sep, _ = cf.uid.rpartition("#")
        if not sep or base not in original_uids:
            raise AssemblyError(f"counterfactual {cf.uid!r} has no matching original")
        by_base[base] = cf

    pairs: list[ParallelPair] = []
    flags: list[LintFlag] = []
    dropped: list[str] = []
    for sel in originals:
        original = sel.pair
        cf = by_base.get(original.uid)
        if cf is None:
            dropped.append(original.uid)
            continue
        if _nfc(cf.tgt_raw) == _nfc(original.tgt_raw):
            flags.append(
                LintFlag(
                    pair_uid=cf.uid,
                    kind="IdenticalCounterfactual",
                    detail=f"counterfactual target equals original: {original.tgt_raw!r}",
                )
            )
            dropped.append(original.uid)
            continue
        pairs.append(original)
        pairs.append(cf)
    return BalancedDataset(pairs=pairs, flags=flags, dropped_uids=dropped)


def lint_counterfactual_pair(pair: ParallelPair) -> list[LintFlag]:
    """Flag source/target subject pronouns of opposite gender."""
    src_genders = {
        SUBJECT_PRONOUNS["en"][t.surface.lower()]
        for t in pair.src.tokens
        if t.surface.lower() in SUBJECT_PRONOUNS["en"]
    }
    table = SUBJECT_PRONOUNS.get(pair.tgt.lang, {})
    tgt_genders = {
        table[t.surface.lower()]
        for t in pair.tgt.tokens
        if t.upos == "PRON" and t.surface.lower() in table
    }
    flags: list[LintFlag] = []
    for gender, opposite in (("Female", "Male"), ("Male", "Female")):
        if gender in src_genders and opposite in tgt_genders and gender not in tgt_genders:
            flags.append(
                LintFlag(
                    pair_uid=pair.uid,
                    kind="PronounMappingHazard",
                    detail=(
                        f"source has a {gender.lower()} subject pronoun but the target "
                        f"side only has a {opposite.lower()} one"
                    ),
                )
            )
    return flags


def load_handcrafted(path) -> list[ParallelPair]:
    """Template sentence pairs, loaded verbatim (no dedup)."""
    from .corpus import sentence_from_raw

    rows = read_raw_pairs_tsv(path)
    if not rows:
        raise AssemblyError(f"{path}: handcrafted dataset is empty")
    lang = _guess_handcrafted_lang(path)
    return [
        ParallelPair(
            src=sentence_from_raw(src, "en"),
            tgt=sentence_from_raw(tgt, lang),
            src_raw=src,
            tgt_raw=tgt,
            origin=Origin.HANDCRAFTED,
            uid=f"sb{i}",
        )
        for i, (src, tgt) in enumerate(rows, start=1)
    ]


def _guess_handcrafted_lang(path) -> str:
    name = Path(path).stem.lower()
    for lang in ("fr", "es", "it"):
        if name.endswith(f"_{lang}") or name == lang:
            return lang
    return "fr"


def mix_corpora(recipe: DatasetRecipe, out_dir, lint_counts: dict[str, int] | None = None) -> dict:
    """Concatenate components, shuffle with the recipe seed, and write the
    two-file and TSV outputs plus a manifest. Returns the manifest dict."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows: list[tuple[str, str]] = []
    component_counts: dict[str, int] = {}
    for name, path in recipe.components:
        if not Path(path).exists():
            raise AssemblyError(f"component {name}: missing file {path}")
        component_rows = read_raw_pairs_tsv(path)
        component_counts[name] = len(component_rows)
        rows.extend(component_rows)

    rng = random.Random(recipe.shuffle_seed)
    order = list(range(len(rows)))
    rng.shuffle(order)
    shuffled = [rows[i] for i in order]

    with open(out_dir / "mixed.src", "w", encoding="utf-8", newline="\n") as src_handle, open(
        out_dir / "mixed.tgt", "w", encoding="utf-8", newline="\n"
    ) as tgt_handle, open(out_dir / "mixed.tsv", "w", encoding="utf-8", newline="\n") as tsv_handle:
        for src, tgt in shuffled:
            src_handle.write(src + "\n")
            tgt_handle.write(tgt + "\n")
            tsv_handle.write(f"{src}\t{tgt}\n")

    manifest = {
        "components": [
            {"name": name, "path": str(path), "count": component_counts[name]}
            for name, path in recipe.components
        ],
        "shuffle_seed": recipe.shuffle_seed,
        "total": len(rows),
        "lint": dict(sorted((lint_counts or {}).items())),
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True, ensure_ascii=False)
        handle.write("\n")
    return manifest
