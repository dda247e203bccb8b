"""Animacy and inflection lexicons, suffix rules, and contraction tables.

All lexicon inputs are UTF-8 TSV files; lines starting with ``#`` are
comments. Shipped defaults live under ``cfgen/data`` and can be replaced
from the command line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

MASCULINE_PRONOUNS = frozenset({"he", "him", "his"})
FEMININE_PRONOUNS = frozenset({"she", "her"})
GENDERED_PRONOUNS = MASCULINE_PRONOUNS | FEMININE_PRONOUNS

MASC2FEM = "masc2fem"
FEM2MASC = "fem2masc"


class LexiconError(ValueError):
    """Raised for malformed or inconsistent lexicon files."""


def default_data_path(*parts: str):
    return resources.files("cfgen").joinpath("data", *parts)


def _read_tsv(path, n_columns: int):
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != n_columns:
                raise LexiconError(
                    f"{path}: line {line_no}: expected {n_columns} columns, got {len(parts)}"
                )
            rows.append((line_no, parts))
    return rows


@dataclass(frozen=True)
class GenderedForms:
    masc: str
    fem: str

    @property
    def epicene(self) -> bool:
        return self.masc == self.fem


@dataclass(frozen=True)
class AnimacyLexicon:
    """Profession nouns keyed by English lemma, with per-language forms."""

    entries: dict[str, dict[str, GenderedForms]]

    def en_lemmas(self) -> frozenset[str]:
        return frozenset(self.entries)

    def forms(self, en_lemma: str, lang: str) -> GenderedForms | None:
        return self.entries.get(en_lemma.lower(), {}).get(lang)

    @classmethod
    def load(cls, path) -> "AnimacyLexicon":
        entries: dict[str, dict[str, GenderedForms]] = {}
        for line_no, (en_lemma, lang, masc, fem) in _read_tsv(path, 4):
            en_lemma = en_lemma.lower()
            if not masc or not fem:
                raise LexiconError(
                    f"{path}: line {line_no}: entry {en_lemma!r} is missing a gendered form"
                )
            per_lang = entries.setdefault(en_lemma, {})
            if lang in per_lang:
                raise LexiconError(
                    f"{path}: line {line_no}: duplicate entry for {en_lemma!r}/{lang}"
                )
            per_lang[lang] = GenderedForms(masc=masc, fem=fem)
        return cls(entries=entries)


@dataclass(frozen=True)
class InflectionLexicon:
    """(lang, lemma, gender, number) -> surface form, loaded once, immutable."""

    rows: dict[tuple[str, str, str, str], str]

    def lookup(self, lang: str, lemma: str, gender: str, number: str) -> str | None:
        return self.rows.get((lang, lemma.lower(), gender, number))

    @classmethod
    def load(cls, path) -> "InflectionLexicon":
        rows: dict[tuple[str, str, str, str], str] = {}
        for line_no, (lang, lemma, gender, number, form) in _read_tsv(path, 5):
            key = (lang, lemma.lower(), gender, number)
            if key in rows:
                raise LexiconError(f"{path}: line {line_no}: duplicate inflection key {key}")
            rows[key] = form
        return cls(rows=rows)

    def with_animacy_forms(self, animacy: AnimacyLexicon, lang: str) -> "InflectionLexicon":
        """Project profession forms into inflection rows for one language.

        Both the masculine and the feminine form are usable as lemma keys,
        since parsers lemmatize gendered nouns either way. Explicit TSV rows
        always win over projected ones.
        """
        rows = dict(self.rows)
        for en_lemma, per_lang in animacy.entries.items():
            forms = per_lang.get(lang)
            if forms is None:
                continue
            for lemma in {forms.masc.lower(), forms.fem.lower()}:
                for gender, surface in (("Masc", forms.masc), ("Fem", forms.fem)):
                    key = (lang, lemma, gender, "Sing")
                    rows.setdefault(key, surface)
        return InflectionLexicon(rows=rows)


@dataclass(frozen=True)
class SuffixRule:
    lang: str
    direction: str
    pos_scope: frozenset[str]
    match_suffix: str
    replace_suffix: str
    priority: int

    def applies_to(self, surface: str, upos: str) -> bool:
        if self.pos_scope and upos not in self.pos_scope:
            return False
        return surface.lower().endswith(self.match_suffix)

    def apply(self, surface: str) -> str:
        if self.match_suffix:
            return surface[: -len(self.match_suffix)] + self.replace_suffix
        return surface + self.replace_suffix


def load_suffix_rules(path) -> list[SuffixRule]:
    """Columns: lang, direction, pos_scope (csv or *), match, replace, priority."""
    rules: list[SuffixRule] = []
    seen: dict[tuple[str, str, int], int] = {}
    for line_no, (lang, direction, scope, match, replace, priority) in _read_tsv(path, 6):
        if direction not in (MASC2FEM, FEM2MASC):
            raise LexiconError(f"{path}: line {line_no}: bad direction {direction!r}")
        try:
            prio = int(priority)
        except ValueError:
            raise LexiconError(f"{path}: line {line_no}: bad priority {priority!r}")
        key = (lang, direction, prio)
        if key in seen:
            raise LexiconError(
                f"{path}: line {line_no}: duplicate priority {prio} for {lang}/{direction}"
            )
        seen[key] = line_no
        pos_scope = frozenset() if scope == "*" else frozenset(scope.split(","))
        rules.append(
            SuffixRule(
                lang=lang,
                direction=direction,
                pos_scope=pos_scope,
                match_suffix="" if match == "-" else match,
                replace_suffix="" if replace == "-" else replace,
                priority=prio,
            )
        )
    return rules


def select_suffix_rule(rules, lang: str, direction: str, surface: str, upos: str) -> SuffixRule | None:
    """Longest matching suffix wins; priority breaks length ties."""
    candidates = [
        r
        for r in rules
        if r.lang == lang and r.direction == direction and r.applies_to(surface, upos)
    ]
    if not candidates:
        return None
    return min(candidates, key=lambda r: (-len(r.match_suffix), r.priority))


def load_contractions(path) -> dict[tuple[str, str], str]:
    """Columns: preposition, article, contracted form (lowercase keys)."""
    table: dict[tuple[str, str], str] = {}
    for line_no, (prep, article, contracted) in _read_tsv(path, 3):
        key = (prep.lower(), article.lower())
        if key in table:
            raise LexiconError(f"{path}: line {line_no}: duplicate contraction {key}")
        table[key] = contracted
    return table
