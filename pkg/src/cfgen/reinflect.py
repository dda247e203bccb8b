"""Surface realization of re-tagged tokens and counterfactual assembly.

Reinflection is dictionary-first: the inflection lexicon (with profession
forms projected from the animacy lexicon) covers determiners and animate
nouns, and ordered suffix-transformation rules catch the long tail, mostly
adjectives. Whatever cannot be handled is left unchanged and reported, so
yield can be audited per run.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .conllu import AnnotatedSentence, MultiwordToken, Token, _set_text_comment, reconstruct_text
from .corpus import Origin, ParallelPair
from .lexicons import (
    FEM2MASC,
    MASC2FEM,
    AnimacyLexicon,
    InflectionLexicon,
    select_suffix_rule,
)
from .mrf import (
    DEFAULT_ORIGINAL_TAG_BONUS,
    AgreementModel,
    Intervention,
    Tag,
    infer_tags,
    mark_reinflection_targets,
    token_tag,
)
from .selection import GenderedSelection
from .swap import swap_english_gender

SOURCE_LEXICON = "Lexicon"
SOURCE_SUFFIX = "SuffixRule"
SOURCE_UNCHANGED = "Unchanged"

_VOWELS = "aeiouyàâäéèêëìíîïòóôöùúûüh"


def match_case(model: str, form: str) -> str:
    if model.isupper() and len(model) > 1:
        return form.upper()
    if model and model[0].isupper():
        return form[0].upper() + form[1:]
    return form


@dataclass
class ReinflectionReport:
    sources: dict[int, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        out = {SOURCE_LEXICON: 0, SOURCE_SUFFIX: 0, SOURCE_UNCHANGED: 0}
        for source in self.sources.values():
            out[source] += 1
        return out


def reinflect_token(
    token: Token,
    target: Tag,
    inflections: InflectionLexicon,
    rules,
    lang: str,
) -> tuple[str, str]:
    """Return (new surface, source). Never raises on a miss; the caller
    records the degradation instead."""
    gender, number = target
    if gender not in ("Masc", "Fem"):
        raise ValueError(f"reinflection target gender must be Masc or Fem, got {gender!r}")
    number = number or "Sing"

    for key in (token.lemma.lower(), token.surface.lower()):
        if key == "_":
            continue
        form = inflections.lookup(lang, key, gender, number)
        if form is not None:
            return match_case(token.surface, form), SOURCE_LEXICON

    direction = MASC2FEM if gender == "Fem" else FEM2MASC
    rule = select_suffix_rule(rules, lang, direction, token.surface, token.upos)
    if rule is not None:
        form = rule.apply(token.surface.lower())
        return match_case(token.surface, form), SOURCE_SUFFIX
    return token.surface, SOURCE_UNCHANGED


def _contraction_groups(tokens, table):
    items: list[tuple[str, list[Token]]] = [(t.surface, [t]) for t in tokens]
    merged_any = True
    while merged_any:
        merged_any = False
        out: list[tuple[str, list[Token]]] = []
        i = 0
        while i < len(items):
            if i + 1 < len(items):
                key = (items[i][0].lower(), items[i + 1][0].lower())
                contracted = table.get(key)
                if contracted is not None:
                    out.append(
                        (match_case(items[i][0], contracted), items[i][1] + items[i + 1][1])
                    )
                    i += 2
                    merged_any = True
                    continue
            out.append(items[i])
            i += 1
        items = out
    return items


def _apply_contractions_indexed(tokens, table):
    """Merge adjacent table pairs; returns (tokens, old index -> new index)."""
    items = _contraction_groups(tokens, table)
    index_map: dict[int, int] = {}
    for new_index, (_, sources) in enumerate(items, start=1):
        for source in sources:
            index_map[source.index] = new_index
    new_tokens: list[Token] = []
    for new_index, (surface, sources) in enumerate(items, start=1):
        member_ids = {s.index for s in sources}
        carrier = next((s for s in sources if s.head not in member_ids), sources[0])
        head = 0 if carrier.head == 0 else index_map[carrier.head]
        if len(sources) == 1:
            new_tokens.append(sources[0].with_(index=new_index, head=head))
        else:
            first, last = sources[0], sources[-1]
            new_tokens.append(
                Token(
                    index=new_index,
                    surface=surface,
                    lemma=surface.lower(),
                    upos=first.upos,
                    xpos=first.xpos,
                    head=head,
                    deprel=carrier.deprel,
                    misc=last.misc,
                )
            )
    return new_tokens, index_map


def apply_contractions(tokens, table) -> list[Token]:
    new_tokens, _ = _apply_contractions_indexed(tokens, table)
    return new_tokens


def _starts_with_vowel(surface: str) -> bool:
    return bool(surface) and surface[0].lower() in _VOWELS


def repair_elision(tokens, lang: str) -> list[Token]:
    """Context-dependent article forms: fr/it ``le/la`` vs ``l'`` and it
    ``una`` vs ``un'``. Only determiners are touched; clitic pronouns such
    as the ``l'`` of fr ``l'appelle`` keep whatever form they carry."""
    if lang not in ("fr", "it"):
        return list(tokens)
    elidable = {"fr": ("le", "la"), "it": ("lo", "la")}[lang]
    out = list(tokens)
    for i, token in enumerate(out[:-1]):
        if token.upos != "DET":
            continue
        low = token.surface.lower()
        vowel_next = _starts_with_vowel(out[i + 1].surface)
        if low in elidable and vowel_next:
            out[i] = token.with_(surface=match_case(token.surface, "l'"), space_after=False)
        elif low in ("l'", "l’") and not vowel_next:
            form = "la" if token.feats.gender == "Fem" else elidable[0]
            out[i] = token.with_(surface=match_case(token.surface, form), space_after=True)
        elif lang == "it" and low == "una" and vowel_next:
            out[i] = token.with_(surface=match_case(token.surface, "un'"), space_after=False)
        elif lang == "it" and low in ("un'", "un’") and not vowel_next:
            out[i] = token.with_(surface=match_case(token.surface, "una"), space_after=True)
    return out


def detokenize(tokens, mwts=()) -> str:
    return reconstruct_text(tuple(tokens), tuple(mwts), elide_apostrophe=True)


@dataclass
class CounterfactualResult:
    pair: ParallelPair | None
    report: ReinflectionReport | None
    intervention: Intervention | None
    skip_reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.pair is None


def _locate_animate_noun(sentence, forms):
    wanted = {forms.masc.lower(), forms.fem.lower()}
    return [
        t
        for t in sentence.tokens
        if t.lemma.lower() in wanted or t.surface.lower() in wanted
    ]


def _remap_mwts(mwts, index_map):
    out = []
    for mwt in mwts:
        start = index_map[mwt.start]
        end = index_map[mwt.end]
        if end <= start:
            continue
        out.append(dataclasses.replace(mwt, start=start, end=end))
    return tuple(out)


def generate_counterfactual(
    selection: GenderedSelection,
    model: AgreementModel,
    animacy: AnimacyLexicon,
    inflections: InflectionLexicon,
    rules,
    contractions,
    beta: float = DEFAULT_ORIGINAL_TAG_BONUS,
) -> CounterfactualResult:
    """Swap the English pronoun and regenerate the target side with the
    opposite-gender animate noun and repaired agreement."""
    pair = selection.pair
    tgt = pair.tgt
    lang = tgt.lang

    forms = animacy.forms(selection.profession_lemma, lang)
    if forms is None:
        return CounterfactualResult(None, None, None, "no-target-forms")
    matches = _locate_animate_noun(tgt, forms)
    if len(matches) == 0:
        return CounterfactualResult(None, None, None, "target-noun-not-found")
    if len(matches) > 1:
        return CounterfactualResult(None, None, None, "target-noun-ambiguous")
    noun = matches[0]

    original_gender = noun.feats.gender
    if original_gender is None:
        if forms.epicene:
            return CounterfactualResult(None, None, None, "gender-undetermined")
        matched = noun.lemma.lower() if noun.lemma.lower() in (forms.masc.lower(), forms.fem.lower()) else noun.surface.lower()
        original_gender = "Masc" if matched == forms.masc.lower() else "Fem"
    forced = "Fem" if original_gender == "Masc" else "Masc"
    intervention = Intervention(
        token_index=noun.index, gender=forced, number=noun.feats.number or "Sing"
    )

    new_tags = infer_tags(tgt, model, intervention, beta=beta)
    marked = mark_reinflection_targets(tgt, new_tags, intervention, lang)

    report = ReinflectionReport()
    tokens = list(tgt.tokens)
    for index in sorted(marked):
        token = tokens[index - 1]
        if index == intervention.token_index:
            target = intervention.tag
        else:
            target = new_tags[index]
            if target == token_tag(token):
                # determiner force-marked by language rule but left alone by
                # the model: it must agree with the swapped noun
                target = (forced, token.feats.number or intervention.number)
            if target[0] not in ("Masc", "Fem"):
                report.sources[index] = SOURCE_UNCHANGED
                report.warnings.append(
                    f"token {index} ({token.surface!r}): non-gendered target {target}, left unchanged"
                )
                continue
        surface, source = reinflect_token(token, target, inflections, rules, lang)
        report.sources[index] = source
        if source == SOURCE_UNCHANGED:
            report.warnings.append(
                f"token {index} ({token.surface!r}): no lexicon entry or suffix rule for {target}"
            )
            continue
        tokens[index - 1] = token.with_(
            surface=surface,
            feats=token.feats.updated(Gender=target[0], Number=target[1]),
        )

    tokens = repair_elision(tokens, lang)
    tokens, index_map = _apply_contractions_indexed(tokens, contractions)
    mwts = _remap_mwts(tgt.mwts, index_map)
    raw = detokenize(tokens, mwts)
    identity_map = all(old == new for old, new in index_map.items())
    new_tgt = AnnotatedSentence(
        tokens=tuple(tokens),
        raw=raw,
        lang=lang,
        comments=_set_text_comment(tgt.comments, raw),
        mwts=mwts,
        empty_nodes=tgt.empty_nodes if identity_map else (),
    )
    new_src = swap_english_gender(pair.src, selection.pronoun_index)
    cf_pair = ParallelPair(
        src=new_src,
        tgt=new_tgt,
        src_raw=new_src.raw,
        tgt_raw=raw,
        origin=Origin.COUNTERFACTUAL,
        uid=f"{pair.uid}#cf",
    )
    return CounterfactualResult(cf_pair, report, intervention)
