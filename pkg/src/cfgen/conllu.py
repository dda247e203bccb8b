"""CoNLL-U data model, parsing, and serialization.

Tokens, feature maps, and sentences are immutable; edits produce copies.
Multiword-token ranges and empty nodes are kept verbatim so a parsed file
serializes back byte for byte, but only plain word tokens take part in the
dependency tree.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

GENDERS = ("Masc", "Fem")
NUMBERS = ("Sing", "Plur")


class ConlluError(ValueError):
    """Base class for CoNLL-U ingestion problems."""


class ConlluFormatError(ConlluError):
    """Malformed line (wrong column count, bad ID or HEAD field)."""


class TreeStructureError(ConlluError):
    """Token indices or head links do not form a valid tree."""


@dataclass(frozen=True)
class MorphFeatures:
    """Ordered FEATS map, preserved verbatim for round-tripping.

    ``gender`` and ``number`` are projections of the map: they report the
    canonical values when present and None otherwise, so they can never
    disagree with the underlying features.
    """

    pairs: tuple[tuple[str, str], ...] = ()

    @classmethod
    def parse(cls, feats: str) -> "MorphFeatures":
        if feats == "_" or feats == "":
            return cls()
        out = []
        for item in feats.split("|"):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConlluFormatError(f"bad FEATS item {item!r}")
            out.append((key, value))
        return cls(tuple(out))

    def to_conllu(self) -> str:
        if not self.pairs:
            return "_"
        return "|".join(f"{k}={v}" for k, v in self.pairs)

    def get(self, key: str) -> str | None:
        for k, v in self.pairs:
            if k == key:
                return v
        return None

    @property
    def gender(self) -> str | None:
        value = self.get("Gender")
        return value if value in GENDERS else None

    @property
    def number(self) -> str | None:
        value = self.get("Number")
        return value if value in NUMBERS else None

    def updated(self, **values: str | None) -> "MorphFeatures":
        """Return a copy with keys replaced in place, inserted in sorted
        position, or removed when the value is None."""
        pairs = list(self.pairs)
        for key, value in values.items():
            idx = next((i for i, (k, _) in enumerate(pairs) if k == key), None)
            if value is None:
                if idx is not None:
                    del pairs[idx]
            elif idx is not None:
                pairs[idx] = (key, value)
            else:
                pos = next(
                    (i for i, (k, _) in enumerate(pairs) if k.lower() > key.lower()),
                    len(pairs),
                )
                pairs.insert(pos, (key, value))
        return MorphFeatures(tuple(pairs))


def _misc_space_after(misc: str) -> bool:
    return "SpaceAfter=No" not in misc.split("|")


def _misc_with_space_after(misc: str, space_after: bool) -> str:
    parts = [p for p in misc.split("|") if p not in ("SpaceAfter=No", "_", "")]
    if not space_after:
        parts.append("SpaceAfter=No")
    return "|".join(parts) if parts else "_"


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    lemma: str = "_"
    upos: str = "_"
    xpos: str = "_"
    feats: MorphFeatures = MorphFeatures()
    head: int = 0
    deprel: str = "_"
    deps: str = "_"
    misc: str = "_"

    def __post_init__(self) -> None:
        if self.index < 1:
            raise TreeStructureError(f"token index {self.index} must be >= 1")
        if self.head < 0:
            raise TreeStructureError(f"token {self.index}: negative head")
        if self.head == self.index:
            raise TreeStructureError(f"token {self.index} is its own head")
        if self.surface == "":
            raise ConlluFormatError(f"token {self.index} has empty surface")

    @property
    def space_after(self) -> bool:
        return _misc_space_after(self.misc)

    def with_(self, **changes) -> "Token":
        if "space_after" in changes:
            flag = changes.pop("space_after")
            changes["misc"] = _misc_with_space_after(self.misc, flag)
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class MultiwordToken:
    """Range line like ``3-4  du`` covering fused surface tokens.

    ``covered`` snapshots the word forms under the range at load time; the
    range is only usable for detokenization while those forms still match.
    """

    start: int
    end: int
    form: str
    misc: str = "_"
    covered: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.end <= self.start:
            raise ConlluFormatError(f"bad token range {self.start}-{self.end}")

    @property
    def space_after(self) -> bool:
        return _misc_space_after(self.misc)


@dataclass(frozen=True)
class EmptyNode:
    """Empty node line (ID like ``5.1``), preserved verbatim."""

    anchor: int
    columns: tuple[str, ...]


@dataclass(frozen=True)
class AnnotatedSentence:
    tokens: tuple[Token, ...]
    raw: str
    lang: str = ""
    comments: tuple[str, ...] = ()
    mwts: tuple[MultiwordToken, ...] = ()
    empty_nodes: tuple[EmptyNode, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.tokens)
        for pos, token in enumerate(self.tokens, start=1):
            if token.index != pos:
                raise TreeStructureError(
                    f"token indices not contiguous: expected {pos}, got {token.index}"
                )
            if token.head > n:
                raise TreeStructureError(
                    f"token {token.index} head {token.head} out of range"
                )
        roots = [t.index for t in self.tokens if t.head == 0]
        if n and len(roots) != 1:
            raise TreeStructureError(
                f"expected exactly one root, found {len(roots)}"
            )
        for token in self.tokens:
            seen = set()
            node = token.index
            while node != 0:
                if node in seen:
                    raise TreeStructureError(f"cycle through token {token.index}")
                seen.add(node)
                node = self.tokens[node - 1].head
        for mwt in self.mwts:
            if mwt.end > n:
                raise TreeStructureError(f"token range {mwt.start}-{mwt.end} out of bounds")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def root_index(self) -> int:
        for token in self.tokens:
            if token.head == 0:
                return token.index
        raise TreeStructureError("sentence has no root")

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def children(self, index: int) -> list[int]:
        return [t.index for t in self.tokens if t.head == index]

    def with_tokens(self, tokens, raw: str | None = None) -> "AnnotatedSentence":
        tokens = tuple(tokens)
        if raw is None:
            raw = reconstruct_text(tokens, self.mwts)
        comments = _set_text_comment(self.comments, raw)
        return dataclasses.replace(self, tokens=tokens, raw=raw, comments=comments)


def reconstruct_text(tokens, mwts=(), *, elide_apostrophe: bool = False) -> str:
    """Join surfaces honoring SpaceAfter and still-valid multiword ranges.

    With ``elide_apostrophe`` a token ending in an apostrophe never takes a
    trailing space, whatever its MISC says (Romance elision convention).
    """
    by_start = {m.start: m for m in mwts}
    out: list[str] = []
    i = 0
    while i < len(tokens):
        token = tokens[i]
        mwt = by_start.get(token.index)
        if mwt is not None:
            covered = tuple(t.surface for t in tokens[i : i + (mwt.end - mwt.start + 1)])
            if covered == mwt.covered:
                out.append(mwt.form)
                out.append(" " if mwt.space_after else "")
                i += mwt.end - mwt.start + 1
                continue
        out.append(token.surface)
        space = token.space_after
        if elide_apostrophe and token.surface.endswith(("'", "’")):
            space = False
        out.append(" " if space else "")
        i += 1
    return "".join(out).rstrip()


def _set_text_comment(comments, raw: str):
    updated = []
    replaced = False
    for line in comments:
        if line.startswith("# text =") or line.startswith("# text="):
            updated.append(f"# text = {raw}")
            replaced = True
        else:
            updated.append(line)
    if not replaced:
        updated.append(f"# text = {raw}")
    return tuple(updated)


def _parse_block(lines, lang: str, repair_multiroot: bool) -> AnnotatedSentence:
    comments: list[str] = []
    tokens: list[Token] = []
    mwts: list[tuple[int, int, str, str]] = []
    empties: list[EmptyNode] = []
    text: str | None = None
    for line_no, line in lines:
        if line.startswith("#"):
            comments.append(line)
            if line.startswith("# text =") or line.startswith("# text="):
                text = line.split("=", 1)[1].strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluFormatError(
                f"line {line_no}: expected 10 tab-separated columns, got {len(cols)}"
            )
        ident = cols[0]
        if "-" in ident:
            try:
                start, end = (int(p) for p in ident.split("-"))
            except ValueError:
                raise ConlluFormatError(f"line {line_no}: bad token range {ident!r}")
            mwts.append((start, end, cols[1], cols[9]))
            continue
        if "." in ident:
            anchor = ident.split(".", 1)[0]
            try:
                empties.append(EmptyNode(int(anchor), tuple(cols)))
            except ValueError:
                raise ConlluFormatError(f"line {line_no}: bad empty-node id {ident!r}")
            continue
        try:
            index = int(ident)
        except ValueError:
            raise ConlluFormatError(f"line {line_no}: bad token id {ident!r}")
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluFormatError(f"line {line_no}: bad HEAD {cols[6]!r}")
        try:
            tokens.append(
                Token(
                    index=index,
                    surface=cols[1],
                    lemma=cols[2],
                    upos=cols[3],
                    xpos=cols[4],
                    feats=MorphFeatures.parse(cols[5]),
                    head=head,
                    deprel=cols[7],
                    deps=cols[8],
                    misc=cols[9],
                )
            )
        except ConlluError as err:
            raise type(err)(f"line {line_no}: {err}")

    roots = [t.index for t in tokens if t.head == 0]
    if len(roots) > 1:
        if not repair_multiroot:
            raise TreeStructureError(
                f"{len(roots)} roots in sentence and multi-root repair disabled"
            )
        first = roots[0]
        tokens = [
            t.with_(head=first, deprel="parataxis")
            if t.head == 0 and t.index != first
            else t
            for t in tokens
        ]
    elif not roots and tokens:
        raise TreeStructureError("sentence has no root token")

    surfaces = {t.index: t.surface for t in tokens}
    mwt_objs = tuple(
        MultiwordToken(
            start,
            end,
            form,
            misc,
            covered=tuple(surfaces.get(i, "") for i in range(start, end + 1)),
        )
        for start, end, form, misc in mwts
    )
    token_tuple = tuple(tokens)
    if text is None:
        text = reconstruct_text(token_tuple, mwt_objs)
    return AnnotatedSentence(
        tokens=token_tuple,
        raw=text,
        lang=lang,
        comments=tuple(comments),
        mwts=mwt_objs,
        empty_nodes=tuple(empties),
    )


def parse_conllu(text: str, lang: str = "", repair_multiroot: bool = True):
    """Parse CoNLL-U text into a list of AnnotatedSentence."""
    sentences: list[AnnotatedSentence] = []
    block: list[tuple[int, str]] = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if line == "":
            if block:
                sentences.append(_parse_block(block, lang, repair_multiroot))
                block = []
            continue
        block.append((line_no, line))
    if block:
        sentences.append(_parse_block(block, lang, repair_multiroot))
    return sentences


def parse_conllu_file(path, lang: str = "", repair_multiroot: bool = True):
    with open(path, encoding="utf-8") as handle:
        return parse_conllu(handle.read(), lang=lang, repair_multiroot=repair_multiroot)


def serialize_conllu(sentences) -> str:
    """Serialize sentences as conformant CoNLL-U, one blank line after each."""
    lines: list[str] = []
    for sent in sentences:
        lines.extend(sent.comments)
        empties_by_anchor: dict[int, list[EmptyNode]] = {}
        for node in sent.empty_nodes:
            empties_by_anchor.setdefault(node.anchor, []).append(node)
        mwt_by_start = {m.start: m for m in sent.mwts}
        for node in empties_by_anchor.get(0, ()):
            lines.append("\t".join(node.columns))
        for token in sent.tokens:
            mwt = mwt_by_start.get(token.index)
            if mwt is not None:
                lines.append(
                    "\t".join(
                        [f"{mwt.start}-{mwt.end}", mwt.form, "_", "_", "_", "_", "_", "_", "_", mwt.misc]
                    )
                )
            lines.append(
                "\t".join(
                    [
                        str(token.index),
                        token.surface,
                        token.lemma,
                        token.upos,
                        token.xpos,
                        token.feats.to_conllu(),
                        str(token.head),
                        token.deprel,
                        token.deps,
                        token.misc,
                    ]
                )
            )
            for node in empties_by_anchor.get(token.index, ()):
                lines.append("\t".join(node.columns))
        lines.append("")
    return "\n".join(lines) + "\n" if lines else ""


def write_conllu(sentences, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_conllu(sentences))
