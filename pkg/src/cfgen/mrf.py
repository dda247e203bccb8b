"""Tree-structured MRF over (gender, number) tags of a dependency parse.

A gender intervention on the animate noun is clamped, and max-product
belief propagation finds the most likely joint re-tagging of the remaining
tokens. Unary potentials are smoothed log relative frequencies of tag
given UPOS; pairwise potentials are smoothed log relative frequencies of
(head tag, child tag) given the dependency relation. Every non-clamped
token also gets a log bonus ``beta`` on its original tag, so only tokens
under real agreement pressure flip.

Messages are passed in log space, leaves to root, then the MAP assignment
is read out root to leaves. Ties break toward a token's original tag and
then toward the lower-ordinal tag, in BFS order from the root, which makes
inference fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conllu import AnnotatedSentence, Token

Tag = tuple[str | None, str | None]
NOAGR: Tag = (None, None)

DEFAULT_SMOOTHING = 0.1
DEFAULT_ORIGINAL_TAG_BONUS = 2.0

_GENDER_ORDER = {"Masc": 0, "Fem": 1, None: 2}
_NUMBER_ORDER = {"Sing": 0, "Plur": 1, None: 2}


def token_tag(token: Token) -> Tag:
    return (token.feats.gender, token.feats.number)


def _tag_sort_key(tag: Tag):
    return (_GENDER_ORDER.get(tag[0], 3), _NUMBER_ORDER.get(tag[1], 3))


@dataclass(frozen=True)
class TagSpace:
    tags: tuple[Tag, ...]

    def __post_init__(self) -> None:
        if NOAGR not in self.tags:
            raise ValueError("tag space must contain the no-agreement tag")
        if len(set(self.tags)) != len(self.tags):
            raise ValueError("tag space contains duplicates")

    def __len__(self) -> int:
        return len(self.tags)

    def __contains__(self, tag: Tag) -> bool:
        return tag in self.tags

    def index(self, tag: Tag) -> int:
        return self.tags.index(tag)

    @classmethod
    def from_sentences(cls, sentences) -> "TagSpace":
        observed = {NOAGR}
        for sent in sentences:
            for token in sent.tokens:
                observed.add(token_tag(token))
        ordered = [NOAGR] + sorted(observed - {NOAGR}, key=_tag_sort_key)
        return cls(tuple(ordered))


@dataclass(frozen=True)
class Intervention:
    token_index: int
    gender: str
    number: str | None

    def __post_init__(self) -> None:
        if self.gender not in ("Masc", "Fem"):
            raise ValueError(f"intervention gender must be Masc or Fem, got {self.gender!r}")

    @property
    def tag(self) -> Tag:
        return (self.gender, self.number)


@dataclass
class AgreementModel:
    lang: str
    smoothing: float
    tag_space: TagSpace
    unary: dict[str, np.ndarray]
    pairwise: dict[str, np.ndarray]

    def unary_for(self, upos: str) -> np.ndarray:
        vec = self.unary.get(upos)
        if vec is None:
            # unseen UPOS: uniform, same value the count formula gives at 0
            return np.full(len(self.tag_space), -np.log(len(self.tag_space)))
        return vec

    def pairwise_for(self, deprel: str) -> np.ndarray:
        mat = self.pairwise.get(deprel)
        if mat is None:
            size = len(self.tag_space)
            return np.full((size, size), -np.log(size * size))
        return mat


def train_agreement_model(
    treebank, lang: str, smoothing: float = DEFAULT_SMOOTHING
) -> AgreementModel:
    treebank = list(treebank)
    if not treebank:
        raise ValueError("cannot train an agreement model from an empty treebank")
    if smoothing <= 0:
        raise ValueError(f"smoothing must be positive, got {smoothing}")
    space = TagSpace.from_sentences(treebank)
    size = len(space)

    unary_counts: dict[str, np.ndarray] = {}
    pair_counts: dict[str, np.ndarray] = {}
    for sent in treebank:
        for token in sent.tokens:
            vec = unary_counts.setdefault(token.upos, np.zeros(size))
            vec[space.index(token_tag(token))] += 1
            if token.head != 0:
                head = sent.token(token.head)
                mat = pair_counts.setdefault(token.deprel, np.zeros((size, size)))
                mat[space.index(token_tag(head)), space.index(token_tag(token))] += 1

    unary = {
        upos: np.log((counts + smoothing) / (counts.sum() + smoothing * size))
        for upos, counts in unary_counts.items()
    }
    pairwise = {
        deprel: np.log((counts + smoothing) / (counts.sum() + smoothing * size * size))
        for deprel, counts in pair_counts.items()
    }
    return AgreementModel(
        lang=lang, smoothing=smoothing, tag_space=space, unary=unary, pairwise=pairwise
    )


def _bfs_order(sent: AnnotatedSentence) -> list[int]:
    order = [sent.root_index]
    queue = [sent.root_index]
    children = {t.index: sent.children(t.index) for t in sent.tokens}
    while queue:
        node = queue.pop(0)
        for child in children[node]:
            order.append(child)
            queue.append(child)
    return order


def _preference_ranks(space: TagSpace, original: Tag) -> np.ndarray:
    """Lower rank wins ties: the original tag first, then tag-space order."""
    ranks = np.arange(1, len(space) + 1, dtype=float)
    if original in space:
        ranks[space.index(original)] = 0
    return ranks


def _pick(values: np.ndarray, ranks: np.ndarray) -> int:
    best = values.max()
    candidates = np.where(values == best, ranks, np.inf)
    return int(candidates.argmin())


def infer_tags(
    sent: AnnotatedSentence,
    model: AgreementModel,
    intervention: Intervention,
    beta: float = DEFAULT_ORIGINAL_TAG_BONUS,
) -> dict[int, Tag]:
    """MAP (gender, number) assignment for every token, exact on trees."""
    space = model.tag_space
    size = len(space)
    if not 1 <= intervention.token_index <= len(sent):
        raise ValueError(f"intervention index {intervention.token_index} out of range")
    if intervention.tag not in space:
        raise ValueError(f"intervention tag {intervention.tag} not in model tag space")

    ranks: dict[int, np.ndarray] = {}
    psi: dict[int, np.ndarray] = {}
    for token in sent.tokens:
        original = token_tag(token)
        ranks[token.index] = _preference_ranks(space, original)
        if token.index == intervention.token_index:
            vec = np.full(size, -np.inf)
            vec[space.index(intervention.tag)] = 0.0
        else:
            vec = model.unary_for(token.upos).copy()
            if original in space:
                vec[space.index(original)] += beta
        psi[token.index] = vec

    order = _bfs_order(sent)
    children = {t.index: sent.children(t.index) for t in sent.tokens}

    # upward pass: message from each node to its head
    messages: dict[int, np.ndarray] = {}
    stacked: dict[int, np.ndarray] = {}
    for node in reversed(order):
        vec = psi[node].copy()
        for child in children[node]:
            vec = vec + messages[child]
        stacked[node] = vec
        token = sent.token(node)
        if token.head != 0:
            pair = model.pairwise_for(token.deprel)
            messages[node] = (pair + vec[None, :]).max(axis=1)

    # downward pass: deterministic argmax readout
    assignment: dict[int, int] = {}
    root = sent.root_index
    assignment[root] = _pick(stacked[root], ranks[root])
    for node in order:
        for child in children[node]:
            pair = model.pairwise_for(sent.token(child).deprel)
            values = pair[assignment[node], :] + stacked[child]
            assignment[child] = _pick(values, ranks[child])

    return {index: space.tags[choice] for index, choice in assignment.items()}


def mark_reinflection_targets(
    sent: AnnotatedSentence,
    new_tags: dict[int, Tag],
    intervention: Intervention,
    lang: str,
) -> set[int]:
    """Token indices whose surface must be reinflected.

    Tokens whose tag changed, plus the intervened noun itself, plus (for
    languages whose models undermark determiners) every determiner headed
    by the intervened noun.
    """
    marked = {
        token.index
        for token in sent.tokens
        if new_tags[token.index] != token_tag(token)
    }
    marked.add(intervention.token_index)
    if lang in ("fr", "it"):
        for child in sent.children(intervention.token_index):
            if sent.token(child).upos == "DET":
                marked.add(child)
    return marked


def _format_tag(tag: Tag) -> str:
    if tag == NOAGR:
        return "NoAgr"
    return f"{tag[0] or 'None'}:{tag[1] or 'None'}"


def _parse_tag(text: str) -> Tag:
    if text == "NoAgr":
        return NOAGR
    gender, number = text.split(":")
    return (None if gender == "None" else gender, None if number == "None" else number)


def save_model(model: AgreementModel, path) -> None:
    """Versioned text format, sorted keys, byte-stable for identical input."""
    lines = [
        "CFGEN-MRF v1",
        f"lang {model.lang}",
        f"smoothing {model.smoothing!r}",
        "tags " + " ".join(_format_tag(t) for t in model.tag_space.tags),
    ]
    for upos in sorted(model.unary):
        for i, tag in enumerate(model.tag_space.tags):
            lines.append(f"UNARY {upos} {_format_tag(tag)} {model.unary[upos][i]!r}")
    for deprel in sorted(model.pairwise):
        for i, head_tag in enumerate(model.tag_space.tags):
            for j, child_tag in enumerate(model.tag_space.tags):
                lines.append(
                    f"PAIR {deprel} {_format_tag(head_tag)} {_format_tag(child_tag)} "
                    f"{model.pairwise[deprel][i, j]!r}"
                )
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def load_model(path) -> AgreementModel:
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0] != "CFGEN-MRF v1":
        raise ValueError(f"{path}: not a CFGEN-MRF v1 model file")
    lang = lines[1].split(" ", 1)[1]
    smoothing = float(lines[2].split(" ", 1)[1])
    space = TagSpace(tuple(_parse_tag(t) for t in lines[3].split(" ")[1:]))
    size = len(space)
    unary: dict[str, np.ndarray] = {}
    pairwise: dict[str, np.ndarray] = {}
    for line in lines[4:]:
        if not line:
            continue
        parts = line.split(" ")
        if parts[0] == "UNARY":
            _, upos, tag, value = parts
            vec = unary.setdefault(upos, np.zeros(size))
            vec[space.index(_parse_tag(tag))] = float(value)
        elif parts[0] == "PAIR":
            _, deprel, head_tag, child_tag, value = parts
            mat = pairwise.setdefault(deprel, np.zeros((size, size)))
            mat[space.index(_parse_tag(head_tag)), space.index(_parse_tag(child_tag))] = float(value)
        else:
            raise ValueError(f"{path}: unknown record {parts[0]!r}")
    return AgreementModel(
        lang=lang, smoothing=smoothing, tag_space=space, unary=unary, pairwise=pairwise
    )
