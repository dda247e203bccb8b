"""Gender-accuracy scoring of translations against a challenge set.

The predicted gender of the primary entity is read off the translation by
projecting the entity's lexicon forms into the target text. When the
masculine and feminine forms coincide (epicene nouns), the immediately
preceding article decides; anything unresolved counts as Unknown, which is
scored as incorrect for accuracy but excluded from precision denominators.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .lexicons import AnimacyLexicon

GENDERS = ("Male", "Female")
STEREOTYPES = ("Pro", "Anti", "Neither")

DETERMINER_GENDER = {
    "fr": {
        "le": "Male", "un": "Male", "du": "Male", "au": "Male", "ce": "Male",
        "cet": "Male", "mon": "Male", "son": "Male", "ton": "Male",
        "la": "Female", "une": "Female", "cette": "Female", "ma": "Female",
        "sa": "Female", "ta": "Female",
    },
    "es": {
        "el": "Male", "un": "Male", "del": "Male", "al": "Male", "este": "Male",
        "la": "Female", "una": "Female", "esta": "Female",
    },
    "it": {
        "il": "Male", "lo": "Male", "un": "Male", "uno": "Male", "del": "Male",
        "al": "Male", "questo": "Male",
        "la": "Female", "una": "Female", "questa": "Female",
    },
}


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ChallengeItem:
    gold_gender: str
    entity_word: str
    source: str
    stereotype: str
    entity_index: int | None = None

    def __post_init__(self) -> None:
        if self.gold_gender not in GENDERS:
            raise EvaluationError(f"bad gold gender {self.gold_gender!r}")
        if self.stereotype not in STEREOTYPES:
            raise EvaluationError(f"bad stereotype {self.stereotype!r}")
        pattern = re.compile(rf"\b{re.escape(self.entity_word)}\b", re.IGNORECASE)
        if not pattern.search(self.source):
            raise EvaluationError(
                f"entity word {self.entity_word!r} does not occur in {self.source!r}"
            )


@dataclass(frozen=True)
class GenderPrediction:
    predicted: str  # Male | Female | Unknown
    matched_target_form: str | None = None

    def __post_init__(self) -> None:
        if self.predicted not in ("Male", "Female", "Unknown"):
            raise EvaluationError(f"bad prediction {self.predicted!r}")
        if self.predicted != "Unknown" and not self.matched_target_form:
            raise EvaluationError("prediction without a matched form")


def load_challenge_set(path) -> list[ChallengeItem]:
    """TSV: gold_gender, entity_index, source sentence, entity_word[, stereotype]."""
    items: list[ChallengeItem] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (4, 5):
                raise EvaluationError(
                    f"{path}: line {line_no}: expected 4 or 5 columns, got {len(parts)}"
                )
            gold, index, source, word = parts[:4]
            stereotype = parts[4] if len(parts) == 5 else "Neither"
            items.append(
                ChallengeItem(
                    gold_gender=gold,
                    entity_index=int(index),
                    source=source,
                    entity_word=word,
                    stereotype=stereotype,
                )
            )
    return items


def _preceding_word(text: str, start: int) -> str | None:
    prefix = text[:start]
    attached = re.search(r"([^\W\d_]+['’])$", prefix, re.UNICODE)
    if attached:
        return attached.group(1)
    match = re.search(r"([^\s]+)\s+$", prefix)
    if match is None:
        return None
    return match.group(1).strip("\"'«»()[],;:.!?")


def extract_predicted_gender(
    item: ChallengeItem, translation: str, lexicon: AnimacyLexicon, lang: str
) -> GenderPrediction:
    forms = lexicon.forms(item.entity_word, lang)
    if forms is None:
        raise EvaluationError(
            f"entity word {item.entity_word!r} has no {lang} entry in the animacy lexicon"
        )
    alternatives = sorted({forms.masc, forms.fem}, key=len, reverse=True)
    pattern = re.compile(
        r"\b(" + "|".join(re.escape(f) for f in alternatives) + r")\b", re.IGNORECASE
    )
    matches = list(pattern.finditer(translation))
    if not matches:
        return GenderPrediction("Unknown")

    if not forms.epicene:
        for match in matches:
            low = match.group(1).lower()
            if low == forms.masc.lower():
                return GenderPrediction("Male", match.group(1))
            if low == forms.fem.lower():
                return GenderPrediction("Female", match.group(1))
        return GenderPrediction("Unknown")

    determiner_table = DETERMINER_GENDER.get(lang, {})
    for match in matches:
        preceding = _preceding_word(translation, match.start())
        if preceding is None:
            continue
        gender = determiner_table.get(preceding.lower())
        if gender is not None:
            return GenderPrediction(gender, match.group(1))
    return GenderPrediction("Unknown")


@dataclass
class MetricsReport:
    acc: float
    pro: float
    anti: float
    delta_s: float
    delta_g: float
    f1_male: float
    f1_female: float
    confusion: dict[tuple[str, str], int]
    total: int

    def display(self) -> dict:
        return {
            "acc": round(self.acc, 1),
            "pro": round(self.pro, 1),
            "anti": round(self.anti, 1),
            "delta_s": round(self.delta_s, 1),
            "delta_g": round(self.delta_g, 1),
        }

    def to_json(self) -> str:
        payload = dict(self.display())
        payload["raw"] = {
            "acc": self.acc,
            "pro": self.pro,
            "anti": self.anti,
            "delta_s": self.delta_s,
            "delta_g": self.delta_g,
            "f1_male": self.f1_male,
            "f1_female": self.f1_female,
            "total": self.total,
            "confusion": {f"{gold}->{pred}": n for (gold, pred), n in sorted(self.confusion.items())},
        }
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)


def _subset_accuracy(rows) -> float:
    rows = list(rows)
    if not rows:
        return 0.0
    return 100.0 * sum(1 for gold, pred in rows if gold == pred) / len(rows)


def _f1(rows, gender: str) -> float:
    gold_n = sum(1 for gold, _ in rows if gold == gender)
    pred_n = sum(1 for _, pred in rows if pred == gender)
    correct = sum(1 for gold, pred in rows if gold == pred == gender)
    precision = correct / pred_n if pred_n else 0.0
    recall = correct / gold_n if gold_n else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 100.0 * 2.0 * precision * recall / (precision + recall)


def compute_metrics(items, predictions) -> MetricsReport:
    items = list(items)
    predictions = list(predictions)
    if len(items) != len(predictions):
        raise EvaluationError(
            f"{len(items)} items but {len(predictions)} predictions"
        )
    rows = [(item.gold_gender, pred.predicted) for item, pred in zip(items, predictions)]
    acc = _subset_accuracy(rows)
    pro = _subset_accuracy(
        row for item, row in zip(items, rows) if item.stereotype == "Pro"
    )
    anti = _subset_accuracy(
        row for item, row in zip(items, rows) if item.stereotype == "Anti"
    )
    f1_male = _f1(rows, "Male")
    f1_female = _f1(rows, "Female")
    confusion: dict[tuple[str, str], int] = {}
    for row in rows:
        confusion[row] = confusion.get(row, 0) + 1
    return MetricsReport(
        acc=acc,
        pro=pro,
        anti=anti,
        delta_s=pro - anti,
        delta_g=f1_male - f1_female,
        f1_male=f1_male,
        f1_female=f1_female,
        confusion=confusion,
        total=len(rows),
    )
