"""Gender-counterfactual corpus generation and gender-accuracy evaluation."""

__version__ = "0.1.0"

from .conllu import AnnotatedSentence, MorphFeatures, Token, parse_conllu, serialize_conllu
from .corpus import Origin, ParallelPair
from .lexicons import AnimacyLexicon, InflectionLexicon
from .mrf import AgreementModel, Intervention, TagSpace, infer_tags, train_agreement_model
from .selection import FilterReason, FilterVerdict, GenderedSelection, filter_gendered, filter_neutral

__all__ = [
    "AnnotatedSentence",
    "MorphFeatures",
    "Token",
    "parse_conllu",
    "serialize_conllu",
    "Origin",
    "ParallelPair",
    "AnimacyLexicon",
    "InflectionLexicon",
    "AgreementModel",
    "Intervention",
    "TagSpace",
    "infer_tags",
    "train_agreement_model",
    "FilterReason",
    "FilterVerdict",
    "GenderedSelection",
    "filter_gendered",
    "filter_neutral",
]
