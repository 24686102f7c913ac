"""Phrase-aware paraphrase identification with TF-KLD / TF-KLD-KNN unit weighting."""

from phrasekld.errors import MalformedInputError, ValidationError
from phrasekld.lexicon import (
    ContinuityClass,
    PhraseLexicon,
    classify_continuity,
    count_distance_profile,
    load_lexicon,
)
from phrasekld.reformat import reformat_sentence
from phrasekld.embeddings import EmbeddingTable, cosine, load_embeddings, nearest_neighbors
from phrasekld.weighting import (
    LabeledPair,
    UnitWeightModel,
    WeightResolver,
    bernoulli_kld,
    fit_no_weight,
    fit_tf_idf,
    fit_tf_kld,
    resolve_weight,
)
from phrasekld.representation import mt_metrics, pair_feature_vector, sentence_vector
from phrasekld.classifier import LinearModel, predict, train_linear, tune
from phrasekld.evaluation import EvalReport, approx_randomization, evaluate

__all__ = [
    "ContinuityClass",
    "EmbeddingTable",
    "EvalReport",
    "LabeledPair",
    "LinearModel",
    "MalformedInputError",
    "PhraseLexicon",
    "UnitWeightModel",
    "ValidationError",
    "WeightResolver",
    "approx_randomization",
    "bernoulli_kld",
    "classify_continuity",
    "cosine",
    "count_distance_profile",
    "evaluate",
    "fit_no_weight",
    "fit_tf_idf",
    "fit_tf_kld",
    "load_embeddings",
    "load_lexicon",
    "mt_metrics",
    "nearest_neighbors",
    "pair_feature_vector",
    "predict",
    "reformat_sentence",
    "resolve_weight",
    "sentence_vector",
    "train_linear",
    "tune",
]
