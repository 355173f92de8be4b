"""Partial parsing toolkit: structural tags over POS-tagged text.

Chunks (NPs, PPs, APs) and their internal structure are encoded as one
structural tag per token; decoding is a second-order Viterbi search
whose contextual probabilities come from a conditional maximum-entropy
model or an interpolated trigram baseline.
"""

from .codec import DecodeResult, Repair, decode_tags, encode_tree
from .corpus import (
    Corpus,
    extract_chunks,
    load_corpus,
    make_folds,
    parse_bracketed,
    read_tagged,
    save_corpus,
    write_tagged,
)
from .decoder import (
    InterpolationScorer,
    MaxentScorer,
    StateInventory,
    decode_sequence,
    decode_span,
    viterbi_decode,
)
from .errors import (
    ChunkletError,
    DepthBoundError,
    FormatError,
    NotTrainedError,
    UnknownFutureError,
    VocabularyError,
)
from .estimators import InterpolatedPartialParser, MaxentPartialParser
from .evaluation import EvalReport, cross_validate, evaluate_corpus, learning_curve
from .features import FeaturePattern, FeatureSet, default_patterns, extract_features
from .maxent import MaxentModel, TrainResult, fit_maxent
from .model_io import ParserModel, load_model, save_model
from .ngram import InterpolatedTrigramModel, deleted_interpolation
from .synthetic import GrammarConfig, generate_corpus
from .tags import StructuralTag, TagSequence
from .trees import ChunkTree, Leaf, Node, validate_tree

__version__ = "0.1.0"

__all__ = [
    "ChunkTree",
    "ChunkletError",
    "Corpus",
    "DecodeResult",
    "DepthBoundError",
    "EvalReport",
    "FeaturePattern",
    "FeatureSet",
    "FormatError",
    "GrammarConfig",
    "InterpolatedPartialParser",
    "InterpolatedTrigramModel",
    "InterpolationScorer",
    "Leaf",
    "MaxentModel",
    "MaxentPartialParser",
    "MaxentScorer",
    "Node",
    "NotTrainedError",
    "ParserModel",
    "Repair",
    "StateInventory",
    "StructuralTag",
    "TagSequence",
    "TrainResult",
    "UnknownFutureError",
    "VocabularyError",
    "cross_validate",
    "decode_sequence",
    "decode_span",
    "decode_tags",
    "default_patterns",
    "deleted_interpolation",
    "encode_tree",
    "evaluate_corpus",
    "extract_chunks",
    "extract_features",
    "fit_maxent",
    "generate_corpus",
    "learning_curve",
    "load_corpus",
    "load_model",
    "make_folds",
    "parse_bracketed",
    "read_tagged",
    "save_corpus",
    "save_model",
    "validate_tree",
    "viterbi_decode",
    "write_tagged",
]
