"""
Data module for ProxyExplain

This module provides:
- Tokenization, vocabularies and bag-of-words features
- Corpus, split and code-description files
- Black-box prediction and importance-dump files
- The synthetic corpus with its planted log-linear black box
"""

from .blackbox_io import (
    ImportanceDump,
    PredictionMatrix,
    binarize,
    load_importance_dump,
    load_predictions,
    save_importance_dump,
    save_predictions,
)
from .config import SynthConfig
from .corpus import (
    CodeSpace,
    Document,
    FeatureVector,
    SplitAssignment,
    Vocabulary,
    build_vocabulary,
    featurize,
    featurize_many,
    label_matrix,
    load_code_descriptions,
    load_corpus,
    load_splits,
    select_split,
    tokenize,
)
from .models import Split
from .synth import PlantedModel, SyntheticCorpus, emit_predictions, generate_corpus

__all__ = [
    "ImportanceDump",
    "PredictionMatrix",
    "binarize",
    "load_importance_dump",
    "load_predictions",
    "save_importance_dump",
    "save_predictions",
    "SynthConfig",
    "CodeSpace",
    "Document",
    "FeatureVector",
    "SplitAssignment",
    "Vocabulary",
    "build_vocabulary",
    "featurize",
    "featurize_many",
    "label_matrix",
    "load_code_descriptions",
    "load_corpus",
    "load_splits",
    "select_split",
    "tokenize",
    "Split",
    "PlantedModel",
    "SyntheticCorpus",
    "emit_predictions",
    "generate_corpus",
]
