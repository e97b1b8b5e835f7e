"""
Plausibility module for ProxyExplain

Annotation classifier over explanation and code-description embeddings,
its leave-one-out protocols, and the statistics used to score models.
"""

from .classifier import PlausibilityClassifier, featurize_annotation, train_classifier
from .config import PlausibilityConfig
from .models import AnnotationRecord, ModelScore, load_annotations, save_annotations
from .protocols import Fold, LooResult, Protocol, loo_evaluate, loo_folds
from .scoring import (
    CandidateSet,
    Reassignment,
    bootstrap_interval,
    calibrate_threshold,
    candidate_sets,
    human_scores,
    linear_candidate_scorer,
    mcnemar_exact,
    pairwise_mcnemar,
    plausibility_scores,
    reassign_annotations,
    score_models,
    score_sweep,
)

__all__ = [
    "PlausibilityClassifier",
    "featurize_annotation",
    "train_classifier",
    "PlausibilityConfig",
    "AnnotationRecord",
    "ModelScore",
    "load_annotations",
    "save_annotations",
    "Fold",
    "LooResult",
    "Protocol",
    "loo_evaluate",
    "loo_folds",
    "CandidateSet",
    "Reassignment",
    "bootstrap_interval",
    "calibrate_threshold",
    "candidate_sets",
    "human_scores",
    "linear_candidate_scorer",
    "mcnemar_exact",
    "pairwise_mcnemar",
    "plausibility_scores",
    "reassign_annotations",
    "score_models",
    "score_sweep",
]
