"""
Proxy models: per-code sparse regressors on log black-box probabilities
"""

import math
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from ..data.blackbox_io import PredictionMatrix
from ..data.corpus import (
    Document,
    FeatureVector,
    SplitAssignment,
    build_vocabulary,
    select_split,
    stack_features,
)
from ..data.models import Split
from ..utils.errors import TrainingError, ValidationError
from ..utils.logger import create_training_logger
from .config import DEFAULT_ALPHA_GRID, ExecutionConfig, TrainConfig
from .linear import LinearCodeModel, register_kind
from .manager import PerCodeTrainer
from .sgd import CodeTask, fit_linear_sgd

FeatureRows = Union[Sequence[FeatureVector], sparse.spmatrix]


@register_kind
class ProxyModel(LinearCodeModel):
    """Predicts log black-box probabilities as w.x + b per code"""

    kind = "proxy"


def log_transform(p: float, clamp_eps: float = 1e-6) -> float:
    """ln(max(p, clamp_eps)) for a probability p"""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"probability {p!r} outside [0, 1]")
    return math.log(max(p, clamp_eps))


def log_transform_array(probs: np.ndarray, clamp_eps: float = 1e-6) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64)
    if probs.size and (probs.min() < 0.0 or probs.max() > 1.0):
        raise ValidationError("probabilities must lie in [0, 1]")
    return np.log(np.maximum(probs, clamp_eps))


def _as_csr(features: FeatureRows) -> sparse.csr_matrix:
    if sparse.issparse(features):
        return sparse.csr_matrix(features, dtype=np.float64)
    vectors = list(features)
    dim = max((vector.dim for vector in vectors), default=0)
    return stack_features(vectors, dim)


def train_code_regressor(
    features: FeatureRows,
    targets: Sequence[float],
    config: TrainConfig,
    code_index: int = 0,
) -> Tuple[Dict[int, float], float]:
    """
    Fit one code's regressor on squared loss with an L1 penalty.

    Args:
        features: Training rows, as FeatureVectors or a sparse matrix
        targets: Log-space targets, one per row
        config: Optimizer settings
        code_index: Position of the code; keys the shuffling stream

    Returns:
        Tuple: (sparse coefficients, intercept)
    """
    X = _as_csr(features)
    y = np.asarray(targets, dtype=np.float64)
    if X.shape[0] == 0:
        raise TrainingError("cannot train on an empty training set")
    if y.shape != (X.shape[0],):
        raise TrainingError(f"{len(y)} targets for {X.shape[0]} feature rows")
    result = fit_linear_sgd(
        CodeTask(
            code_index=code_index,
            code=str(code_index),
            features=X,
            targets=y,
            loss="squared",
            alpha=config.alpha,
            epochs=config.epochs,
            eta0=config.eta0,
            power_t=config.power_t,
            seed=config.seed,
            stream="proxy",
            clamp_eps=config.clamp_eps,
        )
    )
    return result.coefficients, result.intercept


def train_proxy(
    corpus: Sequence[Document],
    predictions: PredictionMatrix,
    splits: SplitAssignment,
    config: Optional[TrainConfig] = None,
    execution: Optional[ExecutionConfig] = None,
) -> ProxyModel:
    """
    Train one regressor per code on the train split.

    Targets are log_transform of the black box's probabilities; the documents'
    true codes are never read.
    """
    config = config or TrainConfig()
    train_docs = select_split(corpus, splits, Split.TRAIN)
    if not train_docs:
        raise TrainingError("train split is empty")
    probs = predictions.rows_for([doc.doc_id for doc in train_docs])
    targets = log_transform_array(probs, config.clamp_eps)

    vocabulary = build_vocabulary(train_docs, config.min_doc_freq)
    model_shell = ProxyModel(
        vocabulary,
        predictions.codes,
        tuple({} for _ in predictions.codes),
        tuple(0.0 for _ in predictions.codes),
        config,
    )
    X = model_shell.featurize(train_docs)

    tasks = [
        CodeTask(
            code_index=column,
            code=code,
            features=X,
            targets=np.ascontiguousarray(targets[:, column]),
            loss="squared",
            alpha=config.alpha,
            epochs=config.epochs,
            eta0=config.eta0,
            power_t=config.power_t,
            seed=config.seed,
            stream="proxy",
            clamp_eps=config.clamp_eps,
        )
        for column, code in enumerate(predictions.codes)
    ]
    trainer = PerCodeTrainer(execution)
    results = trainer.run(
        tasks, f"proxy training (alpha={config.alpha}, {len(train_docs)} docs)"
    )
    return ProxyModel(
        vocabulary,
        predictions.codes,
        tuple(result.coefficients for result in results),
        tuple(result.intercept for result in results),
        config,
    )


def predict_log(model: ProxyModel, features: FeatureVector) -> np.ndarray:
    """w.x + b for every code"""
    return np.array(
        [
            features.dot(coefficients) + intercept
            for coefficients, intercept in zip(model.coefficients, model.intercepts)
        ]
    )


def predict_prob(model: ProxyModel, features: FeatureVector) -> np.ndarray:
    """min(exp(w.x + b), 1) for every code"""
    return np.exp(np.minimum(predict_log(model, features), 0.0))


def predict_log_documents(
    model: ProxyModel, documents: Sequence[Document]
) -> np.ndarray:
    """(n_docs, n_codes) log predictions"""
    return model.linear_scores(model.featurize(documents))


def predict_prob_documents(
    model: ProxyModel, documents: Sequence[Document]
) -> np.ndarray:
    return np.exp(np.minimum(predict_log_documents(model, documents), 0.0))


def validation_mse(
    model: ProxyModel,
    corpus: Sequence[Document],
    predictions: PredictionMatrix,
    splits: SplitAssignment,
    split: Split = Split.VALIDATION,
) -> np.ndarray:
    """Per-code MSE in log space between the proxy and the black box"""
    docs = select_split(corpus, splits, split)
    if not docs:
        raise ValidationError(f"{split.value} split is empty")
    targets = log_transform_array(
        predictions.rows_for([doc.doc_id for doc in docs]), model.config.clamp_eps
    )
    errors = predict_log_documents(model, docs) - targets
    return np.mean(errors**2, axis=0)


def grid_search_alpha(
    corpus: Sequence[Document],
    predictions: PredictionMatrix,
    splits: SplitAssignment,
    candidate_alphas: Sequence[float] = DEFAULT_ALPHA_GRID,
    config: Optional[TrainConfig] = None,
    execution: Optional[ExecutionConfig] = None,
) -> float:
    """
    Pick the alpha with the lowest validation MSE averaged over codes.

    Ties go to the larger alpha.
    """
    if not candidate_alphas:
        raise ValidationError("grid search needs at least one candidate alpha")
    if any(alpha < 0 for alpha in candidate_alphas):
        raise ValidationError("candidate alphas must be non-negative")
    logger = create_training_logger()
    base = config or TrainConfig()

    best_alpha: Optional[float] = None
    best_mse = math.inf
    for alpha in sorted(set(candidate_alphas), reverse=True):
        candidate = base.model_copy(update={"alpha": alpha})
        model = train_proxy(corpus, predictions, splits, candidate, execution)
        mse = float(np.mean(validation_mse(model, corpus, predictions, splits)))
        logger.info(f"alpha={alpha:g}: validation MSE {mse:.6g}")
        if mse < best_mse:
            best_alpha, best_mse = alpha, mse

    if best_alpha is None:
        raise TrainingError("no candidate alpha produced a finite validation MSE")
    logger.info(f"Selected alpha={best_alpha:g} (validation MSE {best_mse:.6g})")
    return best_alpha
