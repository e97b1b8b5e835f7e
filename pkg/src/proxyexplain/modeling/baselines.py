"""
Direct per-code logistic baseline trained on the true labels
"""

import math
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.special import expit

from ..data.corpus import (
    CodeSpace,
    Document,
    FeatureVector,
    SplitAssignment,
    build_vocabulary,
    label_matrix,
    select_split,
)
from ..data.models import Split
from ..utils.errors import TrainingError
from .config import ExecutionConfig, TrainConfig
from .linear import LinearCodeModel, register_kind
from .manager import PerCodeTrainer
from .sgd import CodeResult, CodeTask


@register_kind
class LogisticBaseline(LinearCodeModel):
    """sigmoid(w.x + b) per code, fitted to true labels"""

    kind = "logistic"


def _logit(rate: float, clamp_eps: float) -> float:
    rate = min(max(rate, clamp_eps), 1.0 - clamp_eps)
    return math.log(rate / (1.0 - rate))


def train_logistic(
    corpus: Sequence[Document],
    splits: SplitAssignment,
    code_space: CodeSpace,
    config: Optional[TrainConfig] = None,
    execution: Optional[ExecutionConfig] = None,
) -> LogisticBaseline:
    """
    Per-code logistic regression on bag-of-words features.

    Uses the proxy's optimizer (seeded SGD, same schedule, L1) on log-loss. A
    code whose training labels are all one class becomes an intercept-only
    model at the logit of its clamped positive rate.

    Args:
        corpus: All documents; only the train split is used
        splits: Split assignment
        code_space: Codes to model, in order
        config: Optimizer settings shared with the proxy
        execution: Worker settings

    Returns:
        LogisticBaseline: The fitted baseline
    """
    config = config or TrainConfig()
    train_docs = select_split(corpus, splits, Split.TRAIN)
    if not train_docs:
        raise TrainingError("train split is empty")
    labels = label_matrix(train_docs, code_space).astype(np.float64)

    vocabulary = build_vocabulary(train_docs, config.min_doc_freq)
    codes = code_space.codes
    shell = LogisticBaseline(
        vocabulary, codes, tuple({} for _ in codes), tuple(0.0 for _ in codes), config
    )
    X = shell.featurize(train_docs)

    coefficients: List[Dict[int, float]] = [{} for _ in codes]
    intercepts: List[float] = [0.0 for _ in codes]
    tasks: List[CodeTask] = []
    for column, code in enumerate(codes):
        y = np.ascontiguousarray(labels[:, column])
        rate = float(y.mean())
        if rate in (0.0, 1.0):
            intercepts[column] = _logit(rate, config.clamp_eps)
            continue
        tasks.append(
            CodeTask(
                code_index=column,
                code=code,
                features=X,
                targets=y,
                loss="log",
                alpha=config.alpha,
                epochs=config.epochs,
                eta0=config.eta0,
                power_t=config.power_t,
                seed=config.seed,
                stream="logistic",
                clamp_eps=config.clamp_eps,
            )
        )

    degenerate = len(codes) - len(tasks)
    trainer = PerCodeTrainer(execution)
    if degenerate:
        trainer.logger.info(
            f"{degenerate} code(s) have a single class in training; "
            "fitted as intercept-only"
        )
    results: List[CodeResult] = trainer.run(
        tasks, f"logistic training (alpha={config.alpha}, {len(train_docs)} docs)"
    )
    for result in results:
        coefficients[result.code_index] = result.coefficients
        intercepts[result.code_index] = result.intercept

    return LogisticBaseline(
        vocabulary, codes, tuple(coefficients), tuple(intercepts), config
    )


def predict_prob(model: LogisticBaseline, features: FeatureVector) -> np.ndarray:
    """sigmoid(w.x + b) for every code"""
    scores = np.array(
        [
            features.dot(coefficients) + intercept
            for coefficients, intercept in zip(model.coefficients, model.intercepts)
        ]
    )
    return np.asarray(expit(scores))


def predict_prob_documents(
    model: LogisticBaseline, documents: Sequence[Document]
) -> np.ndarray:
    """(n_docs, n_codes) probabilities"""
    return np.asarray(expit(model.linear_scores(model.featurize(documents))))
