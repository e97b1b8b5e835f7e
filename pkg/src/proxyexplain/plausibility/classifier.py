"""
Annotation classifier: predicts whether a clinician would rate an explanation
as informative from the embeddings of the explanation and the code description
"""

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from ..data.corpus import tokenize
from ..explain.embeddings import EmbeddingTable, average_embedding
from ..utils.errors import TrainingError, ValidationError
from ..utils.file_utils import fingerprint
from ..utils.logger import create_plausibility_logger
from .config import PlausibilityConfig
from .models import AnnotationRecord


def _description(descriptions: Mapping[str, str], code: str) -> str:
    try:
        return descriptions[code]
    except KeyError:
        raise ValidationError(f"no description for code {code!r}") from None


def featurize_text(
    explanation: str, description: str, table: EmbeddingTable
) -> np.ndarray:
    """[mean embedding of the explanation, mean embedding of the description]"""
    return np.concatenate(
        [
            average_embedding(tokenize(explanation), table),
            average_embedding(tokenize(description), table),
        ]
    )


def featurize_annotation(
    record: AnnotationRecord,
    descriptions: Mapping[str, str],
    table: EmbeddingTable,
) -> np.ndarray:
    """Feature vector of length 2 * D for one annotation"""
    return featurize_text(
        record.explanation_text, _description(descriptions, record.code), table
    )


def annotation_matrix(
    records: Sequence[AnnotationRecord],
    descriptions: Mapping[str, str],
    table: EmbeddingTable,
) -> Tuple[np.ndarray, np.ndarray]:
    """(N, 2D) features and binary labels"""
    X = np.zeros((len(records), 2 * table.dim), dtype=np.float64)
    for row, record in enumerate(records):
        X[row] = featurize_annotation(record, descriptions, table)
    y = np.array([record.label for record in records], dtype=np.float64)
    return X, y


def records_fingerprint(records: Sequence[AnnotationRecord]) -> str:
    return fingerprint(
        f"{r.example_id}\t{r.code}\t{r.explanation_text}\t{r.rating}" for r in records
    )


@dataclass(frozen=True, eq=False)
class PlausibilityClassifier:
    """L2-regularized logistic regression over concatenated embeddings"""

    weights: np.ndarray
    bias: float
    dim: int
    trained_on: str = ""
    iterations: int = 0

    def __post_init__(self) -> None:
        if self.weights.shape != (2 * self.dim,):
            raise ValidationError(
                f"weight vector of length {self.weights.size}, expected {2 * self.dim}"
            )

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        return expit(np.atleast_2d(features) @ self.weights + self.bias)

    def predict_records(
        self,
        records: Sequence[AnnotationRecord],
        descriptions: Mapping[str, str],
        table: EmbeddingTable,
    ) -> np.ndarray:
        if table.dim != self.dim:
            raise ValidationError(
                f"classifier expects dimension {self.dim}, table has {table.dim}"
            )
        X, _ = annotation_matrix(records, descriptions, table)
        return self.predict_proba(X)


def fit_logistic_gd(
    X: np.ndarray, y: np.ndarray, config: Optional[PlausibilityConfig] = None
) -> Tuple[np.ndarray, float, int]:
    """
    Full-batch gradient descent on mean log-loss plus l2/2 * ||w||^2.

    The step is 1/L for the smoothness constant L of the objective, so the
    run is deterministic and monotone. Stops when the gradient norm drops
    below config.tol or after config.max_iter steps.

    Returns:
        Tuple: (weights, bias, iterations run)
    """
    config = config or PlausibilityConfig()
    n_rows = X.shape[0]
    if n_rows == 0:
        raise TrainingError("no annotations to train on")
    if np.all(y == y[0]):
        raise TrainingError(
            "annotation classifier needs both plausible and implausible examples"
        )

    augmented = np.hstack([X, np.ones((n_rows, 1))])
    spectral = float(np.linalg.norm(augmented, 2)) if augmented.size else 0.0
    step = 1.0 / (spectral**2 / (4.0 * n_rows) + config.l2_strength)

    w = np.zeros(X.shape[1], dtype=np.float64)
    b = 0.0
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        residual = expit(X @ w + b) - y
        grad_w = X.T @ residual / n_rows + config.l2_strength * w
        grad_b = float(residual.mean())
        if np.sqrt(float(grad_w @ grad_w) + grad_b * grad_b) < config.tol:
            break
        w -= step * grad_w
        b -= step * grad_b
    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        raise TrainingError("annotation classifier diverged")
    return w, b, iterations


def train_classifier(
    records: Sequence[AnnotationRecord],
    descriptions: Mapping[str, str],
    table: EmbeddingTable,
    config: Optional[PlausibilityConfig] = None,
) -> PlausibilityClassifier:
    """
    Train on every record; rating >= 1 is the positive class.

    Args:
        records: Rated explanations
        descriptions: Code to description text
        table: Word vectors shared by explanations and descriptions
        config: Penalty and stopping rule

    Returns:
        PlausibilityClassifier: Weights over [explanation, description] embeddings
    """
    config = config or PlausibilityConfig()
    X, y = annotation_matrix(records, descriptions, table)
    w, b, iterations = fit_logistic_gd(X, y, config)
    create_plausibility_logger().debug(
        f"Annotation classifier: {len(records)} records, {iterations} iterations"
    )
    return PlausibilityClassifier(
        weights=w,
        bias=b,
        dim=table.dim,
        trained_on=records_fingerprint(records),
        iterations=iterations,
    )
