"""
Leave-one-out evaluation of the annotation classifier
"""

import time
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from ..evaluation.metrics import roc_auc
from ..explain.embeddings import EmbeddingTable
from ..utils.errors import TrainingError, ValidationError
from ..utils.logger import create_plausibility_logger
from .classifier import annotation_matrix, fit_logistic_gd
from .config import PlausibilityConfig
from .models import AnnotationRecord


class Protocol(str, Enum):
    """E1 holds out whole examples; E2 holds out single explanations"""

    E1 = "e1"
    E2 = "e2"


@dataclass(frozen=True)
class Fold:
    held_out: Tuple[int, ...]
    train: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class LooResult:
    protocol: Protocol
    accuracy: float
    auc: float
    probabilities: np.ndarray
    n_folds: int

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "protocol": self.protocol.value,
            "accuracy": self.accuracy,
            "auc": self.auc,
            "n_folds": self.n_folds,
            "probabilities": [float(p) for p in self.probabilities],
        }


def loo_folds(records: Sequence[AnnotationRecord], protocol: Protocol) -> List[Fold]:
    """
    Held-out and training indices of every fold.

    E1 holds out all records of one example per fold, examples in order of
    first appearance. E2 holds out one record per fold and also drops from
    training any record of the same example with the same explanation text.
    """
    protocol = Protocol(protocol)
    everything = range(len(records))
    folds: List[Fold] = []

    if protocol is Protocol.E1:
        groups: Dict[str, List[int]] = {}
        for index, record in enumerate(records):
            groups.setdefault(record.example_id, []).append(index)
        if len(groups) < 2:
            raise ValidationError("E1 needs records from at least two examples")
        for members in groups.values():
            held = set(members)
            folds.append(
                Fold(tuple(members), tuple(i for i in everything if i not in held))
            )
        return folds

    if len({record.explanation_text for record in records}) < 2:
        raise ValidationError("E2 needs at least two distinct explanations")
    for index, record in enumerate(records):
        key = (record.example_id, record.explanation_text)
        train = tuple(
            i
            for i in everything
            if i != index
            and (records[i].example_id, records[i].explanation_text) != key
        )
        folds.append(Fold((index,), train))
    return folds


def loo_evaluate(
    records: Sequence[AnnotationRecord],
    descriptions: Mapping[str, str],
    table: EmbeddingTable,
    protocol: Protocol = Protocol.E2,
    config: Optional[PlausibilityConfig] = None,
) -> LooResult:
    """
    Held-out accuracy, AUC and per-record probabilities under a LOO protocol.

    A held-out record counts as correct when its probability is on the same
    side of 0.5 as its binary label. Every fold must train on both classes;
    a fold that does not aborts the evaluation with a TrainingError naming
    the held-out examples.
    """
    config = config or PlausibilityConfig()
    protocol = Protocol(protocol)
    logger = create_plausibility_logger()
    folds = loo_folds(records, protocol)
    X, y = annotation_matrix(records, descriptions, table)

    probabilities = np.zeros(len(records), dtype=np.float64)
    logger.start_session(f"{protocol.value} leave-one-out", total=len(folds))
    for done, fold in enumerate(folds, start=1):
        started = time.time()
        train = list(fold.train)
        held = list(fold.held_out)
        try:
            w, b, _ = fit_logistic_gd(X[train], y[train], config)
        except TrainingError as e:
            held_ids = sorted({records[i].example_id for i in held})
            logger.log_item_failed(f"fold {done}", e)
            raise TrainingError(
                f"{protocol.value} fold {done} holding out "
                f"{', '.join(held_ids)}: {e}"
            ) from e
        probabilities[held] = expit(X[held] @ w + b)
        logger.log_item_processed(f"fold {done}", time.time() - started)
    logger.log_session_summary()

    predicted = (probabilities >= 0.5).astype(np.float64)
    accuracy = float(np.mean(predicted == y))
    auc = roc_auc(probabilities, y.astype(np.int8))
    logger.info(
        f"{protocol.value}: accuracy {accuracy:.3f}, AUC {auc:.3f} "
        f"over {len(folds)} folds"
    )
    return LooResult(protocol, accuracy, auc, probabilities, len(folds))
