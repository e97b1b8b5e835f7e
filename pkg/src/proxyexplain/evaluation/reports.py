"""
Faithfulness and label-quality reports and their TSV tables
"""

from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..utils.errors import ValidationError
from ..utils.logger import create_evaluation_logger
from .metrics import (
    agreement_rate,
    kendall_tau_b,
    macro_auc,
    macro_f1,
    micro_auc,
    micro_f1,
    pearson,
    precision_at_k,
    spearman,
)

DEFAULT_KS = (8, 15)

# fixed row/column order of the printed tables
TABLE_ORDER = ("Logistic", "Proxy", "Black box")


class FaithfulnessReport(BaseModel):
    """How closely a candidate's outputs track the black box's"""

    model_config = ConfigDict(frozen=True)

    spearman: float = Field(..., ge=-1.0, le=1.0)
    pearson: float = Field(..., ge=-1.0, le=1.0)
    kendall: float = Field(..., ge=-1.0, le=1.0)
    macro_auc: float = Field(..., ge=0.0, le=1.0)
    micro_auc: float = Field(..., ge=0.0, le=1.0)
    macro_f1: float = Field(..., ge=0.0, le=1.0)
    micro_f1: float = Field(..., ge=0.0, le=1.0)
    agreement: float = Field(
        ..., ge=0.0, le=1.0, description="Black-box positives also predicted"
    )
    n_degenerate_codes: int = Field(..., ge=0, description="Codes skipped by macro AUC")
    threshold: float = Field(..., gt=0.0, lt=1.0)


class LabelReport(BaseModel):
    """Quality of a candidate's outputs against the true codes"""

    model_config = ConfigDict(frozen=True)

    macro_auc: float = Field(..., ge=0.0, le=1.0)
    micro_auc: float = Field(..., ge=0.0, le=1.0)
    macro_f1: float = Field(..., ge=0.0, le=1.0)
    micro_f1: float = Field(..., ge=0.0, le=1.0)
    precision_at_k: Dict[int, float] = Field(default_factory=dict)
    n_degenerate_codes: int = Field(..., ge=0)
    threshold: float = Field(..., gt=0.0, lt=1.0)

    @property
    def precision_at_8(self) -> Optional[float]:
        return self.precision_at_k.get(8)

    @property
    def precision_at_15(self) -> Optional[float]:
        return self.precision_at_k.get(15)

    def to_json_dict(self) -> Dict[str, Any]:
        """Flat JSON form with one precision_at_<k> key per cut-off"""
        payload: Dict[str, Any] = {
            "macro_auc": self.macro_auc,
            "micro_auc": self.micro_auc,
            "macro_f1": self.macro_f1,
            "micro_f1": self.micro_f1,
        }
        for k, value in sorted(self.precision_at_k.items()):
            payload[f"precision_at_{k}"] = value
        payload["n_degenerate_codes"] = self.n_degenerate_codes
        payload["threshold"] = self.threshold
        return payload


def _aligned(candidate: np.ndarray, reference: np.ndarray) -> None:
    if np.shape(candidate) != np.shape(reference) or np.ndim(candidate) != 2:
        raise ValidationError(
            f"candidate {np.shape(candidate)} and reference {np.shape(reference)} "
            "matrices are not aligned"
        )


def faithfulness_report(
    candidate_probs: np.ndarray,
    blackbox_probs: np.ndarray,
    threshold: float = 0.5,
) -> FaithfulnessReport:
    """
    Compare a candidate's probabilities with the black box's on the same entries.

    Correlations pool every (doc, code) value. The black box thresholded at
    `threshold` supplies pseudo-labels for the AUC and F1 fields; the
    candidate's F1 predictions use the same threshold.
    """
    candidate = np.asarray(candidate_probs, dtype=np.float64)
    blackbox = np.asarray(blackbox_probs, dtype=np.float64)
    _aligned(candidate, blackbox)
    if not 0.0 < threshold < 1.0:
        raise ValidationError(f"threshold must lie in (0, 1), got {threshold}")

    pseudo_labels = (blackbox >= threshold).astype(np.int8)
    predicted = (candidate >= threshold).astype(np.int8)
    macro, skipped = macro_auc(candidate, pseudo_labels)
    return FaithfulnessReport(
        spearman=spearman(candidate.ravel(), blackbox.ravel()),
        pearson=pearson(candidate.ravel(), blackbox.ravel()),
        kendall=kendall_tau_b(candidate.ravel(), blackbox.ravel()),
        macro_auc=macro,
        micro_auc=micro_auc(candidate, pseudo_labels),
        macro_f1=macro_f1(predicted, pseudo_labels),
        micro_f1=micro_f1(predicted, pseudo_labels),
        agreement=agreement_rate(predicted, pseudo_labels),
        n_degenerate_codes=skipped,
        threshold=threshold,
    )


def label_report(
    candidate_probs: np.ndarray,
    true_labels: np.ndarray,
    ks: Optional[Sequence[int]] = None,
    threshold: float = 0.5,
) -> LabelReport:
    """
    Evaluate a candidate against ground-truth codes.

    Args:
        candidate_probs: (n_docs, n_codes) probabilities
        true_labels: (n_docs, n_codes) binary matrix
        ks: Precision cut-offs; by default 8 and 15 where the code count allows
        threshold: Probability at which a code counts as predicted

    Returns:
        LabelReport: AUCs, F1s and precision at k
    """
    candidate = np.asarray(candidate_probs, dtype=np.float64)
    labels = np.asarray(true_labels).astype(np.int8)
    _aligned(candidate, labels)
    if not 0.0 < threshold < 1.0:
        raise ValidationError(f"threshold must lie in (0, 1), got {threshold}")

    n_codes = candidate.shape[1]
    if ks is None:
        ks = [k for k in DEFAULT_KS if k <= n_codes]
        if len(ks) < len(DEFAULT_KS):
            create_evaluation_logger().info(
                f"Only {n_codes} codes; precision reported at k in {ks or 'none'}"
            )
    true_sets = [set(np.flatnonzero(row).tolist()) for row in labels]
    predicted = (candidate >= threshold).astype(np.int8)
    macro, skipped = macro_auc(candidate, labels)
    return LabelReport(
        macro_auc=macro,
        micro_auc=micro_auc(candidate, labels),
        macro_f1=macro_f1(predicted, labels),
        micro_f1=micro_f1(predicted, labels),
        precision_at_k={k: precision_at_k(candidate, true_sets, k) for k in ks},
        n_degenerate_codes=skipped,
        threshold=threshold,
    )


def _ordered_names(names: Sequence[str]) -> List[str]:
    def rank(item: tuple[int, str]) -> tuple[int, int]:
        position, name = item
        if name in TABLE_ORDER:
            return (TABLE_ORDER.index(name), position)
        return (len(TABLE_ORDER), position)

    return [name for _, name in sorted(enumerate(names), key=rank)]


def faithfulness_table(reports: Mapping[str, FaithfulnessReport]) -> str:
    """TSV with one row per model: Logistic, Proxy, then any others"""
    columns = (
        "spearman",
        "pearson",
        "kendall",
        "macro_auc",
        "micro_auc",
        "macro_f1",
        "micro_f1",
    )
    lines = ["\t".join(("model",) + columns)]
    for name in _ordered_names(list(reports)):
        report = reports[name]
        lines.append(
            "\t".join([name] + [f"{getattr(report, column):.3f}" for column in columns])
        )
    return "\n".join(lines) + "\n"


def label_table(reports: Mapping[str, LabelReport]) -> str:
    """TSV with one row per metric and one column per model"""
    names = _ordered_names(list(reports))
    rows = [
        ("Macro AUC", lambda r: r.macro_auc),
        ("Micro AUC", lambda r: r.micro_auc),
        ("Macro F1", lambda r: r.macro_f1),
        ("Micro F1", lambda r: r.micro_f1),
    ]
    ks = sorted({k for report in reports.values() for k in report.precision_at_k})
    lines = ["\t".join(["metric"] + names)]
    for label, getter in rows:
        lines.append("\t".join([label] + [f"{getter(reports[n]):.3f}" for n in names]))
    for k in ks:
        cells = []
        for name in names:
            value = reports[name].precision_at_k.get(k)
            cells.append("" if value is None else f"{value:.3f}")
        lines.append("\t".join([f"Prec @ {k}"] + cells))
    return "\n".join(lines) + "\n"
