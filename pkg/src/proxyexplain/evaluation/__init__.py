"""
Evaluation module for ProxyExplain: metrics, reports and TSV tables
"""

from .metrics import (
    agreement_rate,
    kendall_tau_b,
    macro_auc,
    macro_f1,
    micro_auc,
    micro_f1,
    pearson,
    precision_at_k,
    roc_auc,
    spearman,
)
from .reports import (
    FaithfulnessReport,
    LabelReport,
    faithfulness_report,
    faithfulness_table,
    label_report,
    label_table,
)

__all__ = [
    "agreement_rate",
    "kendall_tau_b",
    "macro_auc",
    "macro_f1",
    "micro_auc",
    "micro_f1",
    "pearson",
    "precision_at_k",
    "roc_auc",
    "spearman",
    "FaithfulnessReport",
    "LabelReport",
    "faithfulness_report",
    "faithfulness_table",
    "label_report",
    "label_table",
]
