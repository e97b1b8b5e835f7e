"""
Tests for faithfulness and label reports and their tables
"""

import numpy as np
import pytest

from proxyexplain.evaluation.reports import (
    faithfulness_report,
    faithfulness_table,
    label_report,
    label_table,
)
from proxyexplain.utils.errors import ValidationError


def _blackbox(seed: int = 0, shape=(60, 3)) -> np.ndarray:
    probs = np.random.default_rng(seed).random(shape)
    probs[0] = 0.9
    probs[1] = 0.1
    return probs


def test_black_box_is_perfectly_faithful_to_itself():
    blackbox = _blackbox()
    report = faithfulness_report(blackbox, blackbox)
    assert report.pearson == pytest.approx(1.0)
    assert report.spearman == pytest.approx(1.0)
    assert report.kendall == pytest.approx(1.0)
    assert report.macro_auc == 1.0
    assert report.micro_auc == 1.0
    assert report.macro_f1 == 1.0
    assert report.agreement == 1.0
    assert report.n_degenerate_codes == 0


def test_noisier_candidate_is_less_faithful():
    blackbox = _blackbox()
    rng = np.random.default_rng(1)
    close = np.clip(blackbox + rng.normal(0, 0.02, blackbox.shape), 0, 1)
    far = np.clip(blackbox + rng.normal(0, 0.3, blackbox.shape), 0, 1)
    assert (
        faithfulness_report(close, blackbox).pearson
        > faithfulness_report(far, blackbox).pearson
    )


def test_faithfulness_report_checks_alignment():
    with pytest.raises(ValidationError):
        faithfulness_report(np.zeros((3, 2)), np.zeros((2, 3)))
    with pytest.raises(ValidationError):
        faithfulness_report(_blackbox(), _blackbox(), threshold=1.0)


def test_label_report_precision_cutoffs():
    rng = np.random.default_rng(2)
    labels = (rng.random((40, 20)) < 0.3).astype(int)
    labels[0], labels[1] = 1, 0
    report = label_report(rng.random((40, 20)), labels)
    assert sorted(report.precision_at_k) == [8, 15]
    assert report.precision_at_8 is not None

    narrow = label_report(rng.random((40, 3)), labels[:, :3])
    assert narrow.precision_at_k == {}
    assert narrow.precision_at_15 is None

    explicit = label_report(rng.random((40, 3)), labels[:, :3], ks=[1, 3])
    payload = explicit.to_json_dict()
    assert list(payload)[:6] == [
        "macro_auc",
        "micro_auc",
        "macro_f1",
        "micro_f1",
        "precision_at_1",
        "precision_at_3",
    ]


def test_perfect_scores_give_perfect_labels():
    labels = np.array([[1, 0], [0, 1], [1, 1], [0, 0]])
    report = label_report(labels * 0.9 + 0.05, labels, ks=[1])
    assert report.macro_auc == 1.0
    assert report.micro_f1 == 1.0


def test_faithfulness_table_orders_rows():
    blackbox = _blackbox()
    reports = {
        "Extra": faithfulness_report(blackbox * 0.5, blackbox),
        "Proxy": faithfulness_report(blackbox, blackbox),
        "Logistic": faithfulness_report(blackbox**2, blackbox),
    }
    lines = faithfulness_table(reports).splitlines()
    assert lines[0].split("\t") == [
        "model",
        "spearman",
        "pearson",
        "kendall",
        "macro_auc",
        "micro_auc",
        "macro_f1",
        "micro_f1",
    ]
    assert [line.split("\t")[0] for line in lines[1:]] == ["Logistic", "Proxy", "Extra"]
    assert lines[2].split("\t")[2] == "1.000"


def test_label_table_has_one_column_per_model():
    labels = np.array([[1, 0], [0, 1], [1, 1], [0, 0]])
    scores = labels * 0.9 + 0.05
    reports = {
        "Black box": label_report(scores, labels, ks=[1]),
        "Proxy": label_report(scores, labels, ks=[1]),
        "Logistic": label_report(scores[::-1], labels, ks=[1]),
    }
    lines = label_table(reports).splitlines()
    assert lines[0] == "metric\tLogistic\tProxy\tBlack box"
    assert [line.split("\t")[0] for line in lines[1:]] == [
        "Macro AUC",
        "Micro AUC",
        "Macro F1",
        "Micro F1",
        "Prec @ 1",
    ]
    assert lines[1].split("\t")[2:] == ["1.000", "1.000"]
