"""
Correlation, ranking and classification metrics
"""

from typing import Sequence, Set, Tuple

import numpy as np
from scipy import stats

from ..utils.errors import DegenerateMetricError, ValidationError

ArrayLike = Sequence[float] | np.ndarray


def _paired(x: ArrayLike, y: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=np.float64).ravel()
    b = np.asarray(y, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValidationError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValidationError("correlations need at least two values")
    return a, b


def pearson(x: ArrayLike, y: ArrayLike) -> float:
    """
    Product-moment correlation.

    Both inputs constant is undefined and raises; exactly one constant input
    has zero covariance and returns 0.0.
    """
    a, b = _paired(x, y)
    da = a - a.mean()
    db = b - b.mean()
    sa = float(np.sqrt(np.dot(da, da)))
    sb = float(np.sqrt(np.dot(db, db)))
    if sa == 0.0 and sb == 0.0:
        raise DegenerateMetricError("undefined correlation: both inputs are constant")
    if sa == 0.0 or sb == 0.0:
        return 0.0
    r = float(np.dot(da, db)) / (sa * sb)
    return min(1.0, max(-1.0, r))


def spearman(x: ArrayLike, y: ArrayLike) -> float:
    """Pearson correlation of average ranks"""
    a, b = _paired(x, y)
    return pearson(stats.rankdata(a), stats.rankdata(b))


def kendall_tau_b(x: ArrayLike, y: ArrayLike) -> float:
    """Tie-corrected Kendall tau"""
    a, b = _paired(x, y)
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise DegenerateMetricError("undefined tau-b: all pairs tied in one input")
    tau = stats.kendalltau(a, b, variant="b")[0]
    if not np.isfinite(tau):
        raise DegenerateMetricError("undefined tau-b")
    return min(1.0, max(-1.0, float(tau)))


def roc_auc(scores: ArrayLike, labels: ArrayLike) -> float:
    """
    Probability that a random positive outranks a random negative.

    Computed from the Mann-Whitney rank sum; tied scores count one half.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise ValidationError(f"length mismatch: {s.size} scores, {y.size} labels")
    positive = y == 1
    n_pos = int(positive.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DegenerateMetricError("AUC needs both a positive and a negative label")
    ranks = stats.rankdata(s)
    u = float(ranks[positive].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def macro_auc(scores: np.ndarray, labels: np.ndarray) -> Tuple[float, int]:
    """
    Mean per-code AUC over the codes that have both classes.

    Returns:
        Tuple: (macro AUC, number of skipped degenerate codes)
    """
    s, y = _matrices(scores, labels)
    aucs = []
    skipped = 0
    for column in range(s.shape[1]):
        try:
            aucs.append(roc_auc(s[:, column], y[:, column]))
        except DegenerateMetricError:
            skipped += 1
    if not aucs:
        raise DegenerateMetricError("macro AUC undefined: every code is single-class")
    return float(np.mean(aucs)), skipped


def micro_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """AUC over all (doc, code) entries pooled"""
    s, y = _matrices(scores, labels)
    return roc_auc(s.ravel(), y.ravel())


def _matrices(scores: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.ndim != 2 or s.shape != y.shape:
        raise ValidationError(
            f"score matrix {s.shape} and label matrix {y.shape} must match"
        )
    return s, y


def f1(tp: int, fp: int, fn: int) -> float:
    """2tp / (2tp + fp + fn), 0 when undefined"""
    if min(tp, fp, fn) < 0:
        raise ValidationError("confusion counts must be non-negative")
    denominator = 2 * tp + fp + fn
    return 2.0 * tp / denominator if denominator else 0.0


def _confusion(
    predictions: np.ndarray, labels: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    p = np.asarray(predictions).astype(bool)
    y = np.asarray(labels).astype(bool)
    if p.shape != y.shape:
        raise ValidationError(f"prediction {p.shape} and label {y.shape} shapes differ")
    if p.ndim == 1:
        p, y = p[:, None], y[:, None]
    tp = np.sum(p & y, axis=0)
    fp = np.sum(p & ~y, axis=0)
    fn = np.sum(~p & y, axis=0)
    return tp, fp, fn


def macro_f1(predictions: np.ndarray, labels: np.ndarray) -> float:
    """Mean per-code F1 over all codes"""
    tp, fp, fn = _confusion(predictions, labels)
    return float(np.mean([f1(int(a), int(b), int(c)) for a, b, c in zip(tp, fp, fn)]))


def micro_f1(predictions: np.ndarray, labels: np.ndarray) -> float:
    """F1 of the pooled confusion counts"""
    tp, fp, fn = _confusion(predictions, labels)
    return f1(int(tp.sum()), int(fp.sum()), int(fn.sum()))


def precision_at_k(
    scores: np.ndarray, true_codes: Sequence[Set[int]], k: int
) -> float:
    """
    Mean over documents of the fraction of the k top-scored codes that are true.

    Args:
        scores: (n_docs, n_codes) score matrix
        true_codes: Per document, the column indices of its true codes
        k: Cut-off; ties are broken toward the lower code index

    Returns:
        float: Precision at k averaged over documents
    """
    s = np.asarray(scores, dtype=np.float64)
    if k < 1:
        raise ValidationError("k must be at least 1")
    if s.ndim != 2 or s.shape[0] != len(true_codes):
        raise ValidationError("one score row is needed per document")
    if k > s.shape[1]:
        raise ValidationError(f"k={k} exceeds the {s.shape[1]} available codes")
    if s.shape[0] == 0:
        raise ValidationError("precision at k needs at least one document")
    top = np.argsort(-s, axis=1, kind="stable")[:, :k]
    hits = [
        sum(1 for column in row if int(column) in truth) / k
        for row, truth in zip(top, true_codes)
    ]
    return float(np.mean(hits))


def agreement_rate(predictions: np.ndarray, reference: np.ndarray) -> float:
    """Share of reference-positive entries the predictions also mark positive"""
    p = np.asarray(predictions).astype(bool)
    r = np.asarray(reference).astype(bool)
    if p.shape != r.shape:
        raise ValidationError(f"prediction {p.shape} and reference {r.shape} differ")
    positives = int(r.sum())
    return float((p & r).sum()) / positives if positives else 0.0
