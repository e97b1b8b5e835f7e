"""
Standalone per-code SGD trainers usable from a ProcessPoolExecutor
"""

import math
import time
from dataclasses import dataclass
from typing import Dict, Literal

import numpy as np
from scipy import sparse
from scipy.special import expit

from ..utils.errors import TrainingError
from ..utils.seeding import make_rng

Loss = Literal["squared", "log"]

PRUNE_BELOW = 1e-12


@dataclass(frozen=True)
class CodeTask:
    """Everything needed to train one code, picklable"""

    code_index: int
    code: str
    features: sparse.csr_matrix
    targets: np.ndarray
    loss: Loss
    alpha: float
    epochs: int
    eta0: float
    power_t: float
    seed: int
    stream: str
    clamp_eps: float = 1e-6


@dataclass(frozen=True)
class CodeResult:
    """Sparse coefficients and intercept of one trained code"""

    code_index: int
    code: str
    coefficients: Dict[int, float]
    intercept: float
    train_loss: float
    seconds: float


def _initial_intercept(targets: np.ndarray, loss: Loss, clamp_eps: float) -> float:
    if loss == "squared":
        return float(targets.mean())
    rate = min(max(float(targets.mean()), clamp_eps), 1.0 - clamp_eps)
    return math.log(rate / (1.0 - rate))


def fit_linear_sgd(task: CodeTask) -> CodeResult:
    """
    Per-sample SGD for one code with an L1 penalty.

    Features are centered internally and the intercept starts at the optimum
    of the intercept-only model, so a constant target needs no updates. Each
    step takes a gradient step at rate eta0 / t**power_t (t from 1), then
    soft-thresholds the weights by rate * alpha, which is the L1 subgradient
    step clipped so weights do not cross zero. The visiting order is a fresh
    permutation every epoch drawn from a stream derived from (seed, code index).

    Args:
        task: Design matrix, targets and optimizer settings for the code

    Returns:
        CodeResult: Coefficients with |w| >= 1e-12 and the intercept of w.x + b
    """
    start = time.time()
    X = sparse.csr_matrix(task.features, dtype=np.float64)
    y = np.asarray(task.targets, dtype=np.float64)
    n, dim = X.shape
    if n == 0:
        raise TrainingError(f"code {task.code!r}: empty training set")
    if y.shape != (n,):
        raise TrainingError(
            f"code {task.code!r}: {y.shape[0]} targets for {n} training rows"
        )

    mean = np.asarray(X.mean(axis=0)).ravel()
    w = np.zeros(dim)
    b = _initial_intercept(y, task.loss, task.clamp_eps)
    rng = make_rng(task.seed, task.stream, task.code_index)
    indptr, indices, data = X.indptr, X.indices, X.data
    squared = task.loss == "squared"

    t = 0
    for epoch in range(task.epochs):
        for i in rng.permutation(n):
            t += 1
            eta = task.eta0 / t**task.power_t
            cols = indices[indptr[i] : indptr[i + 1]]
            vals = data[indptr[i] : indptr[i + 1]]
            margin = float(vals @ w[cols]) - float(mean @ w) + b
            if squared:
                g = margin - y[i]
            else:
                g = float(expit(margin)) - y[i]
            if g != 0.0:
                step = eta * g
                w += step * mean
                w[cols] -= step * vals
                b -= step
            if task.alpha > 0.0:
                np.copysign(np.maximum(np.abs(w) - eta * task.alpha, 0.0), w, out=w)
        if not (math.isfinite(b) and np.all(np.isfinite(w))):
            raise TrainingError(
                f"code {task.code!r}: training diverged in epoch {epoch + 1}; "
                f"lower eta0 (now {task.eta0}) or use binary features"
            )

    intercept = b - float(mean @ w)
    kept = np.flatnonzero(np.abs(w) >= PRUNE_BELOW)
    coefficients = {int(j): float(w[j]) for j in kept}

    scores = np.asarray(X @ w).ravel() + intercept
    if squared:
        train_loss = float(np.mean((scores - y) ** 2))
    else:
        p = np.clip(expit(scores), 1e-15, 1.0 - 1e-15)
        train_loss = float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))

    return CodeResult(
        task.code_index,
        task.code,
        coefficients,
        float(intercept),
        train_loss,
        time.time() - start,
    )
