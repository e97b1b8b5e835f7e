"""
Plausibility scores: threshold calibration, bootstrap intervals, McNemar
tests and the reassignment of human annotations to models
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..data.corpus import tokenize
from ..explain.spans import linear_importances
from ..modeling.linear import LinearCodeModel
from ..utils.errors import ValidationError
from ..utils.logger import create_plausibility_logger
from ..utils.seeding import derive_seed, make_rng
from .config import PlausibilityConfig
from .models import AnnotationRecord, ModelScore

# (code, candidate tokens) -> score of the candidate under one model
CandidateScorer = Callable[[str, Sequence[str]], float]


def _positive_budget(n: int, target_rate: float) -> int:
    """Largest k with k / n <= target_rate"""
    k = int(math.floor(target_rate * n))
    if (k + 1) / n <= target_rate:
        k += 1
    while k > 0 and k / n > target_rate:
        k -= 1
    return k


def calibrate_threshold(probabilities: Sequence[float], target_rate: float) -> float:
    """
    Threshold labeling as close to target_rate of the inputs plausible as
    the ties allow, never more.

    The result is the smallest input probability t with
    count(p >= t) <= floor(target_rate * n); when even the largest value is
    too common, it is the next float above the maximum, so nothing passes.
    """
    probs = np.asarray(probabilities, dtype=np.float64).ravel()
    if probs.size == 0:
        raise ValidationError("cannot calibrate on an empty probability set")
    if not 0.0 < target_rate < 1.0:
        raise ValidationError(f"target rate must lie in (0, 1), got {target_rate}")

    budget = _positive_budget(probs.size, target_rate)
    values = np.unique(probs)[::-1]
    # counts[i] = number of probabilities >= values[i]
    counts = np.searchsorted(np.sort(-probs), -values, side="right")
    allowed = values[counts <= budget]
    if allowed.size == 0:
        return float(np.nextafter(values[0], np.inf))
    return float(allowed[-1])


def _aligned_probabilities(
    probabilities: Mapping[str, Mapping[str, float]],
) -> Tuple[List[str], Dict[str, np.ndarray]]:
    """Common item keys and each model's probabilities in that order"""
    if not probabilities:
        raise ValidationError("no models to score")
    models = list(probabilities)
    keys = sorted(probabilities[models[0]])
    expected = set(keys)
    for model in models[1:]:
        if set(probabilities[model]) != expected:
            raise ValidationError(
                f"model {model!r} covers different explanations than {models[0]!r}"
            )
    return keys, {
        model: np.array([probabilities[model][key] for key in keys], dtype=np.float64)
        for model in models
    }


def score_models(
    probabilities: Mapping[str, Mapping[str, float]], threshold: float
) -> List[ModelScore]:
    """
    Count each model's explanations with probability >= threshold.

    Args:
        probabilities: Model name to {item key: classifier probability}
        threshold: Calibrated threshold

    Returns:
        List[ModelScore]: One score per model, in input order
    """
    _, aligned = _aligned_probabilities(probabilities)
    return [
        ModelScore(model=model, score=int(np.sum(p >= threshold)), n=p.size)
        for model, p in aligned.items()
    ]


def score_sweep(
    probabilities: Mapping[str, Mapping[str, float]], rates: Sequence[float]
) -> Dict[str, Dict[str, int]]:
    """Scores at several target rates, each calibrated on the pooled probabilities"""
    _, aligned = _aligned_probabilities(probabilities)
    pooled = np.concatenate(list(aligned.values()))
    sweep: Dict[str, Dict[str, int]] = {model: {} for model in aligned}
    for rate in rates:
        threshold = calibrate_threshold(pooled, rate)
        for model, p in aligned.items():
            sweep[model][f"{rate:g}"] = int(np.sum(p >= threshold))
    return sweep


def _nearest_rank(sorted_values: np.ndarray, q: float) -> int:
    rank = math.ceil(round(q * sorted_values.size, 9))
    return int(sorted_values[min(max(rank, 1), sorted_values.size) - 1])


def bootstrap_interval(
    probabilities: Sequence[float],
    n_samples: int = 1000,
    level: float = 0.95,
    seed: int = 13,
) -> Tuple[int, int]:
    """
    Interval of the plausible count under independent Bernoulli labels.

    Each replicate labels explanation i plausible with probability p_i and
    sums the labels; the bounds are nearest-rank percentiles of the sums.
    """
    probs = np.asarray(probabilities, dtype=np.float64).ravel()
    if probs.size and (probs.min() < 0.0 or probs.max() > 1.0):
        raise ValidationError("probabilities must lie in [0, 1]")
    if n_samples < 1:
        raise ValidationError("need at least one bootstrap sample")
    if not 0.0 < level < 1.0:
        raise ValidationError(f"level must lie in (0, 1), got {level}")

    rng = make_rng(seed, "bootstrap")
    sums = np.sort((rng.random((n_samples, probs.size)) < probs).sum(axis=1))
    tail = (1.0 - level) / 2.0
    return _nearest_rank(sums, tail), _nearest_rank(sums, 1.0 - tail)


def mcnemar_exact(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """
    Exact two-sided McNemar test on paired binary outcomes.

    With b = #(a=1, b=0) and c = #(a=0, b=1), the p-value is
    min(1, 2 * P(Binomial(b + c, 1/2) <= min(b, c))).
    """
    a = np.asarray(labels_a).astype(bool)
    b_labels = np.asarray(labels_b).astype(bool)
    if a.shape != b_labels.shape:
        raise ValidationError(
            f"paired labels differ in length: {a.size} vs {b_labels.size}"
        )
    b = int(np.sum(a & ~b_labels))
    c = int(np.sum(~a & b_labels))
    if b + c == 0:
        return 1.0
    return min(1.0, 2.0 * float(stats.binom.cdf(min(b, c), b + c, 0.5)))


def pairwise_mcnemar(
    labels: Mapping[str, Sequence[int]],
) -> Dict[str, Dict[str, float]]:
    """p-value of every ordered pair of distinct models"""
    return {
        model: {
            other: mcnemar_exact(labels[model], labels[other])
            for other in labels
            if other != model
        }
        for model in labels
    }


def plausibility_scores(
    probabilities: Mapping[str, Mapping[str, float]],
    config: Optional[PlausibilityConfig] = None,
    sweep_rates: Sequence[float] = (),
) -> Tuple[float, List[ModelScore]]:
    """
    Full scoring of several models' explanations.

    The threshold is calibrated on the pooled probabilities of all models.
    Each model gets its count, a bootstrap interval seeded per model, McNemar
    p-values against the others and optional counts at sweep rates.

    Returns:
        Tuple: (threshold, scores)
    """
    config = config or PlausibilityConfig()
    logger = create_plausibility_logger()
    _, aligned = _aligned_probabilities(probabilities)
    threshold = calibrate_threshold(
        np.concatenate(list(aligned.values())), config.target_rate
    )
    labels = {model: (p >= threshold).astype(np.int8) for model, p in aligned.items()}
    p_values = pairwise_mcnemar(labels)
    sweep = score_sweep(probabilities, sweep_rates) if sweep_rates else {}

    scores = []
    for model, p in aligned.items():
        interval = bootstrap_interval(
            p,
            config.n_bootstrap,
            config.level,
            derive_seed(config.seed, "plausibility", model),
        )
        scores.append(
            ModelScore(
                model=model,
                score=int(labels[model].sum()),
                n=p.size,
                interval=interval,
                p_vs=p_values[model],
                sweep=sweep.get(model, {}),
            )
        )
        logger.info(f"{model}: {scores[-1].score}/{p.size} plausible, {interval}")
    return threshold, scores


@dataclass(frozen=True)
class CandidateSet:
    """Distinct explanation texts shown to annotators for one example"""

    example_id: str
    code: str
    candidates: Tuple[str, ...]


@dataclass(frozen=True)
class Reassignment:
    """Candidate chosen by each model per example"""

    assignments: Dict[str, Dict[str, int]]
    over_selection: int
    over_selected_examples: Tuple[str, ...]

    def chosen_text(
        self, candidate_sets: Sequence[CandidateSet], example_id: str, model: str
    ) -> str:
        by_id = {c.example_id: c for c in candidate_sets}
        return by_id[example_id].candidates[self.assignments[example_id][model]]


def candidate_sets(records: Sequence[AnnotationRecord]) -> List[CandidateSet]:
    """Group annotations by example, keeping each distinct text once in file order"""
    texts: Dict[str, List[str]] = {}
    codes: Dict[str, str] = {}
    for record in records:
        code = codes.setdefault(record.example_id, record.code)
        if code != record.code:
            raise ValidationError(
                f"example {record.example_id!r} mixes codes "
                f"{code!r} and {record.code!r}"
            )
        bucket = texts.setdefault(record.example_id, [])
        if record.explanation_text not in bucket:
            bucket.append(record.explanation_text)
    return [
        CandidateSet(example_id, codes[example_id], tuple(candidates))
        for example_id, candidates in texts.items()
    ]


def linear_candidate_scorer(model: LinearCodeModel) -> CandidateScorer:
    """Mean coefficient of the candidate's tokens for the example's code"""

    def score(code: str, tokens: Sequence[str]) -> float:
        if not tokens:
            return 0.0
        coefficients = model.coefficients[model.code_index(code)]
        importances = linear_importances(coefficients, tokens, model.vocabulary)
        return float(np.mean(importances))

    return score


def reassign_annotations(
    candidate_sets: Sequence[CandidateSet],
    scorers: Mapping[str, CandidateScorer],
) -> Reassignment:
    """
    Give each model the candidate it scores highest, per example.

    Models choose independently; ties go to the earliest candidate. Examples
    in which two or more models chose the same candidate are counted as
    over-selected.
    """
    assignments: Dict[str, Dict[str, int]] = {}
    over_selected: List[str] = []
    for candidate_set in candidate_sets:
        if not candidate_set.candidates:
            raise ValidationError(
                f"example {candidate_set.example_id!r} has no candidate explanations"
            )
        token_lists = [tokenize(text) for text in candidate_set.candidates]
        chosen: Dict[str, int] = {}
        for model, scorer in scorers.items():
            scores = np.array(
                [scorer(candidate_set.code, tokens) for tokens in token_lists]
            )
            chosen[model] = int(np.argmax(scores))
        assignments[candidate_set.example_id] = chosen
        if len(set(chosen.values())) < len(chosen):
            over_selected.append(candidate_set.example_id)

    create_plausibility_logger().info(
        f"Reassigned {len(assignments)} examples; "
        f"{len(over_selected)} with a candidate chosen by several models"
    )
    return Reassignment(assignments, len(over_selected), tuple(over_selected))


def human_scores(
    reassignment: Reassignment,
    candidate_sets: Sequence[CandidateSet],
    records: Sequence[AnnotationRecord],
) -> Dict[str, int]:
    """
    Per model, the examples whose assigned explanation was rated Informative
    or Highly informative. A text rated more than once counts with its
    highest rating.
    """
    best: Dict[Tuple[str, str], int] = {}
    for record in records:
        key = (record.example_id, record.explanation_text)
        best[key] = max(best.get(key, 0), record.rating)

    by_id = {c.example_id: c for c in candidate_sets}
    totals: Dict[str, int] = {}
    for example_id, chosen in reassignment.assignments.items():
        for model, index in chosen.items():
            text = by_id[example_id].candidates[index]
            plausible = best.get((example_id, text), 0) >= 1
            totals[model] = totals.get(model, 0) + int(plausible)
    return totals


def predicted_scores(
    reassignment: Reassignment,
    candidate_sets: Sequence[CandidateSet],
    records: Sequence[AnnotationRecord],
    probabilities: Sequence[float],
    threshold: float = 0.5,
) -> Dict[str, int]:
    """
    human_scores with the clinician's rating replaced by a classifier label.

    Args:
        reassignment: Candidate chosen by each model per example
        candidate_sets: Candidates per example, as given to the reassignment
        records: Rated explanations, aligned with probabilities
        probabilities: Held-out classifier probability of every record
        threshold: Probabilities at or above it count as plausible

    Returns:
        Dict[str, int]: Per model, examples whose assigned text is predicted
        plausible; a text held out more than once counts with its highest
        probability
    """
    values = np.asarray(probabilities, dtype=np.float64)
    if values.shape != (len(records),):
        raise ValidationError(
            f"{values.size} probabilities for {len(records)} annotation records"
        )
    best: Dict[Tuple[str, str], float] = {}
    for record, probability in zip(records, values):
        key = (record.example_id, record.explanation_text)
        best[key] = max(best.get(key, 0.0), float(probability))

    by_id = {c.example_id: c for c in candidate_sets}
    totals: Dict[str, int] = {}
    for example_id, chosen in reassignment.assignments.items():
        for model, index in chosen.items():
            text = by_id[example_id].candidates[index]
            plausible = best.get((example_id, text), 0.0) >= threshold
            totals[model] = totals.get(model, 0) + int(plausible)
    return totals
