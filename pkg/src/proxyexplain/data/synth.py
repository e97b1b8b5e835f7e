"""
Synthetic corpora with a planted, exactly log-linear black box
"""

import json
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pydantic

from ..utils.errors import ModelFileError, ValidationError
from ..utils.file_utils import PathLike, write_text_atomic
from ..utils.logger import create_data_logger
from ..utils.seeding import make_rng
from .blackbox_io import PredictionMatrix
from .config import SynthConfig
from .corpus import (
    CodeSpace,
    Document,
    FeatureVector,
    SplitAssignment,
    Vocabulary,
    featurize_many,
)
from .models import Split

PLANTED_FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class PlantedModel:
    """Per-code sparse weights and intercepts of the synthetic black box"""

    vocabulary: Vocabulary
    codes: Tuple[str, ...]
    weights: Tuple[Mapping[int, float], ...]
    intercepts: Tuple[float, ...]
    noise_sd: float
    seed: int

    def dense_weights(self) -> np.ndarray:
        """(V, n_codes) weight matrix"""
        dense = np.zeros((len(self.vocabulary), len(self.codes)))
        for column, weights in enumerate(self.weights):
            for index, value in weights.items():
                dense[index, column] = value
        return dense

    def code_index(self, code: str) -> int:
        try:
            return self.codes.index(code)
        except ValueError:
            raise ValidationError(f"planted model has no code {code!r}") from None


@dataclass(frozen=True, eq=False)
class SyntheticCorpus:
    """Everything generate_corpus produces"""

    documents: List[Document]
    code_space: CodeSpace
    splits: SplitAssignment
    planted: PlantedModel


def zipf_mandelbrot(vocab_size: int, offset: float) -> np.ndarray:
    """Token probabilities proportional to 1 / (rank + offset), ranks from 1"""
    ranks = np.arange(1, vocab_size + 1, dtype=np.float64)
    weights = 1.0 / (ranks + offset)
    return weights / weights.sum()


def _token_names(vocab_size: int) -> List[str]:
    width = max(4, len(str(vocab_size)))
    return [f"tok{rank:0{width}d}" for rank in range(1, vocab_size + 1)]


def _noise(model: PlantedModel, doc_id: str, code: str) -> float:
    if model.noise_sd == 0.0:
        return 0.0
    rng = make_rng(model.seed, "synth-noise", doc_id, code)
    return float(rng.normal(0.0, model.noise_sd))


def planted_predict(
    model: PlantedModel,
    features: FeatureVector,
    code: str,
    doc_id: Optional[str] = None,
) -> float:
    """
    Planted probability exp(min(w.x + b + noise, 0)) of one (doc, code) pair.

    Args:
        model: Planted model
        features: Counts over the planted vocabulary
        code: Code to score
        doc_id: Keys the noise draw; required when the model is noisy

    Returns:
        float: Probability in (0, 1]
    """
    column = model.code_index(code)
    score = features.dot(model.weights[column]) + model.intercepts[column]
    if model.noise_sd > 0.0:
        if doc_id is None:
            raise ValidationError("a noisy planted model needs the doc_id")
        score += _noise(model, doc_id, code)
    return math.exp(min(score, 0.0))


def planted_log_scores(
    model: PlantedModel, documents: Sequence[Document]
) -> np.ndarray:
    """Noise-free w.x + b for every (doc, code)"""
    features = featurize_many(documents, model.vocabulary)
    return np.asarray(features @ model.dense_weights()) + np.asarray(model.intercepts)


def emit_predictions(
    model: PlantedModel, corpus: Sequence[Document]
) -> PredictionMatrix:
    """Apply the planted model to every (doc, code) pair"""
    scores = planted_log_scores(model, corpus)
    if model.noise_sd > 0.0:
        for row, doc in enumerate(corpus):
            for column, code in enumerate(model.codes):
                scores[row, column] += _noise(model, doc.doc_id, code)
    probs = np.exp(np.minimum(scores, 0.0))
    return PredictionMatrix(tuple(doc.doc_id for doc in corpus), model.codes, probs)


def _assign_splits(config: SynthConfig, doc_ids: Sequence[str]) -> SplitAssignment:
    n = len(doc_ids)
    n_validation = max(1, n // 10)
    n_train = min(max(1, (7 * n) // 10), n - n_validation - 1)
    order = make_rng(config.seed, "synth-splits").permutation(n)
    split_of: Dict[int, Split] = {}
    for rank, position in enumerate(order):
        if rank < n_train:
            split_of[int(position)] = Split.TRAIN
        elif rank < n_train + n_validation:
            split_of[int(position)] = Split.VALIDATION
        else:
            split_of[int(position)] = Split.TEST
    return SplitAssignment({doc_id: split_of[i] for i, doc_id in enumerate(doc_ids)})


def _plant_model(
    config: SynthConfig,
    vocabulary: Vocabulary,
    codes: Sequence[str],
    token_docs: Sequence[Document],
) -> PlantedModel:
    pool = min(config.support_pool, len(vocabulary))
    k = min(config.support_size, pool)
    raw_weights: List[Dict[int, float]] = []
    intercepts: List[float] = []
    for code_index in range(len(codes)):
        rng = make_rng(config.seed, "synth-model", code_index)
        support = np.sort(rng.choice(pool, size=k, replace=False))
        values = rng.uniform(0.5, 1.5, size=k)
        raw_weights.append({int(i): float(v) for i, v in zip(support, values)})
        intercepts.append(float(rng.uniform(*config.intercept_range)))

    unscaled = PlantedModel(
        vocabulary,
        tuple(codes),
        tuple(raw_weights),
        tuple(intercepts),
        0.0,
        config.seed,
    )
    raw_scores = planted_log_scores(unscaled, token_docs) - np.asarray(intercepts)

    # rescale so the largest score over the corpus sits at -clamp_margin
    weights: List[Mapping[int, float]] = []
    for column, raw in enumerate(raw_weights):
        top = float(raw_scores[:, column].max())
        scale = (-config.clamp_margin - intercepts[column]) / top if top > 0 else 1.0
        weights.append({index: value * scale for index, value in raw.items()})
    return PlantedModel(
        vocabulary,
        tuple(codes),
        tuple(weights),
        tuple(intercepts),
        config.noise_sd,
        config.seed,
    )


def generate_corpus(
    seed: int = 13,
    vocab_size: int = 500,
    n_docs: int = 2000,
    doc_len_range: Tuple[int, int] = (50, 70),
    n_codes: int = 20,
    noise_sd: float = 0.0,
    config: Optional[SynthConfig] = None,
) -> SyntheticCorpus:
    """
    Generate a synthetic corpus, its code space, splits and planted model.

    Tokens follow a Zipf-Mandelbrot distribution over `tok0001`, `tok0002`, ...
    Splits are 70/10/20 by floor with the remainder going to test. True codes
    are the codes whose planted probability is at least 0.5.

    Args:
        seed, vocab_size, n_docs, doc_len_range, n_codes, noise_sd: Shortcuts
            for the matching SynthConfig fields, ignored when config is given
        config: Full configuration

    Returns:
        SyntheticCorpus: documents, code space, splits and planted model
    """
    if config is None:
        try:
            config = SynthConfig(
                seed=seed,
                vocab_size=vocab_size,
                n_docs=n_docs,
                doc_len_range=doc_len_range,
                n_codes=n_codes,
                noise_sd=noise_sd,
            )
        except pydantic.ValidationError as e:
            raise ValidationError(f"invalid synthetic corpus settings: {e}") from e

    logger = create_data_logger()
    token_names = _token_names(config.vocab_size)
    vocabulary = Vocabulary(token_names)
    probabilities = zipf_mandelbrot(config.vocab_size, config.zipf_offset)

    rng = make_rng(config.seed, "synth-docs")
    lo, hi = config.doc_len_range
    lengths = rng.integers(lo, hi + 1, size=config.n_docs)
    width = max(5, len(str(config.n_docs - 1)))
    drafts: List[Document] = []
    for i, length in enumerate(lengths):
        draws = rng.choice(config.vocab_size, size=int(length), p=probabilities)
        tokens = [token_names[int(j)] for j in draws]
        drafts.append(Document.from_text(f"doc{i:0{width}d}", " ".join(tokens)))

    code_width = max(3, len(str(config.n_codes)))
    codes = [f"c{i:0{code_width}d}" for i in range(config.n_codes)]
    planted = _plant_model(config, vocabulary, codes, drafts)

    probs = emit_predictions(planted, drafts).probs
    documents = [
        Document(
            doc.doc_id,
            doc.raw_text,
            doc.tokens,
            frozenset(code for code, p in zip(codes, row) if p >= 0.5),
        )
        for doc, row in zip(drafts, probs)
    ]

    descriptions: Dict[str, str] = {}
    d_lo, d_hi = config.description_len_range
    for column, code in enumerate(codes):
        desc_rng = make_rng(config.seed, "synth-descriptions", column)
        support = sorted(planted.weights[column])
        length = int(desc_rng.integers(d_lo, d_hi + 1))
        picks = desc_rng.choice(
            len(support), size=length, replace=length > len(support)
        )
        descriptions[code] = " ".join(token_names[support[int(p)]] for p in picks)

    splits = _assign_splits(config, [doc.doc_id for doc in documents])
    positives = sum(len(doc.true_codes) for doc in documents)
    logger.info(
        f"Generated {len(documents)} documents, {config.vocab_size} tokens, "
        f"{len(codes)} codes ({positives} positive labels)"
    )
    return SyntheticCorpus(documents, CodeSpace(codes, descriptions), splits, planted)


def save_planted(model: PlantedModel, path: PathLike) -> None:
    """Write the planted weights keyed by token for oracle comparisons"""
    payload = {
        "version": PLANTED_FORMAT_VERSION,
        "seed": model.seed,
        "noise_sd": model.noise_sd,
        "vocabulary": model.vocabulary.to_list(),
        "codes": list(model.codes),
        "intercepts": list(model.intercepts),
        "weights": [
            {model.vocabulary.token(index): value for index, value in weights.items()}
            for weights in model.weights
        ],
    }
    write_text_atomic(path, json.dumps(payload, indent=2) + "\n")


def load_planted(path: PathLike) -> PlantedModel:
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload: Dict[str, Any] = json.load(f)
        if payload["version"] != PLANTED_FORMAT_VERSION:
            raise ModelFileError(
                f"{path}: unsupported planted model version {payload['version']}"
            )
        vocabulary = Vocabulary(payload["vocabulary"])
        weights = tuple(
            {vocabulary.index[token]: float(value) for token, value in entry.items()}
            for entry in payload["weights"]
        )
        return PlantedModel(
            vocabulary,
            tuple(payload["codes"]),
            weights,
            tuple(float(b) for b in payload["intercepts"]),
            float(payload["noise_sd"]),
            int(payload["seed"]),
        )
    except (OSError, KeyError, TypeError, ValueError) as e:
        raise ModelFileError(f"{path}: unreadable planted model ({e})") from e
