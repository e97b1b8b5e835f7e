"""
Explanation spans: the best-scoring n-gram of a document plus its context
"""

import math
import time
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from pydantic import BaseModel, ConfigDict, Field

from ..data.blackbox_io import ImportanceDump
from ..data.corpus import CodeSpace, Document, Vocabulary, tokenize
from ..data.models import parse_record
from ..modeling.linear import LinearCodeModel
from ..utils.errors import ValidationError
from ..utils.file_utils import PathLike, dumps_line, iter_jsonl, write_lines
from ..utils.logger import RunLogger, create_explain_logger
from .config import ExtractionConfig
from .embeddings import EmbeddingTable, average_embedding

# Window scores within this relative distance of the best one count as tied
ANCHOR_TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Explanation:
    """A contiguous span of a document anchored on its best window"""

    doc_id: str
    code: str
    span_tokens: Tuple[str, ...]
    span_start: int
    anchor_start: int
    anchor_score: float
    model: str = ""

    @property
    def span_end(self) -> int:
        return self.span_start + len(self.span_tokens)

    @property
    def text(self) -> str:
        return " ".join(self.span_tokens)


class ExplanationRecord(BaseModel):
    """One line of an explanations file"""

    model_config = ConfigDict(extra="forbid")

    doc_id: str = Field(..., min_length=1)
    code: str = Field(..., min_length=1)
    model: str
    span_start: int = Field(..., ge=0)
    anchor_start: int = Field(..., ge=0)
    anchor_score: float
    tokens: List[str] = Field(..., min_length=1)


def linear_importances(
    coefficients: Mapping[int, float],
    tokens: Sequence[str],
    vocabulary: Vocabulary,
    count_weighted: bool = False,
) -> np.ndarray:
    """
    Per-token importance under one code's linear coefficients.

    Each token gets its coefficient, 0 when it is out of vocabulary or has no
    coefficient. With count_weighted, the coefficient is multiplied by the
    token's count in the document.
    """
    importances = np.zeros(len(tokens), dtype=np.float64)
    counts: Dict[str, int] = {}
    if count_weighted:
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
    for position, token in enumerate(tokens):
        index = vocabulary.lookup(token)
        if index is None:
            continue
        weight = coefficients.get(index, 0.0)
        importances[position] = weight * counts[token] if count_weighted else weight
    return importances


def _anchor(scores: np.ndarray, n_tokens: int, ngram: int) -> Tuple[int, int, float]:
    """(anchor start, anchor width, score) of the leftmost best window"""
    if n_tokens < ngram:
        return 0, n_tokens, float(scores[0])
    top = float(np.max(scores))
    cutoff = top - ANCHOR_TIE_TOLERANCE * max(1.0, abs(top))
    best = int(np.flatnonzero(scores >= cutoff)[0])
    return best, ngram, float(scores[best])


def _span(
    tokens: Sequence[str],
    window_scores: np.ndarray,
    config: ExtractionConfig,
    doc_id: str,
    code: str,
    model: str,
) -> Explanation:
    n_tokens = len(tokens)
    anchor_start, width, score = _anchor(window_scores, n_tokens, config.ngram)
    span_start = max(0, anchor_start - config.context)
    span_end = min(n_tokens, anchor_start + width + config.context)
    return Explanation(
        doc_id=doc_id,
        code=code,
        span_tokens=tuple(tokens[span_start:span_end]),
        span_start=span_start,
        anchor_start=anchor_start,
        anchor_score=score,
        model=model,
    )


def window_means(importances: np.ndarray, ngram: int) -> np.ndarray:
    """
    Mean importance of every contiguous window; one value if shorter than ngram.

    Window sums are exactly rounded, so windows holding the same values in any
    order score the same.
    """
    if importances.size < ngram:
        return np.array([math.fsum(importances) / importances.size])
    windows = sliding_window_view(importances, ngram)
    return np.array([math.fsum(window) for window in windows]) / ngram


def extract_span(
    importances: Sequence[float],
    tokens: Sequence[str],
    ngram: int = 4,
    context: int = 5,
    doc_id: str = "",
    code: str = "",
    model: str = "",
) -> Explanation:
    """
    Anchor on the window with the largest mean importance and add context.

    Args:
        importances: One score per token
        tokens: Document tokens
        ngram: Anchor width; shorter documents use the whole document
        context: Tokens added on each side, clipped at the document edges
        doc_id, code, model: Copied onto the explanation

    Returns:
        Explanation: Span of at most ngram + 2 * context tokens
    """
    scores = np.asarray(importances, dtype=np.float64)
    if len(tokens) == 0:
        raise ValidationError(f"cannot explain empty document {doc_id!r}")
    if scores.shape != (len(tokens),):
        raise ValidationError(
            f"{scores.size} importances for {len(tokens)} tokens in {doc_id!r}"
        )
    config = ExtractionConfig(ngram=ngram, context=context)
    return _span(tokens, window_means(scores, ngram), config, doc_id, code, model)


def cosine_window_scores(
    tokens: Sequence[str],
    description_tokens: Sequence[str],
    table: EmbeddingTable,
    ngram: int = 4,
) -> np.ndarray:
    """Cosine between each window's mean embedding and the description's"""
    target = average_embedding(description_tokens, table)
    vectors = np.zeros((len(tokens), table.dim), dtype=np.float64)
    known = np.zeros(len(tokens), dtype=np.float64)
    for position, token in enumerate(tokens):
        vector = table.vector(token)
        if vector is not None:
            vectors[position] = vector
            known[position] = 1.0

    width = min(ngram, len(tokens))
    sums = sliding_window_view(vectors, width, axis=0).sum(axis=-1)
    counts = sliding_window_view(known, width).sum(axis=-1)
    means = sums / np.maximum(counts, 1.0)[:, None]

    target_norm = float(np.linalg.norm(target))
    norms = np.linalg.norm(means, axis=1)
    scores = np.zeros(means.shape[0], dtype=np.float64)
    if target_norm == 0.0:
        return scores
    nonzero = norms > 0.0
    scores[nonzero] = (means[nonzero] @ target) / (norms[nonzero] * target_norm)
    return scores


def cosine_importance_extract(
    tokens: Sequence[str],
    description_tokens: Sequence[str],
    table: EmbeddingTable,
    config: Optional[ExtractionConfig] = None,
    doc_id: str = "",
    code: str = "",
) -> Explanation:
    """Anchor on the window most similar to the code description"""
    config = config or ExtractionConfig()
    if not description_tokens:
        raise ValidationError(f"empty description for code {code!r}")
    if not tokens:
        raise ValidationError(f"cannot explain empty document {doc_id!r}")
    scores = cosine_window_scores(tokens, description_tokens, table, config.ngram)
    return _span(tokens, scores, config, doc_id, code, "cosine")


def dump_importance_extract(
    dump: ImportanceDump,
    document: Document,
    code: str,
    config: Optional[ExtractionConfig] = None,
    model: str = "dump",
) -> Explanation:
    """Windowing of extract_span applied to externally dumped importances"""
    config = config or ExtractionConfig()
    return extract_span(
        dump.get(document.doc_id, code),
        document.tokens,
        config.ngram,
        config.context,
        document.doc_id,
        code,
        model,
    )


class ModelExplainer:
    """Spans from a linear model's coefficients"""

    def __init__(
        self,
        model: LinearCodeModel,
        config: Optional[ExtractionConfig] = None,
        name: Optional[str] = None,
    ):
        self.model = model
        self.config = config or ExtractionConfig()
        self.name = name or model.kind

    def __call__(self, document: Document, code: str) -> Explanation:
        coefficients = self.model.coefficients[self.model.code_index(code)]
        importances = linear_importances(
            coefficients,
            document.tokens,
            self.model.vocabulary,
            self.config.count_weighted,
        )
        return extract_span(
            importances,
            document.tokens,
            self.config.ngram,
            self.config.context,
            document.doc_id,
            code,
            self.name,
        )


class DumpExplainer:
    """Spans from an importance dump"""

    def __init__(
        self,
        dump: ImportanceDump,
        config: Optional[ExtractionConfig] = None,
        name: str = "dump",
    ):
        self.dump = dump
        self.config = config or ExtractionConfig()
        self.name = name

    def __call__(self, document: Document, code: str) -> Explanation:
        return dump_importance_extract(
            self.dump, document, code, self.config, self.name
        )


class CosineExplainer:
    """Spans most similar to each code's description"""

    name = "cosine"

    def __init__(
        self,
        table: EmbeddingTable,
        code_space: CodeSpace,
        config: Optional[ExtractionConfig] = None,
    ):
        self.table = table
        self.code_space = code_space
        self.config = config or ExtractionConfig()

    def __call__(self, document: Document, code: str) -> Explanation:
        return cosine_importance_extract(
            document.tokens,
            tokenize(self.code_space.description(code)),
            self.table,
            self.config,
            document.doc_id,
            code,
        )


Explainer = ModelExplainer | DumpExplainer | CosineExplainer


def explain_documents(
    documents: Sequence[Document],
    codes: Sequence[str],
    explainer: Explainer,
    logger: Optional[RunLogger] = None,
) -> Iterator[Explanation]:
    """One explanation per (document, code), documents outermost"""
    logger = logger or create_explain_logger()
    logger.start_session(f"{explainer.name} explanations", total=len(documents))
    for done, document in enumerate(documents, start=1):
        started = time.time()
        try:
            for code in codes:
                yield explainer(document, code)
        except Exception as e:
            logger.log_item_failed(document.doc_id, e)
            raise
        logger.log_item_processed(document.doc_id, time.time() - started)
        if done == len(documents):
            logger.log_progress(done, len(documents))
    logger.log_session_summary()


def save_explanations(explanations: Sequence[Explanation], path: PathLike) -> None:
    write_lines(
        path,
        (
            dumps_line(
                {
                    "doc_id": e.doc_id,
                    "code": e.code,
                    "model": e.model,
                    "span_start": e.span_start,
                    "anchor_start": e.anchor_start,
                    "anchor_score": e.anchor_score,
                    "tokens": list(e.span_tokens),
                }
            )
            for e in explanations
        ),
    )


def load_explanations(path: PathLike) -> List[Explanation]:
    explanations = []
    for line_number, obj in iter_jsonl(path):
        record = parse_record(ExplanationRecord, obj, path, line_number)
        explanations.append(
            Explanation(
                doc_id=record.doc_id,
                code=record.code,
                span_tokens=tuple(record.tokens),
                span_start=record.span_start,
                anchor_start=record.anchor_start,
                anchor_score=record.anchor_score,
                model=record.model,
            )
        )
    return explanations
