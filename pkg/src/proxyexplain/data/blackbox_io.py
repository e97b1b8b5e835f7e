"""
Black-box prediction matrices, importance dumps and binarization
"""

from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import DataFormatError, ValidationError
from ..utils.file_utils import PathLike, dumps_line, iter_jsonl, write_lines
from ..utils.logger import create_data_logger
from .corpus import CodeSpace, Document
from .models import ImportanceRecord, PredictionHeader, PredictionRecord, parse_record


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PredictionMatrix:
    """Dense per-document, per-code probabilities"""

    doc_ids: Tuple[str, ...]
    codes: Tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=np.float64)
        if probs.shape != (len(self.doc_ids), len(self.codes)):
            raise ValidationError(
                f"probability matrix shape {probs.shape} does not match "
                f"{len(self.doc_ids)} docs x {len(self.codes)} codes"
            )
        if probs.size and (
            not np.all(np.isfinite(probs)) or probs.min() < 0.0 or probs.max() > 1.0
        ):
            raise ValidationError("probabilities must lie in [0, 1]")
        if len(set(self.doc_ids)) != len(self.doc_ids):
            raise ValidationError("duplicate doc_id in prediction matrix")
        object.__setattr__(self, "doc_ids", tuple(self.doc_ids))
        object.__setattr__(self, "codes", tuple(self.codes))
        object.__setattr__(self, "probs", _frozen(probs))
        object.__setattr__(
            self,
            "_row_index",
            MappingProxyType({doc_id: i for i, doc_id in enumerate(self.doc_ids)}),
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.doc_ids), len(self.codes))

    def rows_for(self, doc_ids: Sequence[str]) -> np.ndarray:
        """Probability rows aligned to the given doc ids"""
        row_index: Mapping[str, int] = self._row_index  # type: ignore[attr-defined]
        missing = [doc_id for doc_id in doc_ids if doc_id not in row_index]
        if missing:
            raise ValidationError(
                f"predictions missing for {len(missing)} document(s), "
                f"e.g. {missing[0]!r}"
            )
        return self.probs[[row_index[doc_id] for doc_id in doc_ids]]


@dataclass(frozen=True, eq=False)
class BinaryPredictionMatrix:
    """Thresholded prediction matrix"""

    doc_ids: Tuple[str, ...]
    codes: Tuple[str, ...]
    labels: np.ndarray
    threshold: float


def binarize(
    matrix: PredictionMatrix, threshold: float = 0.5
) -> BinaryPredictionMatrix:
    """Entry is 1 exactly when the probability is at least the threshold"""
    if not 0.0 < threshold < 1.0:
        raise ValidationError(f"threshold must lie in (0, 1), got {threshold}")
    labels = (matrix.probs >= threshold).astype(np.int8)
    return BinaryPredictionMatrix(
        matrix.doc_ids, matrix.codes, _frozen(labels), threshold
    )


def load_predictions(
    path: PathLike,
    code_space: CodeSpace,
    doc_ids: Optional[Sequence[str]] = None,
) -> PredictionMatrix:
    """
    Load a predictions file.

    Args:
        path: JSON-lines file with a {"codes": [...]} header line
        code_space: Expected codes, in the same order as the header
        doc_ids: When given, every one of these documents must have a row

    Returns:
        PredictionMatrix: Rows in file order
    """
    logger = create_data_logger()
    lines = iter_jsonl(path)
    try:
        header_line, header_obj = next(lines)
    except StopIteration:
        raise DataFormatError("empty predictions file", path) from None
    header = parse_record(PredictionHeader, header_obj, path, header_line)
    if tuple(header.codes) != code_space.codes:
        raise ValidationError(
            f"{path}: header codes do not match the code space "
            f"(file has {len(header.codes)} codes, expected {len(code_space)} "
            "in the same order)"
        )

    rows: List[List[float]] = []
    row_ids: List[str] = []
    seen: Dict[str, int] = {}
    for line_number, obj in lines:
        record = parse_record(PredictionRecord, obj, path, line_number)
        if len(record.probs) != len(header.codes):
            raise DataFormatError(
                f"expected {len(header.codes)} probabilities, "
                f"found {len(record.probs)}",
                path,
                line_number,
            )
        if record.doc_id in seen:
            raise DataFormatError(
                f"duplicate row for {record.doc_id!r}", path, line_number
            )
        seen[record.doc_id] = line_number
        row_ids.append(record.doc_id)
        rows.append(record.probs)

    if doc_ids is not None:
        missing = [doc_id for doc_id in doc_ids if doc_id not in seen]
        if missing:
            raise ValidationError(
                f"{path}: no prediction row for {len(missing)} document(s), "
                f"e.g. {missing[0]!r}"
            )

    probs = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(header.codes))
    logger.info(f"Loaded predictions for {len(rows)} documents from {path}")
    return PredictionMatrix(tuple(row_ids), tuple(header.codes), probs)


def save_predictions(matrix: PredictionMatrix, path: PathLike) -> None:
    def lines() -> Iterator[str]:
        yield dumps_line({"codes": list(matrix.codes)})
        for doc_id, row in zip(matrix.doc_ids, matrix.probs):
            yield dumps_line({"doc_id": doc_id, "probs": [float(p) for p in row]})

    write_lines(path, lines())


class ImportanceDump:
    """Externally produced per-token importances keyed by (doc_id, code)"""

    def __init__(self, scores: Mapping[Tuple[str, str], np.ndarray]):
        self._scores: Mapping[Tuple[str, str], np.ndarray] = MappingProxyType(
            {
                key: _frozen(np.array(value, dtype=np.float64))
                for key, value in scores.items()
            }
        )

    def __len__(self) -> int:
        return len(self._scores)

    def __contains__(self, key: object) -> bool:
        return key in self._scores

    def keys(self) -> List[Tuple[str, str]]:
        return list(self._scores.keys())

    def get(self, doc_id: str, code: str) -> np.ndarray:
        try:
            return self._scores[(doc_id, code)]
        except KeyError:
            raise ValidationError(
                f"importance dump has no entry for ({doc_id!r}, {code!r})"
            ) from None


def load_importance_dump(
    path: PathLike, corpus: Sequence[Document]
) -> ImportanceDump:
    """Load an importance dump and check lengths against document token counts"""
    token_counts = {doc.doc_id: len(doc.tokens) for doc in corpus}
    scores: Dict[Tuple[str, str], np.ndarray] = {}
    for line_number, obj in iter_jsonl(path):
        record = parse_record(ImportanceRecord, obj, path, line_number)
        if record.doc_id not in token_counts:
            raise DataFormatError(
                f"unknown doc_id {record.doc_id!r}", path, line_number
            )
        key = (record.doc_id, record.code)
        if key in scores:
            raise DataFormatError(
                f"duplicate entry for ({record.doc_id!r}, {record.code!r})",
                path,
                line_number,
            )
        expected = token_counts[record.doc_id]
        if len(record.importances) != expected:
            raise ValidationError(
                f"{path}, line {line_number}: ({record.doc_id!r}, {record.code!r}) "
                f"has {len(record.importances)} importances for {expected} tokens"
            )
        scores[key] = np.asarray(record.importances, dtype=np.float64)
    return ImportanceDump(scores)


def save_importance_dump(dump: ImportanceDump, path: PathLike) -> None:
    write_lines(
        path,
        (
            dumps_line(
                {
                    "doc_id": doc_id,
                    "code": code,
                    "importances": [float(v) for v in dump.get(doc_id, code)],
                }
            )
            for doc_id, code in dump.keys()
        ),
    )
