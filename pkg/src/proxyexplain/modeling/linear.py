"""
Per-code sparse linear models and their JSON model files
"""

import json
from dataclasses import dataclass
from typing import (
    Any,
    ClassVar,
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Type,
    TypeVar,
)

import numpy as np
import pydantic
from scipy import sparse

from ..data.corpus import CodeSpace, Document, Vocabulary, featurize_many
from ..utils.errors import ModelFileError, ValidationError
from ..utils.file_utils import PathLike, write_text_atomic
from .config import TrainConfig

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class LinearCodeModel:
    """One sparse coefficient vector and intercept per code over a vocabulary"""

    kind: ClassVar[str] = "linear"

    vocabulary: Vocabulary
    codes: Tuple[str, ...]
    coefficients: Tuple[Mapping[int, float], ...]
    intercepts: Tuple[float, ...]
    config: TrainConfig

    def __post_init__(self) -> None:
        if not (len(self.codes) == len(self.coefficients) == len(self.intercepts)):
            raise ValidationError(
                "one coefficient vector and one intercept are needed per code"
            )
        dim = len(self.vocabulary)
        for code, coefficients in zip(self.codes, self.coefficients):
            if any(not 0 <= index < dim for index in coefficients):
                raise ValidationError(f"code {code!r} has a coefficient index >= {dim}")

    def code_index(self, code: str) -> int:
        try:
            return self.codes.index(code)
        except ValueError:
            raise ValidationError(f"model has no code {code!r}") from None

    def coefficient_matrix(self) -> sparse.csc_matrix:
        """(V, n_codes) sparse coefficient matrix"""
        rows: List[int] = []
        cols: List[int] = []
        values: List[float] = []
        for column, coefficients in enumerate(self.coefficients):
            for index, value in coefficients.items():
                rows.append(index)
                cols.append(column)
                values.append(value)
        return sparse.csc_matrix(
            (values, (rows, cols)), shape=(len(self.vocabulary), len(self.codes))
        )

    def featurize(self, documents: Sequence[Document]) -> sparse.csr_matrix:
        return featurize_many(
            documents, self.vocabulary, binary=self.config.binary_features
        )

    def linear_scores(self, features: sparse.spmatrix) -> np.ndarray:
        """w.x + b for every row of a design matrix and every code"""
        scores = features @ self.coefficient_matrix()
        if sparse.issparse(scores):
            scores = scores.toarray()
        return np.asarray(scores, dtype=np.float64) + np.asarray(self.intercepts)

    def check_codes(self, code_space: CodeSpace) -> None:
        if self.codes != code_space.codes:
            raise ValidationError("model codes do not match the code space")


def top_features(
    model: LinearCodeModel, code: str, k: int = 10
) -> List[Tuple[str, float]]:
    """
    Global explanation of one code: its k largest positive coefficients.

    Returns:
        List[Tuple[str, float]]: (token, weight) pairs, heaviest first
    """
    if k < 1:
        raise ValidationError("k must be at least 1")
    coefficients = model.coefficients[model.code_index(code)]
    ranked = sorted(
        ((model.vocabulary.token(i), w) for i, w in coefficients.items() if w > 0),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return ranked[:k]


def model_summary(model: LinearCodeModel) -> Dict[str, Any]:
    """Size of the model: nonzero parameters against the dense parameter count"""
    per_code = {
        code: len(coefficients)
        for code, coefficients in zip(model.codes, model.coefficients)
    }
    nonzero = sum(per_code.values())
    return {
        "kind": model.kind,
        "n_codes": len(model.codes),
        "vocab_size": len(model.vocabulary),
        "nonzero_coefficients": nonzero,
        "parameters": nonzero + len(model.codes),
        "dense_parameters": len(model.codes) * (len(model.vocabulary) + 1),
        "nonzero_per_code": per_code,
    }


_MODEL_KINDS: Dict[str, Type[LinearCodeModel]] = {}

ModelT = TypeVar("ModelT", bound=LinearCodeModel)


def register_kind(cls: Type[ModelT]) -> Type[ModelT]:
    """Class decorator making a model kind loadable by load_model"""
    _MODEL_KINDS[cls.kind] = cls
    return cls


def save_model(model: LinearCodeModel, path: PathLike) -> None:
    """Write a model file; floats keep full round-trip precision"""
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "config": model.config.model_dump(),
        "vocab_hash": model.vocabulary.fingerprint(),
        "vocabulary": model.vocabulary.to_list(),
        "min_doc_freq": model.vocabulary.min_doc_freq,
        "codes": list(model.codes),
        "intercepts": [float(b) for b in model.intercepts],
        "coefficients": [
            [[int(index), float(value)] for index, value in sorted(c.items())]
            for c in model.coefficients
        ],
    }
    write_text_atomic(path, json.dumps(payload) + "\n")


def load_model(
    path: PathLike,
    vocabulary: Optional[Vocabulary] = None,
    expected_kind: Optional[str] = None,
) -> LinearCodeModel:
    """
    Load a model file written by save_model.

    Args:
        path: Model file
        vocabulary: When given, the file's vocabulary hash must match it
        expected_kind: When given, the file's kind must match it

    Returns:
        LinearCodeModel: A ProxyModel or LogisticBaseline depending on the kind
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload: Dict[str, Any] = json.load(f)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ModelFileError(f"{path}: cannot read model file ({e})") from e

    if not isinstance(payload, dict):
        raise ModelFileError(f"{path}: model file is not a JSON object")
    version = payload.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFileError(
            f"{path}: model version {version!r}, expected {MODEL_FORMAT_VERSION}"
        )
    kind = payload.get("kind")
    if kind not in _MODEL_KINDS:
        raise ModelFileError(f"{path}: unknown model kind {kind!r}")
    if expected_kind is not None and kind != expected_kind:
        raise ModelFileError(f"{path}: expected a {expected_kind} model, found {kind}")

    try:
        stored = Vocabulary(
            [str(token) for token in payload["vocabulary"]],
            min_doc_freq=int(payload.get("min_doc_freq", 1)),
        )
        if stored.fingerprint() != payload["vocab_hash"]:
            raise ModelFileError(f"{path}: vocabulary does not match its hash")
        if vocabulary is not None and vocabulary.fingerprint() != payload["vocab_hash"]:
            raise ModelFileError(f"{path}: vocabulary hash mismatch")
        config = TrainConfig.model_validate(payload["config"])
        coefficients = tuple(
            {int(index): float(value) for index, value in entries}
            for entries in payload["coefficients"]
        )
        return _MODEL_KINDS[kind](
            stored,
            tuple(str(code) for code in payload["codes"]),
            coefficients,
            tuple(float(b) for b in payload["intercepts"]),
            config,
        )
    except ModelFileError:
        raise
    except (
        KeyError,
        TypeError,
        ValueError,
        ValidationError,
        pydantic.ValidationError,
    ) as e:
        raise ModelFileError(f"{path}: corrupted model file ({e})") from e
