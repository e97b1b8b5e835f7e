"""
Data models for the file formats read and written by the toolkit
"""

import math
from enum import Enum
from pathlib import Path
from typing import Any, List, Type, TypeVar, Union

import pydantic
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..utils.errors import DataFormatError

RecordT = TypeVar("RecordT", bound=BaseModel)


class Split(str, Enum):
    """Corpus partitions"""

    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


class CorpusRecord(BaseModel):
    """One line of a corpus file"""

    model_config = ConfigDict(extra="forbid")

    doc_id: str = Field(..., min_length=1, description="Unique document id")
    text: str = Field(..., description="Raw document text")
    labels: List[str] = Field(
        default_factory=list, description="True code ids of the document"
    )

    @field_validator("labels")
    @classmethod
    def _no_blank_labels(cls, v: List[str]) -> List[str]:
        if any(not label.strip() for label in v):
            raise ValueError("labels must be non-empty strings")
        return v


class PredictionHeader(BaseModel):
    """First line of a predictions file"""

    model_config = ConfigDict(extra="forbid")

    codes: List[str] = Field(..., min_length=1)


def _check_probabilities(values: List[float]) -> List[float]:
    for value in values:
        if not math.isfinite(value) or value < 0.0 or value > 1.0:
            raise ValueError(f"probability {value!r} outside [0, 1]")
    return values


class PredictionRecord(BaseModel):
    """A document's row of black-box probabilities"""

    model_config = ConfigDict(extra="forbid")

    doc_id: str = Field(..., min_length=1)
    probs: List[float]

    @field_validator("probs")
    @classmethod
    def _validate_probs(cls, v: List[float]) -> List[float]:
        return _check_probabilities(v)


class ImportanceRecord(BaseModel):
    """Per-token importances of one (doc, code) pair"""

    model_config = ConfigDict(extra="forbid")

    doc_id: str = Field(..., min_length=1)
    code: str = Field(..., min_length=1)
    importances: List[float]

    @field_validator("importances")
    @classmethod
    def _finite(cls, v: List[float]) -> List[float]:
        if not all(math.isfinite(value) for value in v):
            raise ValueError("importances must be finite")
        return v


def parse_record(
    model_cls: Type[RecordT],
    obj: Any,
    path: Union[str, Path],
    line_number: int,
) -> RecordT:
    """Validate a decoded JSON line, reporting failures with the line number"""
    try:
        return model_cls.model_validate(obj)
    except pydantic.ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or 'record'}: {err['msg']}"
            for err in e.errors()
        )
        raise DataFormatError(problems, path, line_number) from e
