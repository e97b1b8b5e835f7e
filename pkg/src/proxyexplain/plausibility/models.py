"""
Annotation records and model scores
"""

from typing import Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..data.models import parse_record
from ..utils.file_utils import PathLike, dumps_line, iter_jsonl, write_lines

Rating = Literal[0, 1, 2]

RATING_NAMES = {0: "Not informative", 1: "Informative", 2: "Highly informative"}


class AnnotationRecord(BaseModel):
    """One rated explanation; the file key for the text is 'explanation'"""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    example_id: str = Field(..., min_length=1)
    code: str = Field(..., min_length=1)
    explanation_text: str = Field(..., alias="explanation")
    rating: Rating

    @field_validator("explanation_text")
    @classmethod
    def _non_empty(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("explanation must not be empty")
        return v

    @property
    def label(self) -> int:
        """1 for Informative or Highly informative, else 0"""
        return int(self.rating >= 1)


class ModelScore(BaseModel):
    """Plausible-explanation count of one model, out of n"""

    model: str
    score: int = Field(..., ge=0)
    n: int = Field(..., ge=0)
    interval: Optional[Tuple[int, int]] = None
    p_vs: Dict[str, float] = Field(default_factory=dict)
    sweep: Dict[str, int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_bounds(self) -> "ModelScore":
        if self.score > self.n:
            raise ValueError(f"score {self.score} exceeds n={self.n}")
        if self.interval is not None:
            lo, hi = self.interval
            if not 0 <= lo <= hi <= self.n:
                raise ValueError(f"interval {self.interval} outside [0, {self.n}]")
        return self

    def to_json_dict(self) -> Dict[str, object]:
        payload: Dict[str, object] = {"model": self.model, "score": self.score}
        if self.interval is not None:
            payload["interval"] = list(self.interval)
        payload["p_vs"] = dict(self.p_vs)
        if self.sweep:
            payload["sweep"] = dict(self.sweep)
        return payload


def load_annotations(path: PathLike) -> List[AnnotationRecord]:
    return [
        parse_record(AnnotationRecord, obj, path, line_number)
        for line_number, obj in iter_jsonl(path)
    ]


def save_annotations(records: Sequence[AnnotationRecord], path: PathLike) -> None:
    write_lines(
        path,
        (dumps_line(record.model_dump(by_alias=True)) for record in records),
    )
