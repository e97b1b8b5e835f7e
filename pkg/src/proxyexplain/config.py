"""
Run configuration assembled by the command line for each subcommand
"""

from pathlib import Path
from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .data.config import SynthConfig
from .explain.config import ExtractionConfig
from .modeling.config import ExecutionConfig, TrainConfig
from .plausibility.config import PlausibilityConfig
from .utils.file_utils import expand_path


class RunConfig(BaseModel):
    """
    Everything one CLI invocation needs, validated before any work begins.

    Attributes:
      subcommand: Name of the subcommand being run.
      inputs: Named input files; each must exist.
      output: Output file or directory; its parent must exist or be creatable.
      seed: Global seed; module seeds are derived from it.
      synth, train, execution, extraction, plausibility: Module settings.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    subcommand: str = Field(..., min_length=1)
    inputs: Dict[str, Path] = Field(default_factory=dict)
    output: Optional[Path] = Field(None, description="Output path")
    seed: int = Field(13, description="Global seed")
    synth: SynthConfig = Field(default_factory=SynthConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    execution: ExecutionConfig = Field(default_factory=ExecutionConfig)
    extraction: ExtractionConfig = Field(default_factory=ExtractionConfig)
    plausibility: PlausibilityConfig = Field(default_factory=PlausibilityConfig)

    @field_validator("inputs", mode="before")
    @classmethod
    def _expand_inputs(cls, v: Dict[str, object]) -> Dict[str, Path]:
        """
        Normalize every input path: expand '~' and environment variables and
        resolve to an absolute path.
        """
        return {name: expand_path(str(path)) for name, path in v.items()}

    @field_validator("output", mode="before")
    @classmethod
    def _expand_output(cls, v: Optional[object]) -> Optional[Path]:
        return None if v is None else expand_path(str(v))

    @model_validator(mode="after")
    def _check_paths(self) -> "RunConfig":
        for name, path in self.inputs.items():
            if not path.exists():
                raise ValueError(f"{name} file {path} does not exist")
        if self.output is not None:
            parent = self.output.parent
            while not parent.exists() and parent != parent.parent:
                parent = parent.parent
            if not parent.is_dir():
                raise ValueError(f"cannot create output {self.output}")
        return self
