"""
Configuration for the annotation classifier and plausibility scoring
"""

from pydantic import BaseModel, ConfigDict, Field


class PlausibilityConfig(BaseModel):
    """
    Settings of the annotation classifier and the scoring statistics.

    Attributes:
      l2_strength: L2 penalty on the classifier weights; the bias is not penalized.
      max_iter: Gradient-descent iteration cap.
      tol: Stop once the gradient norm falls below this value.
      target_rate: Share of explanations the calibrated threshold labels plausible.
      n_bootstrap: Bernoulli replicates behind each score interval.
      level: Coverage of the score interval.
      seed: Seed from which every bootstrap stream is derived.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    l2_strength: float = Field(1.0, gt=0.0, description="L2 penalty strength")
    max_iter: int = Field(10_000, ge=1, description="Iteration cap")
    tol: float = Field(1e-6, gt=0.0, description="Gradient-norm tolerance")
    target_rate: float = Field(
        0.42, gt=0.0, lt=1.0, description="Calibrated plausible rate"
    )
    n_bootstrap: int = Field(1000, ge=1, description="Bootstrap replicates")
    level: float = Field(0.95, gt=0.0, lt=1.0, description="Interval coverage")
    seed: int = Field(13, description="Bootstrap seed")
