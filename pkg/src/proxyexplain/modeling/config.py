"""
Configuration for proxy and baseline training
"""

from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field

DEFAULT_ALPHA_GRID: Tuple[float, ...] = (1e-5, 1e-4, 1e-3)


class TrainConfig(BaseModel):
    """
    Optimizer settings shared by the proxy regressors and the logistic baseline.

    Attributes:
      alpha: L1 strength.
      epochs: Passes over the training split.
      eta0: Initial learning rate; the rate at update t is eta0 / t**power_t.
      power_t: Learning-rate decay exponent.
      clamp_eps: Probability floor applied before taking logs.
      seed: Seed from which each code's shuffling stream is derived.
      binary_features: Use presence indicators instead of token counts.
      min_doc_freq: Vocabulary threshold used when the model builds its vocabulary.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(1e-4, ge=0.0, description="L1 regularization strength")
    epochs: int = Field(10, ge=1, description="Training epochs")
    eta0: float = Field(0.01, gt=0.0, description="Initial learning rate")
    power_t: float = Field(0.25, ge=0.0, description="Learning-rate decay exponent")
    clamp_eps: float = Field(
        1e-6, gt=0.0, lt=0.5, description="Probability floor before the log"
    )
    seed: int = Field(13, description="Shuffle seed")
    binary_features: bool = Field(False, description="Binary token indicators")
    min_doc_freq: int = Field(3, ge=1, description="Vocabulary document frequency")


class ExecutionConfig(BaseModel):
    """
    How per-code training is scheduled. Never changes the trained model.

    Attributes:
      max_workers: Concurrent code trainers; 1 trains sequentially.
      use_process_pool: Use a ProcessPoolExecutor instead of threads.
      progress_every: Log a progress line every this many finished codes.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    max_workers: int = Field(1, ge=1, description="Concurrent code trainers")
    use_process_pool: bool = Field(
        False,
        description=(
            "If True, train codes in a ProcessPoolExecutor "
            "(faster for many codes, pays pickling of the design matrix)."
        ),
    )
    progress_every: int = Field(10, ge=1, description="Progress log interval")
