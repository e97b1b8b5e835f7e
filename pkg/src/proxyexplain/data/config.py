"""
Configuration for synthetic corpus generation
"""

from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SynthConfig(BaseModel):
    """
    Parameters of the synthetic corpus and its planted log-linear black box.

    Attributes:
      seed: Global seed; every random stream is derived from it.
      n_docs: Number of generated documents (at least 3 so every split is non-empty).
      vocab_size: Number of synthetic tokens.
      n_codes: Number of codes with a planted model each.
      doc_len_range: Inclusive bounds of document lengths in tokens.
      noise_sd: Standard deviation of the log-space noise added per (doc, code).
      zipf_offset: Offset q of the Zipf-Mandelbrot weights 1 / (rank + q).
      support_size: Nonzero planted weights per code.
      support_pool: Support tokens are drawn from this many most frequent ranks.
      intercept_range: Bounds of the sampled planted intercepts.
      description_len_range: Inclusive bounds of code description lengths.
      clamp_margin: Weights are scaled so every planted score is at most -clamp_margin.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(13, description="Global seed")
    n_docs: int = Field(2000, ge=3, description="Number of documents")
    vocab_size: int = Field(500, ge=1, description="Synthetic vocabulary size")
    n_codes: int = Field(20, ge=1, description="Number of codes")
    doc_len_range: Tuple[int, int] = Field(
        (50, 70), description="Inclusive document length bounds"
    )
    noise_sd: float = Field(0.0, ge=0.0, description="Log-space noise sd")
    zipf_offset: float = Field(10.0, ge=0.0, description="Zipf-Mandelbrot offset")
    support_size: int = Field(15, ge=1, description="Planted nonzeros per code")
    support_pool: int = Field(50, ge=1, description="Frequent ranks eligible")
    intercept_range: Tuple[float, float] = Field(
        (-6.0, -2.0), description="Planted intercept bounds"
    )
    description_len_range: Tuple[int, int] = Field(
        (3, 6), description="Inclusive description length bounds"
    )
    clamp_margin: float = Field(0.05, gt=0.0, description="Gap kept below log 1")

    @model_validator(mode="after")
    def _check_ranges(self) -> "SynthConfig":
        lo, hi = self.doc_len_range
        if lo < 1 or hi < lo:
            raise ValueError(f"invalid doc_len_range {self.doc_len_range}")
        lo, hi = self.description_len_range
        if lo < 1 or hi < lo:
            raise ValueError(
                f"invalid description_len_range {self.description_len_range}"
            )
        b_lo, b_hi = self.intercept_range
        if b_hi < b_lo or b_hi >= -self.clamp_margin:
            raise ValueError(
                f"intercept_range {self.intercept_range} must be ordered and lie "
                f"below -clamp_margin"
            )
        return self
