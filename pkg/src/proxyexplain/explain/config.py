"""
Configuration for explanation extraction
"""

from pydantic import BaseModel, ConfigDict, Field


class ExtractionConfig(BaseModel):
    """Window sizes and importance mode used by every span extractor"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    ngram: int = Field(4, ge=1, description="Tokens in the anchor window")
    context: int = Field(5, ge=0, description="Tokens kept on each side of the anchor")
    count_weighted: bool = Field(
        False,
        description="Multiply each token's coefficient by its count in the document",
    )

    @property
    def max_span(self) -> int:
        return self.ngram + 2 * self.context
