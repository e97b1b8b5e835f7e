"""
Explain module for ProxyExplain

This module provides:
- Word-vector tables and mean embeddings
- Span extraction from coefficients, importance dumps or description similarity
- Explanation files
"""

from .config import ExtractionConfig
from .embeddings import (
    EmbeddingTable,
    average_embedding,
    cosine,
    load_embeddings,
    save_embeddings,
)
from .spans import (
    CosineExplainer,
    DumpExplainer,
    Explanation,
    ModelExplainer,
    cosine_importance_extract,
    dump_importance_extract,
    explain_documents,
    extract_span,
    linear_importances,
    load_explanations,
    save_explanations,
)

__all__ = [
    "ExtractionConfig",
    "EmbeddingTable",
    "average_embedding",
    "cosine",
    "load_embeddings",
    "save_embeddings",
    "CosineExplainer",
    "DumpExplainer",
    "Explanation",
    "ModelExplainer",
    "cosine_importance_extract",
    "dump_importance_extract",
    "explain_documents",
    "extract_span",
    "linear_importances",
    "load_explanations",
    "save_explanations",
]
