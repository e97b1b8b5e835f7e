"""
ProxyExplain utilities: errors, logging, file helpers and seed derivation
"""

from .errors import (
    DataFormatError,
    DegenerateMetricError,
    ModelFileError,
    ProxyExplainError,
    TrainingError,
    ValidationError,
)
from .file_utils import expand_path, fingerprint, write_text_atomic
from .logger import RunLogger, create_module_logger
from .seeding import derive_seed, make_rng

__all__ = [
    "DataFormatError",
    "DegenerateMetricError",
    "ModelFileError",
    "ProxyExplainError",
    "TrainingError",
    "ValidationError",
    "expand_path",
    "fingerprint",
    "write_text_atomic",
    "RunLogger",
    "create_module_logger",
    "derive_seed",
    "make_rng",
]
