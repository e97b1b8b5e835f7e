"""
Exception hierarchy shared by every proxyexplain module
"""

from pathlib import Path
from typing import Optional, Union


class ProxyExplainError(Exception):
    """Base class for all data and validation errors raised by the toolkit"""


class DataFormatError(ProxyExplainError):
    """A file line could not be parsed"""

    def __init__(
        self,
        message: str,
        path: Optional[Union[str, Path]] = None,
        line_number: Optional[int] = None,
    ):
        self.path = str(path) if path is not None else None
        self.line_number = line_number
        location = ""
        if self.path is not None:
            location = self.path
            if line_number is not None:
                location += f", line {line_number}"
            location = f"{location}: "
        super().__init__(f"{location}{message}")


class ValidationError(ProxyExplainError):
    """Cross-file or cross-structure invariant violation"""


class DegenerateMetricError(ProxyExplainError):
    """A metric is undefined for the given input (single class, constant values)"""


class TrainingError(ProxyExplainError):
    """Model training could not run or did not produce a usable model"""


class ModelFileError(ProxyExplainError):
    """A serialized model is corrupted or incompatible"""
