"""
File utility functions shared by the readers and writers
"""

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator, List, Tuple, Union

from .errors import DataFormatError

PathLike = Union[str, Path]


def expand_path(value: PathLike) -> Path:
    """
    Normalize a user supplied path.

    Expands a leading '~', substitutes environment variables and resolves the
    result to an absolute path.
    """
    return Path(os.path.expanduser(os.path.expandvars(str(value)))).resolve()


def fingerprint(items: Iterable[str]) -> str:
    """sha256 over newline-terminated items, order sensitive"""
    digest = hashlib.sha256()
    for item in items:
        digest.update(item.encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


def iter_lines(path: PathLike) -> Iterator[Tuple[int, str]]:
    """Yield (1-based line number, line) for non-blank lines"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            for line_number, line in enumerate(f, start=1):
                stripped = line.rstrip("\n").rstrip("\r")
                if stripped.strip():
                    yield line_number, stripped
    except FileNotFoundError as e:
        raise DataFormatError("file not found", path) from e
    except UnicodeDecodeError as e:
        raise DataFormatError(f"not valid UTF-8 ({e.reason})", path) from e


def iter_jsonl(path: PathLike) -> Iterator[Tuple[int, Any]]:
    """Yield (line number, decoded object) for a JSON-lines file"""
    for line_number, line in iter_lines(path):
        try:
            yield line_number, json.loads(line)
        except json.JSONDecodeError as e:
            raise DataFormatError(f"invalid JSON ({e.msg})", path, line_number) from e


def iter_tsv(path: PathLike, n_fields: int) -> Iterator[Tuple[int, List[str]]]:
    """Yield (line number, fields) for a tab separated file with fixed arity"""
    for line_number, line in iter_lines(path):
        fields = line.split("\t")
        if len(fields) != n_fields:
            raise DataFormatError(
                f"expected {n_fields} tab-separated fields, found {len(fields)}",
                path,
                line_number,
            )
        yield line_number, fields


def dumps_line(obj: Any) -> str:
    """Compact single-line JSON; floats keep round-trip precision"""
    return json.dumps(obj, ensure_ascii=False, allow_nan=False)


def write_text_atomic(path: PathLike, text: str) -> Path:
    """
    Write text through a temporary sibling file and rename it into place

    Args:
        path: Destination path; parent directories are created
        text: Full file contents

    Returns:
        Path: The resolved destination
    """
    target = expand_path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


def write_lines(path: PathLike, lines: Iterable[str]) -> Path:
    """Write newline-terminated lines atomically"""
    return write_text_atomic(path, "".join(f"{line}\n" for line in lines))
