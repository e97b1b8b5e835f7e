"""
Pretrained word-vector tables: loading, writing and averaging
"""

from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import DataFormatError, ValidationError
from ..utils.file_utils import PathLike, iter_lines, write_lines
from ..utils.logger import RunLogger, create_explain_logger


class EmbeddingTable:
    """Token to vector lookup with a fixed dimension; loaded, never trained"""

    def __init__(self, vectors: Mapping[str, Sequence[float]], dim: int):
        if dim < 1:
            raise ValidationError("embedding dimension must be at least 1")
        self.dim = dim
        self._tokens: List[str] = list(vectors)
        self._index: Dict[str, int] = {t: i for i, t in enumerate(self._tokens)}
        matrix = np.zeros((len(self._tokens), dim), dtype=np.float64)
        for row, token in enumerate(self._tokens):
            vector = np.asarray(vectors[token], dtype=np.float64)
            if vector.shape != (dim,):
                raise ValidationError(
                    f"vector for {token!r} has length {vector.size}, expected {dim}"
                )
            matrix[row] = vector
        matrix.setflags(write=False)
        self._matrix = matrix

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._index

    @property
    def tokens(self) -> List[str]:
        return list(self._tokens)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def vector(self, token: str) -> Optional[np.ndarray]:
        row = self._index.get(token)
        return None if row is None else self._matrix[row]

    def scaled(self, factor: float) -> "EmbeddingTable":
        return EmbeddingTable(
            {token: self._matrix[i] * factor for i, token in enumerate(self._tokens)},
            self.dim,
        )


def average_embedding(tokens: Iterable[str], table: EmbeddingTable) -> np.ndarray:
    """Mean of the in-table token vectors; the zero vector when none are known"""
    rows = [row for row in (table.vector(token) for token in tokens) if row is not None]
    if not rows:
        return np.zeros(table.dim, dtype=np.float64)
    return np.mean(np.vstack(rows), axis=0)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity, defined as 0 when either vector is zero"""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v)) / (nu * nv)


def _parse_header(
    path: PathLike, lines: Iterator[Tuple[int, str]]
) -> Tuple[int, int]:
    try:
        line_number, header = next(lines)
    except StopIteration:
        raise DataFormatError("empty embeddings file", path) from None
    fields = header.split()
    try:
        if len(fields) != 2:
            raise ValueError
        n_vectors, dim = int(fields[0]), int(fields[1])
    except ValueError:
        raise DataFormatError(
            "header must be two integers 'V D'", path, line_number
        ) from None
    if n_vectors < 0 or dim < 1:
        raise DataFormatError(f"invalid header {header!r}", path, line_number)
    return n_vectors, dim


def load_embeddings(
    path: PathLike, logger: Optional[RunLogger] = None
) -> EmbeddingTable:
    """
    Load a word-vector file.

    The first line is 'V D'; each following line is a token and D floats,
    separated by single spaces.

    Args:
        path: Embeddings file
        logger: Optional logger; defaults to the explain logger

    Returns:
        EmbeddingTable: The V vectors of dimension D
    """
    logger = logger or create_explain_logger()
    lines = iter_lines(path)
    n_vectors, dim = _parse_header(path, lines)

    vectors: Dict[str, np.ndarray] = {}
    for line_number, line in lines:
        fields = line.split(" ")
        token, values = fields[0], fields[1:]
        if len(values) != dim:
            raise DataFormatError(
                f"vector for {token!r} has {len(values)} values, expected {dim}",
                path,
                line_number,
            )
        if token in vectors:
            raise DataFormatError(f"duplicate token {token!r}", path, line_number)
        try:
            vector = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError as e:
            raise DataFormatError(f"bad number ({e})", path, line_number) from e
        if not np.all(np.isfinite(vector)):
            raise DataFormatError(
                f"non-finite value for {token!r}", path, line_number
            )
        vectors[token] = vector

    if len(vectors) != n_vectors:
        raise DataFormatError(
            f"header declares {n_vectors} vectors, file has {len(vectors)}", path
        )
    logger.info(f"Loaded {n_vectors} embeddings of dimension {dim} from {path}")
    return EmbeddingTable(vectors, dim)


def save_embeddings(table: EmbeddingTable, path: PathLike) -> None:
    def lines() -> Iterator[str]:
        yield f"{len(table)} {table.dim}"
        for token, row in zip(table.tokens, table.matrix):
            yield " ".join([token] + [repr(float(v)) for v in row])

    write_lines(path, lines())
