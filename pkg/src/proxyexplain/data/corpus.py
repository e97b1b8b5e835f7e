"""
Documents, vocabulary, code space, splits and bag-of-words features
"""

import re
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np
from scipy import sparse

from ..utils.errors import DataFormatError, ValidationError
from ..utils.file_utils import (
    PathLike,
    dumps_line,
    fingerprint,
    iter_jsonl,
    iter_lines,
    iter_tsv,
    write_lines,
)
from ..utils.logger import create_data_logger
from .models import CorpusRecord, Split, parse_record

# runs of anything that is not a letter or digit (underscore included)
_SEPARATOR = re.compile(r"[\W_]+")


def tokenize(text: str) -> List[str]:
    """
    Lowercase, split on non-alphanumeric runs, drop letter-free tokens.

    Args:
        text: Raw text

    Returns:
        List[str]: Tokens in document order
    """
    return [
        token
        for token in _SEPARATOR.split(text.lower())
        if token and any(ch.isalpha() for ch in token)
    ]


@dataclass(frozen=True)
class Document:
    """A tokenized document with its true codes"""

    doc_id: str
    raw_text: str
    tokens: Tuple[str, ...]
    true_codes: FrozenSet[str] = field(default_factory=frozenset)

    @classmethod
    def from_text(
        cls, doc_id: str, raw_text: str, codes: Iterable[str] = ()
    ) -> "Document":
        return cls(doc_id, raw_text, tuple(tokenize(raw_text)), frozenset(codes))


class Vocabulary:
    """Frozen token to dense index mapping"""

    def __init__(self, tokens: Sequence[str], min_doc_freq: int = 1):
        ordered = tuple(tokens)
        index = {token: i for i, token in enumerate(ordered)}
        if len(index) != len(ordered):
            raise ValidationError("vocabulary contains duplicate tokens")
        self._tokens = ordered
        self._index: Mapping[str, int] = MappingProxyType(index)
        self.min_doc_freq = min_doc_freq

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self._tokens == other._tokens

    def __hash__(self) -> int:
        return hash(self._tokens)

    @property
    def size(self) -> int:
        return len(self._tokens)

    @property
    def index(self) -> Mapping[str, int]:
        return self._index

    def lookup(self, token: str) -> Optional[int]:
        """Index of a token, or None when unseen"""
        return self._index.get(token)

    def token(self, index: int) -> str:
        return self._tokens[index]

    def to_list(self) -> List[str]:
        return list(self._tokens)

    def fingerprint(self) -> str:
        """Hash identifying the exact token to index assignment"""
        return fingerprint(self._tokens)


def build_vocabulary(docs: Sequence[Document], min_doc_freq: int = 3) -> Vocabulary:
    """
    Build a vocabulary from training documents.

    Keeps tokens that occur in at least min_doc_freq distinct documents and
    assigns indices in lexicographic token order.
    """
    if not docs:
        raise ValidationError("cannot build a vocabulary from zero documents")
    doc_freq: Counter[str] = Counter()
    for doc in docs:
        doc_freq.update(set(doc.tokens))
    kept = sorted(token for token, count in doc_freq.items() if count >= min_doc_freq)
    if not kept:
        raise ValidationError(
            f"vocabulary is empty at min_doc_freq={min_doc_freq} "
            f"over {len(docs)} documents"
        )
    return Vocabulary(kept, min_doc_freq=min_doc_freq)


@dataclass(frozen=True)
class FeatureVector:
    """Sparse token counts of a document over a vocabulary"""

    counts: Mapping[int, int]
    dim: int

    def as_dict(self) -> Dict[int, int]:
        return dict(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)

    def dot(self, weights: Mapping[int, float]) -> float:
        """Inner product with a sparse weight map"""
        return float(
            sum(weights.get(index, 0.0) * count for index, count in self.counts.items())
        )


def featurize(
    doc: Document, vocab: Vocabulary, binary: bool = False
) -> FeatureVector:
    """Count in-vocabulary tokens; unseen tokens are ignored"""
    counts: Counter[int] = Counter()
    for token in doc.tokens:
        index = vocab.lookup(token)
        if index is not None:
            counts[index] += 1
    if binary:
        counts = Counter({index: 1 for index in counts})
    return FeatureVector(MappingProxyType(dict(sorted(counts.items()))), len(vocab))


def stack_features(vectors: Sequence[FeatureVector], dim: int) -> sparse.csr_matrix:
    """Feature vectors as the rows of a CSR matrix"""
    indptr = [0]
    indices: List[int] = []
    data: List[float] = []
    for vector in vectors:
        if any(index >= dim for index in vector.counts):
            raise ValidationError(f"feature index outside a {dim}-token vocabulary")
        indices.extend(vector.counts.keys())
        data.extend(float(count) for count in vector.counts.values())
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (
            np.asarray(data, dtype=np.float64),
            np.asarray(indices, dtype=np.int64),
            np.asarray(indptr, dtype=np.int64),
        ),
        shape=(len(vectors), dim),
    )


def featurize_many(
    docs: Sequence[Document], vocab: Vocabulary, binary: bool = False
) -> sparse.csr_matrix:
    """Documents as a CSR matrix of shape (n_docs, V)"""
    return stack_features([featurize(doc, vocab, binary) for doc in docs], len(vocab))


class CodeSpace:
    """Ordered codes with their descriptions"""

    def __init__(self, codes: Sequence[str], descriptions: Mapping[str, str]):
        ordered = tuple(codes)
        index = {code: i for i, code in enumerate(ordered)}
        if len(index) != len(ordered):
            raise ValidationError("code space contains duplicate codes")
        for code in ordered:
            if not descriptions.get(code, "").strip():
                raise ValidationError(f"code {code!r} has no description")
        self._codes = ordered
        self._index: Mapping[str, int] = MappingProxyType(index)
        self._descriptions: Mapping[str, str] = MappingProxyType(
            {code: descriptions[code] for code in ordered}
        )

    def __len__(self) -> int:
        return len(self._codes)

    def __contains__(self, code: object) -> bool:
        return code in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self._codes)

    @property
    def codes(self) -> Tuple[str, ...]:
        return self._codes

    def index_of(self, code: str) -> int:
        try:
            return self._index[code]
        except KeyError:
            raise ValidationError(f"unknown code {code!r}") from None

    def description(self, code: str) -> str:
        try:
            return self._descriptions[code]
        except KeyError:
            raise ValidationError(f"no description for code {code!r}") from None


class SplitAssignment:
    """doc_id to split mapping covering a whole corpus"""

    def __init__(self, assignment: Mapping[str, Split]):
        self._assignment: Mapping[str, Split] = MappingProxyType(
            {doc_id: Split(split) for doc_id, split in assignment.items()}
        )
        present = set(self._assignment.values())
        missing = [split.value for split in Split if split not in present]
        if missing:
            raise ValidationError(f"empty split(s): {', '.join(missing)}")

    def __len__(self) -> int:
        return len(self._assignment)

    def __contains__(self, doc_id: object) -> bool:
        return doc_id in self._assignment

    def split_of(self, doc_id: str) -> Split:
        try:
            return self._assignment[doc_id]
        except KeyError:
            raise ValidationError(f"document {doc_id!r} has no split") from None

    def doc_ids(self, split: Split) -> List[str]:
        """Doc ids of one split in file order"""
        return [doc_id for doc_id, value in self._assignment.items() if value == split]

    def items(self) -> Iterable[Tuple[str, Split]]:
        return self._assignment.items()

    def check_covers(self, documents: Sequence[Document]) -> None:
        """Every corpus doc appears exactly once and nothing else does"""
        corpus_ids = {doc.doc_id for doc in documents}
        unknown = [doc_id for doc_id in self._assignment if doc_id not in corpus_ids]
        if unknown:
            raise ValidationError(
                f"{len(unknown)} split entries not in corpus, e.g. {unknown[0]!r}"
            )
        missing = [
            doc.doc_id for doc in documents if doc.doc_id not in self._assignment
        ]
        if missing:
            raise ValidationError(
                f"{len(missing)} corpus documents have no split, e.g. {missing[0]!r}"
            )


def select_split(
    documents: Sequence[Document], splits: SplitAssignment, split: Split
) -> List[Document]:
    """Documents of one split in corpus order"""
    return [doc for doc in documents if splits.split_of(doc.doc_id) == split]


def load_corpus(path: PathLike) -> Tuple[List[Document], Tuple[str, ...]]:
    """
    Load a JSON-lines corpus.

    Returns:
        Tuple: (documents in file order, sorted code ids referenced by labels)
    """
    logger = create_data_logger()
    documents: List[Document] = []
    seen: Dict[str, int] = {}
    referenced: set[str] = set()
    for line_number, obj in iter_jsonl(path):
        record = parse_record(CorpusRecord, obj, path, line_number)
        if record.doc_id in seen:
            raise DataFormatError(
                f"duplicate doc_id {record.doc_id!r} (first on line "
                f"{seen[record.doc_id]})",
                path,
                line_number,
            )
        seen[record.doc_id] = line_number
        referenced.update(record.labels)
        documents.append(Document.from_text(record.doc_id, record.text, record.labels))
    logger.info(f"Loaded {len(documents)} documents from {path}")
    return documents, tuple(sorted(referenced))


def save_corpus(documents: Iterable[Document], path: PathLike) -> None:
    write_lines(
        path,
        (
            dumps_line(
                {
                    "doc_id": doc.doc_id,
                    "text": doc.raw_text,
                    "labels": sorted(doc.true_codes),
                }
            )
            for doc in documents
        ),
    )


def load_splits(
    path: PathLike, documents: Optional[Sequence[Document]] = None
) -> SplitAssignment:
    """Load `doc_id<TAB>split` lines; checks corpus coverage when given documents"""
    assignment: Dict[str, Split] = {}
    for line_number, (doc_id, split_name) in iter_tsv(path, 2):
        try:
            split = Split(split_name.strip())
        except ValueError:
            raise DataFormatError(
                f"unknown split {split_name!r}", path, line_number
            ) from None
        if doc_id in assignment:
            raise DataFormatError(f"doc_id {doc_id!r} listed twice", path, line_number)
        assignment[doc_id] = split
    splits = SplitAssignment(assignment)
    if documents is not None:
        splits.check_covers(documents)
    return splits


def save_splits(splits: SplitAssignment, path: PathLike) -> None:
    write_lines(path, (f"{doc_id}\t{split.value}" for doc_id, split in splits.items()))


def load_code_descriptions(path: PathLike) -> CodeSpace:
    """Load `code<TAB>description` lines in file order"""
    codes: List[str] = []
    descriptions: Dict[str, str] = {}
    for line_number, line in iter_lines(path):
        code, sep, description = line.partition("\t")
        code = code.strip()
        if not sep or not code:
            raise DataFormatError("expected code<TAB>description", path, line_number)
        if code in descriptions:
            raise DataFormatError(f"duplicate code {code!r}", path, line_number)
        if not description.strip():
            raise DataFormatError(f"empty description for {code!r}", path, line_number)
        codes.append(code)
        descriptions[code] = description.strip()
    if not codes:
        raise DataFormatError("no codes defined", path)
    return CodeSpace(codes, descriptions)


def save_code_descriptions(code_space: CodeSpace, path: PathLike) -> None:
    write_lines(
        path, (f"{code}\t{code_space.description(code)}" for code in code_space)
    )


def check_labels(documents: Sequence[Document], code_space: CodeSpace) -> None:
    """Every true code of every document must be in the code space"""
    for doc in documents:
        unknown = sorted(code for code in doc.true_codes if code not in code_space)
        if unknown:
            raise ValidationError(
                f"document {doc.doc_id!r} has codes outside the code space: "
                f"{', '.join(unknown)}"
            )


def label_matrix(documents: Sequence[Document], code_space: CodeSpace) -> np.ndarray:
    """Binary (n_docs, n_codes) matrix of true codes"""
    labels = np.zeros((len(documents), len(code_space)), dtype=np.int8)
    for row, doc in enumerate(documents):
        for code in doc.true_codes:
            if code in code_space:
                labels[row, code_space.index_of(code)] = 1
    return labels
