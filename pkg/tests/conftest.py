"""
Shared fixtures for the proxyexplain test suite
"""

import os
import sys
import tempfile
from pathlib import Path

# Logs of the test run stay out of the home directory
os.environ.setdefault(
    "PROXYEXPLAIN_LOG_DIR", tempfile.mkdtemp(prefix="proxyexplain-test-logs-")
)

# Add the src directory to Python path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import pytest  # noqa: E402

from proxyexplain.data.blackbox_io import PredictionMatrix  # noqa: E402
from proxyexplain.data.corpus import (  # noqa: E402
    CodeSpace,
    Document,
    SplitAssignment,
)
from proxyexplain.data.models import Split  # noqa: E402
from proxyexplain.data.synth import (  # noqa: E402
    SyntheticCorpus,
    emit_predictions,
    generate_corpus,
)
from proxyexplain.modeling.baselines import (  # noqa: E402
    LogisticBaseline,
    train_logistic,
)
from proxyexplain.modeling.config import TrainConfig  # noqa: E402
from proxyexplain.modeling.proxy import ProxyModel, train_proxy  # noqa: E402

CLINIC_WORDS = ("patient", "stable", "rest", "clinic", "review", "notes")


def clinic_text(index: int) -> str:
    """Six filler words plus 'fever' on even docs and 'cough' every third doc"""
    words = [CLINIC_WORDS[(index + k) % len(CLINIC_WORDS)] for k in range(6)]
    if index % 2 == 0:
        words.insert(2, "fever")
    if index % 3 == 0:
        words.insert(4, "cough")
    return " ".join(words)


def clinic_probs(index: int) -> tuple[float, float]:
    return (0.8 if index % 2 == 0 else 0.2, 0.7 if index % 3 == 0 else 0.1)


@pytest.fixture
def clinic_documents() -> list[Document]:
    """30 small documents with codes 'a' (fever) and 'b' (cough)"""
    documents = []
    for i in range(30):
        p_a, p_b = clinic_probs(i)
        labels = [code for code, p in (("a", p_a), ("b", p_b)) if p >= 0.5]
        documents.append(Document.from_text(f"d{i:02d}", clinic_text(i), labels))
    return documents


@pytest.fixture
def clinic_splits(clinic_documents: list[Document]) -> SplitAssignment:
    """First 18 train, next 6 validation, last 6 test"""
    assignment = {}
    for i, doc in enumerate(clinic_documents):
        if i < 18:
            assignment[doc.doc_id] = Split.TRAIN
        elif i < 24:
            assignment[doc.doc_id] = Split.VALIDATION
        else:
            assignment[doc.doc_id] = Split.TEST
    return SplitAssignment(assignment)


@pytest.fixture
def clinic_codes() -> CodeSpace:
    return CodeSpace(("a", "b"), {"a": "fever", "b": "cough"})


@pytest.fixture
def clinic_predictions(clinic_documents: list[Document]) -> PredictionMatrix:
    return PredictionMatrix(
        tuple(doc.doc_id for doc in clinic_documents),
        ("a", "b"),
        [clinic_probs(i) for i in range(len(clinic_documents))],
    )


@pytest.fixture(scope="session")
def small_setup() -> SyntheticCorpus:
    """Cheap planted setup for unit tests"""
    return generate_corpus(seed=5, vocab_size=80, n_docs=150, n_codes=4)


@pytest.fixture(scope="session")
def default_setup() -> SyntheticCorpus:
    """Planted setup at the default sizes: seed 13, 2000 docs, 500 tokens, 20 codes"""
    return generate_corpus()


@pytest.fixture(scope="session")
def default_predictions(default_setup: SyntheticCorpus) -> PredictionMatrix:
    return emit_predictions(default_setup.planted, default_setup.documents)


@pytest.fixture(scope="session")
def default_proxy(
    default_setup: SyntheticCorpus, default_predictions: PredictionMatrix
) -> ProxyModel:
    return train_proxy(
        default_setup.documents, default_predictions, default_setup.splits
    )


@pytest.fixture(scope="session")
def realizable_proxy(
    default_setup: SyntheticCorpus, default_predictions: PredictionMatrix
) -> ProxyModel:
    return train_proxy(
        default_setup.documents,
        default_predictions,
        default_setup.splits,
        TrainConfig(alpha=1e-5),
    )


@pytest.fixture(scope="session")
def default_logistic(default_setup: SyntheticCorpus) -> LogisticBaseline:
    return train_logistic(
        default_setup.documents, default_setup.splits, default_setup.code_space
    )
