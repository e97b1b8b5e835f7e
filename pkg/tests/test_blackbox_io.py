"""
Tests for black-box prediction files, binarization and importance dumps
"""

import json

import numpy as np
import pytest

from proxyexplain.data.blackbox_io import (
    ImportanceDump,
    PredictionMatrix,
    binarize,
    load_importance_dump,
    load_predictions,
    save_importance_dump,
    save_predictions,
)
from proxyexplain.data.corpus import Document
from proxyexplain.utils.errors import DataFormatError, ValidationError


def _write_jsonl(path, rows):
    path.write_text("".join(json.dumps(row) + "\n" for row in rows), encoding="utf-8")


def test_binarize_includes_the_threshold():
    matrix = PredictionMatrix(("d1",), ("a", "b", "c"), [[0.4, 0.5, 0.6]])
    binary = binarize(matrix, 0.5)
    np.testing.assert_array_equal(binary.labels, [[0, 1, 1]])
    with pytest.raises(ValidationError):
        binarize(matrix, 1.0)


def test_prediction_matrix_validates_inputs():
    with pytest.raises(ValidationError):
        PredictionMatrix(("d1",), ("a",), [[1.5]])
    with pytest.raises(ValidationError):
        PredictionMatrix(("d1", "d2"), ("a",), [[0.5]])
    with pytest.raises(ValidationError):
        PredictionMatrix(("d1", "d1"), ("a",), [[0.5], [0.5]])


def test_rows_for_aligns_and_reports_missing(clinic_predictions):
    rows = clinic_predictions.rows_for(["d03", "d00"])
    np.testing.assert_allclose(rows, [[0.2, 0.7], [0.8, 0.7]])
    with pytest.raises(ValidationError):
        clinic_predictions.rows_for(["d00", "nope"])


def test_prediction_file_keeps_values(tmp_path, clinic_predictions, clinic_codes):
    path = tmp_path / "predictions.jsonl"
    save_predictions(clinic_predictions, path)
    loaded = load_predictions(path, clinic_codes, ["d00", "d29"])
    assert loaded.doc_ids == clinic_predictions.doc_ids
    np.testing.assert_array_equal(loaded.probs, clinic_predictions.probs)


def test_load_predictions_header_must_match_code_space(tmp_path, clinic_codes):
    path = tmp_path / "predictions.jsonl"
    _write_jsonl(path, [{"codes": ["b", "a"]}, {"doc_id": "d1", "probs": [0.1, 0.2]}])
    with pytest.raises(ValidationError):
        load_predictions(path, clinic_codes)


@pytest.mark.parametrize(
    "row",
    [
        {"doc_id": "d1", "probs": [0.1, 1.2]},
        {"doc_id": "d1", "probs": [0.1]},
        {"doc_id": "d1", "probs": [0.1, 0.2], "extra": True},
    ],
)
def test_load_predictions_rejects_bad_rows(tmp_path, clinic_codes, row):
    path = tmp_path / "predictions.jsonl"
    _write_jsonl(path, [{"codes": ["a", "b"]}, row])
    with pytest.raises(DataFormatError) as info:
        load_predictions(path, clinic_codes)
    assert info.value.line_number == 2


def test_load_predictions_rejects_duplicates_and_gaps(tmp_path, clinic_codes):
    path = tmp_path / "predictions.jsonl"
    row = {"doc_id": "d1", "probs": [0.1, 0.2]}
    _write_jsonl(path, [{"codes": ["a", "b"]}, row, row])
    with pytest.raises(DataFormatError):
        load_predictions(path, clinic_codes)

    _write_jsonl(path, [{"codes": ["a", "b"]}, row])
    with pytest.raises(ValidationError):
        load_predictions(path, clinic_codes, ["d1", "d2"])

    path.write_text("", encoding="utf-8")
    with pytest.raises(DataFormatError):
        load_predictions(path, clinic_codes)


def test_importance_dump_checks_token_counts(tmp_path):
    corpus = [Document.from_text("d1", "fever and cough")]
    path = tmp_path / "dump.jsonl"

    _write_jsonl(path, [{"doc_id": "d1", "code": "a", "importances": [0.1, 0.2]}])
    with pytest.raises(ValidationError):
        load_importance_dump(path, corpus)

    _write_jsonl(path, [{"doc_id": "d9", "code": "a", "importances": [0.1]}])
    with pytest.raises(DataFormatError):
        load_importance_dump(path, corpus)

    _write_jsonl(path, [{"doc_id": "d1", "code": "a", "importances": [0.1, 0.2, 0.3]}])
    dump = load_importance_dump(path, corpus)
    assert ("d1", "a") in dump
    np.testing.assert_array_equal(dump.get("d1", "a"), [0.1, 0.2, 0.3])
    with pytest.raises(ValidationError):
        dump.get("d1", "b")


def test_importance_dump_file_keeps_entries(tmp_path):
    corpus = [Document.from_text("d1", "fever and cough")]
    dump = ImportanceDump({("d1", "a"): [0.5, -0.25, 1.0]})
    path = tmp_path / "dump.jsonl"
    save_importance_dump(dump, path)
    loaded = load_importance_dump(path, corpus)
    assert loaded.keys() == [("d1", "a")]
    np.testing.assert_array_equal(loaded.get("d1", "a"), [0.5, -0.25, 1.0])


def test_binarize_is_monotone_in_the_threshold():
    rng = np.random.default_rng(4)
    matrix = PredictionMatrix(
        tuple(f"d{i}" for i in range(40)), ("a", "b", "c"), rng.random((40, 3))
    )
    previous = None
    for threshold in (0.1, 0.3, 0.42, 0.5, 0.7, 0.9):
        labels = binarize(matrix, threshold).labels
        if previous is not None:
            assert np.all(labels <= previous)
        previous = labels
    zeros = PredictionMatrix(("d1",), ("a", "b"), [[0.0, 0.0]])
    np.testing.assert_array_equal(binarize(zeros).labels, [[0, 0]])
    pair = PredictionMatrix(("d1",), ("a", "b"), [[0.41, 0.43]])
    np.testing.assert_array_equal(binarize(pair, 0.42).labels, [[0, 1]])
