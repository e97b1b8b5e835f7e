"""
Tests for the proxy regressors, the shared SGD core and model files
"""

import dataclasses
import math

import numpy as np
import pytest
from scipy import sparse

from proxyexplain.data.corpus import Vocabulary, featurize
from proxyexplain.data.synth import emit_predictions
from proxyexplain.modeling.baselines import LogisticBaseline
from proxyexplain.modeling.config import ExecutionConfig, TrainConfig
from proxyexplain.modeling.linear import (
    load_model,
    model_summary,
    save_model,
    top_features,
)
from proxyexplain.modeling.proxy import (
    ProxyModel,
    grid_search_alpha,
    log_transform,
    log_transform_array,
    predict_log,
    predict_log_documents,
    predict_prob_documents,
    train_code_regressor,
    train_proxy,
    validation_mse,
)
from proxyexplain.utils.errors import ModelFileError, TrainingError, ValidationError


def test_log_transform_clamps_small_probabilities():
    assert log_transform(1.0) == 0.0
    assert log_transform(0.0) == pytest.approx(math.log(1e-6))
    assert log_transform(1e-9, clamp_eps=1e-3) == pytest.approx(math.log(1e-3))
    np.testing.assert_allclose(
        log_transform_array(np.array([0.5, 0.0])), [math.log(0.5), math.log(1e-6)]
    )
    with pytest.raises(ValidationError):
        log_transform(1.2)


def test_regressor_recovers_least_squares_line():
    rng = np.random.default_rng(0)
    x = rng.integers(0, 6, size=50).astype(float)
    y = 2.0 * x + 1.0
    config = TrainConfig(alpha=0.0, epochs=50, eta0=0.01)
    coefficients, intercept = train_code_regressor(
        sparse.csr_matrix(x.reshape(-1, 1)), y, config
    )

    design = np.column_stack([x, np.ones_like(x)])
    (slope, offset), *_ = np.linalg.lstsq(design, y, rcond=None)
    assert coefficients[0] == pytest.approx(slope, abs=1e-2)
    assert intercept == pytest.approx(offset, abs=1e-2)


def test_strong_l1_leaves_only_the_intercept():
    rng = np.random.default_rng(1)
    x = rng.integers(0, 6, size=50).astype(float)
    y = 0.1 * x + 3.0
    coefficients, intercept = train_code_regressor(
        sparse.csr_matrix(x.reshape(-1, 1)), y, TrainConfig(alpha=10.0, epochs=5)
    )
    assert coefficients == {}
    assert intercept == pytest.approx(y.mean(), abs=1e-2)


def test_regressor_rejects_bad_inputs():
    with pytest.raises(TrainingError):
        train_code_regressor(sparse.csr_matrix((0, 3)), [], TrainConfig())
    with pytest.raises(TrainingError):
        train_code_regressor(sparse.csr_matrix(np.ones((2, 1))), [1.0], TrainConfig())


def test_same_seed_gives_identical_model_files(tmp_path, small_setup):
    predictions = emit_predictions(small_setup.planted, small_setup.documents)
    paths = []
    for run in range(2):
        model = train_proxy(
            small_setup.documents, predictions, small_setup.splits, TrainConfig()
        )
        paths.append(tmp_path / f"proxy{run}.json")
        save_model(model, paths[-1])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_worker_count_does_not_change_the_model(small_setup):
    predictions = emit_predictions(small_setup.planted, small_setup.documents)
    sequential = train_proxy(small_setup.documents, predictions, small_setup.splits)
    threaded = train_proxy(
        small_setup.documents,
        predictions,
        small_setup.splits,
        execution=ExecutionConfig(max_workers=3),
    )
    assert threaded.coefficients == sequential.coefficients
    assert threaded.intercepts == sequential.intercepts


def test_proxy_never_reads_true_codes(small_setup):
    predictions = emit_predictions(small_setup.planted, small_setup.documents)
    unlabeled = [
        dataclasses.replace(doc, true_codes=frozenset())
        for doc in small_setup.documents
    ]
    labeled = train_proxy(small_setup.documents, predictions, small_setup.splits)
    blind = train_proxy(unlabeled, predictions, small_setup.splits)
    assert blind.coefficients == labeled.coefficients
    assert blind.intercepts == labeled.intercepts


def test_predictions_are_log_linear_and_capped(small_setup):
    predictions = emit_predictions(small_setup.planted, small_setup.documents)
    model = train_proxy(small_setup.documents, predictions, small_setup.splits)
    docs = small_setup.documents[:10]
    logs = predict_log_documents(model, docs)
    probs = predict_prob_documents(model, docs)
    np.testing.assert_allclose(probs, np.exp(np.minimum(logs, 0.0)))
    assert probs.max() <= 1.0

    features = model.featurize(docs[:1])
    single = predict_log(model, featurize(docs[0], model.vocabulary))
    np.testing.assert_allclose(single, model.linear_scores(features)[0], atol=1e-12)


def test_validation_mse_has_one_value_per_code(small_setup):
    predictions = emit_predictions(small_setup.planted, small_setup.documents)
    model = train_proxy(small_setup.documents, predictions, small_setup.splits)
    mse = validation_mse(model, small_setup.documents, predictions, small_setup.splits)
    assert mse.shape == (4,)
    assert np.all(mse >= 0.0)


def test_grid_search_picks_a_candidate(small_setup):
    predictions = emit_predictions(small_setup.planted, small_setup.documents)
    grid = (1e-4, 1e-2)
    chosen = grid_search_alpha(
        small_setup.documents,
        predictions,
        small_setup.splits,
        grid,
        TrainConfig(epochs=2),
    )
    assert chosen in grid

    with pytest.raises(ValidationError):
        grid_search_alpha(
            small_setup.documents, predictions, small_setup.splits, (-1.0,)
        )
    with pytest.raises(ValidationError):
        grid_search_alpha(small_setup.documents, predictions, small_setup.splits, ())


def test_grid_search_ties_go_to_the_larger_alpha(small_setup):
    predictions = emit_predictions(small_setup.planted, small_setup.documents)
    # both alphas zero every coefficient, leaving identical intercept-only fits
    for grid in ((1e4, 1e5), (1e5, 1e4)):
        chosen = grid_search_alpha(
            small_setup.documents,
            predictions,
            small_setup.splits,
            grid,
            TrainConfig(epochs=2),
        )
        assert chosen == 1e5
    assert (
        grid_search_alpha(
            small_setup.documents,
            predictions,
            small_setup.splits,
            (1e-4,),
            TrainConfig(epochs=1),
        )
        == 1e-4
    )


def _toy_model() -> ProxyModel:
    return ProxyModel(
        Vocabulary(["cough", "fever", "rash"]),
        ("a", "b"),
        ({1: 0.75, 0: 0.25, 2: -0.5}, {}),
        (-1.0, -2.0),
        TrainConfig(alpha=1e-3),
    )


def test_model_file_keeps_the_model(tmp_path):
    model = _toy_model()
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    assert isinstance(loaded, ProxyModel)
    assert loaded.coefficients == model.coefficients
    assert loaded.intercepts == model.intercepts
    assert loaded.config == model.config
    assert loaded.vocabulary == model.vocabulary

    with pytest.raises(ModelFileError):
        load_model(path, expected_kind=LogisticBaseline.kind)
    with pytest.raises(ModelFileError):
        load_model(path, vocabulary=Vocabulary(["cough", "fever"]))


def test_corrupted_model_files_are_rejected(tmp_path):
    path = tmp_path / "model.json"
    save_model(_toy_model(), path)
    text = path.read_text(encoding="utf-8")

    path.write_text(text.replace('"rash"', '"rush"'), encoding="utf-8")
    with pytest.raises(ModelFileError):
        load_model(path)

    path.write_text(text.replace('"version": 1', '"version": 7'), encoding="utf-8")
    with pytest.raises(ModelFileError):
        load_model(path)

    path.write_text(text[: len(text) // 2], encoding="utf-8")
    with pytest.raises(ModelFileError):
        load_model(path)


def test_top_features_and_summary():
    model = _toy_model()
    assert top_features(model, "a", 5) == [("fever", 0.75), ("cough", 0.25)]
    assert top_features(model, "a", 1) == [("fever", 0.75)]
    assert top_features(model, "b") == []

    summary = model_summary(model)
    assert summary["nonzero_coefficients"] == 3
    assert summary["dense_parameters"] == 2 * (3 + 1)
    assert summary["nonzero_per_code"] == {"a": 3, "b": 0}


def test_model_rejects_out_of_range_indices():
    with pytest.raises(ValidationError):
        ProxyModel(Vocabulary(["a"]), ("c",), ({3: 1.0},), (0.0,), TrainConfig())
