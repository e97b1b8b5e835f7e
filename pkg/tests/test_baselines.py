"""
Tests for the direct logistic baseline
"""

import math

import numpy as np

from proxyexplain.data.corpus import CodeSpace, featurize
from proxyexplain.modeling.baselines import (
    LogisticBaseline,
    predict_prob,
    predict_prob_documents,
    train_logistic,
)
from proxyexplain.modeling.config import TrainConfig
from proxyexplain.modeling.linear import load_model, save_model


def test_single_class_code_is_intercept_only(clinic_documents, clinic_splits):
    codes = CodeSpace(("a", "z"), {"a": "fever", "z": "never seen"})
    model = train_logistic(clinic_documents, clinic_splits, codes)
    assert model.coefficients[1] == {}
    assert model.intercepts[1] == math.log(1e-6 / (1.0 - 1e-6))
    probs = predict_prob_documents(model, clinic_documents)
    assert np.all(probs[:, 1] < 1e-5)


def test_baseline_separates_the_marker_token(
    clinic_documents, clinic_splits, clinic_codes
):
    config = TrainConfig(epochs=50, eta0=0.1, min_doc_freq=1)
    model = train_logistic(clinic_documents, clinic_splits, clinic_codes, config)
    probs = predict_prob_documents(model, clinic_documents)
    fever = np.array(["fever" in doc.tokens for doc in clinic_documents])
    assert probs[fever, 0].min() > probs[~fever, 0].max()
    assert np.all((probs > 0.0) & (probs < 1.0))

    features = model.featurize(clinic_documents[:1])
    single = predict_prob(model, featurize(clinic_documents[0], model.vocabulary))
    np.testing.assert_allclose(single, probs[0], atol=1e-12)
    assert features.shape == (1, len(model.vocabulary))


def test_baseline_is_deterministic_and_loadable(
    tmp_path, clinic_documents, clinic_splits, clinic_codes
):
    first = train_logistic(clinic_documents, clinic_splits, clinic_codes)
    second = train_logistic(clinic_documents, clinic_splits, clinic_codes)
    save_model(first, tmp_path / "first.json")
    save_model(second, tmp_path / "second.json")
    assert (tmp_path / "first.json").read_bytes() == (
        tmp_path / "second.json"
    ).read_bytes()

    loaded = load_model(tmp_path / "first.json", expected_kind="logistic")
    assert isinstance(loaded, LogisticBaseline)
    assert loaded.intercepts == first.intercepts
