"""
Tests for the command line: reports on stdout and exit codes
"""

import json

import pytest

from proxyexplain.cli import main
from proxyexplain.data.blackbox_io import (
    ImportanceDump,
    PredictionMatrix,
    save_importance_dump,
    save_predictions,
)
from proxyexplain.data.corpus import (
    Document,
    save_code_descriptions,
    save_corpus,
    save_splits,
)
from proxyexplain.explain.embeddings import EmbeddingTable, save_embeddings
from proxyexplain.explain.spans import Explanation, save_explanations
from proxyexplain.plausibility.models import AnnotationRecord, save_annotations


def invoke(capsys, *args):
    """Run the CLI; returns the exit code and the parsed stdout report"""
    capsys.readouterr()
    code = main([str(arg) for arg in args])
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == 0 and out.strip() else None)


@pytest.fixture
def clinic_files(
    tmp_path, clinic_documents, clinic_splits, clinic_codes, clinic_predictions
):
    files = {
        "corpus": tmp_path / "corpus.jsonl",
        "splits": tmp_path / "splits.tsv",
        "codes": tmp_path / "codes.tsv",
        "predictions": tmp_path / "predictions.jsonl",
    }
    save_corpus(clinic_documents, files["corpus"])
    save_splits(clinic_splits, files["splits"])
    save_code_descriptions(clinic_codes, files["codes"])
    save_predictions(clinic_predictions, files["predictions"])
    return files


def _setup_args(files, with_predictions=True):
    args = [
        "--corpus",
        files["corpus"],
        "--splits",
        files["splits"],
        "--codes",
        files["codes"],
    ]
    if with_predictions:
        args += ["--predictions", files["predictions"]]
    return args


@pytest.fixture
def trained(capsys, tmp_path, clinic_files):
    """Proxy and logistic model files trained on the clinic corpus"""
    proxy_path = tmp_path / "proxy.json"
    logistic_path = tmp_path / "logistic.json"
    code, report = invoke(
        capsys,
        "train-proxy",
        *_setup_args(clinic_files),
        "--out",
        proxy_path,
        "--epochs",
        "50",
        "--min-doc-freq",
        "1",
    )
    assert code == 0
    assert report["kind"] == "proxy"
    code, report = invoke(
        capsys,
        "train-logistic",
        *_setup_args(clinic_files, with_predictions=False),
        "--out",
        logistic_path,
        "--epochs",
        "50",
        "--eta0",
        "0.1",
        "--min-doc-freq",
        "1",
    )
    assert code == 0
    assert report["kind"] == "logistic"
    return {**clinic_files, "proxy": proxy_path, "logistic": logistic_path}


def _synth(capsys, out_dir):
    return invoke(
        capsys,
        "synth",
        "--out-dir",
        out_dir,
        "--seed",
        "5",
        "--n-docs",
        "60",
        "--vocab-size",
        "80",
        "--n-codes",
        "3",
    )


def test_synth_reruns_are_byte_identical(capsys, tmp_path):
    code, report = _synth(capsys, tmp_path / "first")
    assert code == 0
    assert report["n_docs"] == 60
    assert report["n_codes"] == 3
    assert _synth(capsys, tmp_path / "second")[0] == 0
    for name in ("corpus.jsonl", "splits.tsv", "codes.tsv", "predictions.jsonl"):
        first = (tmp_path / "first" / name).read_bytes()
        assert first == (tmp_path / "second" / name).read_bytes()
    assert (tmp_path / "first" / "planted.json").exists()


def test_training_reruns_are_byte_identical(capsys, tmp_path, trained):
    again = tmp_path / "proxy_again.json"
    code, _ = invoke(
        capsys,
        "train-proxy",
        *_setup_args(trained),
        "--out",
        again,
        "--epochs",
        "50",
        "--min-doc-freq",
        "1",
    )
    assert code == 0
    assert again.read_bytes() == trained["proxy"].read_bytes()


def test_eval_faithfulness_writes_reports_and_table(capsys, tmp_path, trained):
    table = tmp_path / "faithfulness.tsv"
    code, report = invoke(
        capsys,
        "eval-faithfulness",
        *_setup_args(trained),
        "--model",
        trained["proxy"],
        "--model",
        trained["logistic"],
        "--table",
        table,
    )
    assert code == 0
    assert report["split"] == "test"
    assert report["n_docs"] == 6
    assert set(report["reports"]) == {"Proxy", "Logistic"}
    assert -1.0 <= report["reports"]["Proxy"]["pearson"] <= 1.0
    rows = table.read_text(encoding="utf-8").splitlines()
    assert [row.split("\t")[0] for row in rows[1:]] == ["Logistic", "Proxy"]


def test_eval_labels_includes_the_black_box(capsys, trained):
    code, report = invoke(
        capsys,
        "eval-labels",
        *_setup_args(trained),
        "--model",
        trained["logistic"],
        "--k",
        "1",
        "--k",
        "2",
    )
    assert code == 0
    assert set(report["reports"]) == {"Logistic", "Black box"}
    black_box = report["reports"]["Black box"]
    assert black_box["macro_auc"] == 1.0
    assert "precision_at_1" in black_box
    assert "precision_at_2" in black_box


def test_explain_from_models_and_embeddings(capsys, tmp_path, trained):
    out = tmp_path / "proxy_explanations.jsonl"
    code, report = invoke(
        capsys,
        "explain",
        "--corpus",
        trained["corpus"],
        "--codes",
        trained["codes"],
        "--model",
        trained["proxy"],
        "--out",
        out,
    )
    assert code == 0
    assert report["model"] == "Proxy"
    assert report["explanations"] == 60
    assert len(out.read_text(encoding="utf-8").splitlines()) == 60

    vectors = tmp_path / "vectors.txt"
    save_embeddings(_embeddings(), vectors)
    code, report = invoke(
        capsys,
        "explain",
        "--corpus",
        trained["corpus"],
        "--codes",
        trained["codes"],
        "--source",
        "cosine",
        "--embeddings",
        vectors,
        "--doc-id",
        "d00",
        "--code",
        "a",
        "--out",
        tmp_path / "cosine.jsonl",
    )
    assert code == 0
    assert report["model"] == "cosine"
    assert report["explanations"] == 1


def test_explain_from_an_importance_dump(capsys, tmp_path, clinic_files):
    dump = tmp_path / "dump.jsonl"
    # d00 reads "patient stable fever rest cough clinic review notes"
    importances = {("d00", "a"): [0, 0, 9, 0, 0, 0, 0, 0]}
    save_importance_dump(ImportanceDump(importances), dump)
    out = tmp_path / "dump_explanations.jsonl"
    code, report = invoke(
        capsys,
        "explain",
        "--corpus",
        clinic_files["corpus"],
        "--codes",
        clinic_files["codes"],
        "--source",
        "dump",
        "--dump",
        dump,
        "--doc-id",
        "d00",
        "--code",
        "a",
        "--out",
        out,
    )
    assert code == 0
    assert report["explanations"] == 1
    assert "fever" in json.loads(out.read_text(encoding="utf-8"))["tokens"]


def test_describe_model_lists_top_features(capsys, trained):
    code, report = invoke(
        capsys, "describe-model", "--model", trained["logistic"], "--top-k", "1"
    )
    assert code == 0
    assert report["summary"]["kind"] == "logistic"
    assert report["top_features"]["a"][0][0] == "fever"
    assert set(report["top_features"]) == {"a", "b"}


def _embeddings() -> EmbeddingTable:
    return EmbeddingTable(
        {
            "fever": [1.0, 0.0, 0.0],
            "pyrexia": [0.9, 0.1, 0.0],
            "cough": [0.0, 1.0, 0.0],
            "rest": [0.0, 0.0, 1.0],
            "notes": [0.1, 0.0, 0.9],
            "review": [0.0, 0.1, 0.9],
            "patient": [0.2, 0.2, 0.6],
        },
        3,
    )


def _annotations():
    rows = [
        ("e1", "a", "fever", 2),
        ("e1", "a", "rest", 0),
        ("e2", "a", "pyrexia", 1),
        ("e2", "a", "notes", 0),
        ("e3", "b", "cough", 2),
        ("e3", "b", "review", 0),
        ("e4", "a", "fever patient", 1),
        ("e4", "a", "patient", 0),
        ("e5", "b", "cough patient", 2),
        ("e5", "b", "rest notes", 0),
    ]
    return [
        AnnotationRecord(example_id=e, code=c, explanation=text, rating=r)
        for e, c, text, r in rows
    ]


@pytest.fixture
def plausibility_files(tmp_path, trained):
    annotations = tmp_path / "annotations.jsonl"
    vectors = tmp_path / "vectors.txt"
    save_annotations(_annotations(), annotations)
    save_embeddings(_embeddings(), vectors)
    return {**trained, "annotations": annotations, "embeddings": vectors}


def test_plausibility_leave_one_out(capsys, plausibility_files):
    files = plausibility_files
    code, report = invoke(
        capsys,
        "plausibility",
        "--annotations",
        files["annotations"],
        "--codes",
        files["codes"],
        "--embeddings",
        files["embeddings"],
        "--protocol",
        "e1",
    )
    assert code == 0
    assert report["protocol"] == "e1"
    assert report["n_folds"] == 5
    assert len(report["probabilities"]) == 10
    assert 0.0 <= report["accuracy"] <= 1.0


def test_plausibility_scores_explanation_files(capsys, tmp_path, plausibility_files):
    files = plausibility_files
    explanation_files = []
    for kind in ("proxy", "logistic"):
        out = tmp_path / f"{kind}_explanations.jsonl"
        code, _ = invoke(
            capsys,
            "explain",
            "--corpus",
            files["corpus"],
            "--codes",
            files["codes"],
            "--model",
            files[kind],
            "--out",
            out,
        )
        assert code == 0
        explanation_files += ["--explanations", out]

    code, report = invoke(
        capsys,
        "plausibility",
        "--annotations",
        files["annotations"],
        "--codes",
        files["codes"],
        "--embeddings",
        files["embeddings"],
        "--protocol",
        "full",
        *explanation_files,
        "--n-bootstrap",
        "200",
        "--sweep-rate",
        "0.2",
    )
    assert code == 0
    assert [score["model"] for score in report] == ["Proxy", "Logistic"]
    for score in report:
        lo, hi = score["interval"]
        assert 0 <= lo <= hi <= 60
        assert 0 <= score["score"] <= 60
        assert set(score["sweep"]) == {"0.2"}
    assert set(report[0]["p_vs"]) == {"Logistic"}


def test_assign_gives_each_model_a_candidate(capsys, plausibility_files):
    files = plausibility_files
    code, report = invoke(
        capsys,
        "assign",
        "--annotations",
        files["annotations"],
        "--model",
        files["proxy"],
        "--model",
        files["logistic"],
    )
    assert code == 0
    assert set(report["assignments"]) == {"e1", "e2", "e3", "e4", "e5"}
    assert set(report["human_scores"]) == {"Proxy", "Logistic"}
    assert report["over_selection"] == len(report["over_selected_examples"])


def test_usage_errors_exit_with_one(capsys, tmp_path, clinic_files):
    out = tmp_path / "model.json"
    assert invoke(capsys, "train-logistic", "--out", out)[0] == 1
    assert (
        invoke(
            capsys,
            "train-proxy",
            *_setup_args(clinic_files),
            "--out",
            out,
            "--alpha",
            "-1",
        )[0]
        == 1
    )
    missing = dict(clinic_files, corpus=tmp_path / "missing.jsonl")
    assert invoke(capsys, "train-proxy", *_setup_args(missing), "--out", out)[0] == 1
    cosine_without_vectors = [
        "explain",
        "--corpus",
        clinic_files["corpus"],
        "--codes",
        clinic_files["codes"],
        "--source",
        "cosine",
        "--out",
        tmp_path / "out.jsonl",
    ]
    assert invoke(capsys, *cosine_without_vectors)[0] == 1
    assert not out.exists()


def test_data_errors_exit_with_two(capsys, tmp_path, clinic_files, clinic_documents):
    bad_corpus = tmp_path / "bad_corpus.jsonl"
    relabeled = [Document.from_text("d00", "fever", ["zz"])] + clinic_documents[1:]
    save_corpus(relabeled, bad_corpus)
    files = dict(clinic_files, corpus=bad_corpus)
    out = tmp_path / "model.json"
    assert (
        invoke(
            capsys, "train-logistic", *_setup_args(files, False), "--out", out
        )[0]
        == 2
    )

    reordered = tmp_path / "reordered.jsonl"
    save_predictions(
        PredictionMatrix(
            tuple(doc.doc_id for doc in clinic_documents),
            ("b", "a"),
            [[0.5, 0.5]] * len(clinic_documents),
        ),
        reordered,
    )
    files = dict(clinic_files, predictions=reordered)
    assert invoke(capsys, "train-proxy", *_setup_args(files), "--out", out)[0] == 2
    assert not out.exists()


def test_grid_search_prefers_the_larger_of_tied_alphas(capsys, tmp_path, clinic_files):
    code, report = invoke(
        capsys,
        "train-proxy",
        *_setup_args(clinic_files),
        "--out",
        tmp_path / "proxy.json",
        "--min-doc-freq",
        "1",
        "--grid",
        "--alpha-grid",
        "10",
        "--alpha-grid",
        "100",
    )
    assert code == 0
    # both alphas zero every coefficient, so the validation MSE ties
    assert report["alpha"] == 100.0
    assert report["nonzero_coefficients"] == 0


def test_plausibility_leave_one_out_scores_reassigned_models(
    capsys, plausibility_files
):
    files = plausibility_files
    code, report = invoke(
        capsys,
        "plausibility",
        "--annotations",
        files["annotations"],
        "--codes",
        files["codes"],
        "--embeddings",
        files["embeddings"],
        "--protocol",
        "e2",
        "--model",
        files["proxy"],
        "--model",
        files["logistic"],
    )
    assert code == 0
    assert set(report["model_scores"]) == {"Proxy", "Logistic"}
    assert set(report["human_scores"]) == {"Proxy", "Logistic"}
    for score in report["model_scores"].values():
        assert 0 <= score <= 5


def test_plausibility_rejects_explanations_of_unknown_codes(
    capsys, tmp_path, plausibility_files
):
    files = plausibility_files
    stray = tmp_path / "stray.jsonl"
    save_explanations(
        [
            Explanation(
                doc_id="d00",
                code="zz",
                span_tokens=("fever",),
                span_start=0,
                anchor_start=0,
                anchor_score=1.0,
                model="Proxy",
            )
        ],
        stray,
    )
    args = [
        "plausibility",
        "--annotations",
        files["annotations"],
        "--codes",
        files["codes"],
        "--embeddings",
        files["embeddings"],
        "--protocol",
        "full",
        "--explanations",
        stray,
    ]
    assert invoke(capsys, *args)[0] == 2
    assert invoke(capsys, *args, "--model", files["proxy"])[0] == 1


@pytest.mark.parametrize(
    "option, value",
    [
        ("--target-rate", "0"),
        ("--target-rate", "1"),
        ("--level", "1"),
        ("--l2", "0"),
        ("--sweep-rate", "1"),
    ],
)
def test_open_interval_options_are_usage_errors(
    capsys, plausibility_files, option, value
):
    files = plausibility_files
    code, _ = invoke(
        capsys,
        "plausibility",
        "--annotations",
        files["annotations"],
        "--codes",
        files["codes"],
        "--embeddings",
        files["embeddings"],
        option,
        value,
    )
    assert code == 1


def test_threshold_and_learning_rate_bounds_are_usage_errors(
    capsys, tmp_path, trained
):
    for threshold in ("0", "1"):
        code, _ = invoke(
            capsys,
            "eval-faithfulness",
            *_setup_args(trained),
            "--model",
            trained["proxy"],
            "--threshold",
            threshold,
        )
        assert code == 1
    code, _ = invoke(
        capsys,
        "train-proxy",
        *_setup_args(trained),
        "--out",
        tmp_path / "zero_rate.json",
        "--eta0",
        "0",
    )
    assert code == 1
