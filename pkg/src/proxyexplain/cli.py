"""
Command line interface: synthetic data, training, evaluation, explanations
and plausibility scoring

Reports go to standard output as JSON; logs go to standard error.
Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

import json
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import click
import numpy as np
import pydantic
import typer
from rich.console import Console

from .config import RunConfig
from .data.blackbox_io import (
    PredictionMatrix,
    load_importance_dump,
    load_predictions,
    save_predictions,
)
from .data.config import SynthConfig
from .data.corpus import (
    CodeSpace,
    Document,
    SplitAssignment,
    check_labels,
    label_matrix,
    load_code_descriptions,
    load_corpus,
    load_splits,
    save_code_descriptions,
    save_corpus,
    save_splits,
    select_split,
)
from .data.models import Split
from .data.synth import emit_predictions, generate_corpus, save_planted
from .evaluation.reports import (
    faithfulness_report,
    faithfulness_table,
    label_report,
    label_table,
)
from .explain.config import ExtractionConfig
from .explain.embeddings import load_embeddings
from .explain.spans import (
    CosineExplainer,
    DumpExplainer,
    Explainer,
    ModelExplainer,
    explain_documents,
    load_explanations,
    save_explanations,
)
from .modeling import baselines, proxy
from .modeling.config import DEFAULT_ALPHA_GRID, ExecutionConfig, TrainConfig
from .modeling.linear import (
    LinearCodeModel,
    load_model,
    model_summary,
    save_model,
    top_features,
)
from .plausibility.classifier import featurize_text, train_classifier
from .plausibility.config import PlausibilityConfig
from .plausibility.models import load_annotations
from .plausibility.protocols import Protocol, loo_evaluate
from .plausibility.scoring import (
    CandidateScorer,
    candidate_sets,
    human_scores,
    linear_candidate_scorer,
    plausibility_scores,
    predicted_scores,
    reassign_annotations,
)
from .utils.errors import ProxyExplainError, ValidationError
from .utils.file_utils import write_text_atomic
from .utils.logger import create_module_logger

app = typer.Typer(
    name="proxyexplain",
    help="Faithful proxy models and explanations for black-box code predictions.",
    add_completion=False,
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)

MODEL_NAMES = {"proxy": "Proxy", "logistic": "Logistic"}
BLACK_BOX = "Black box"

UNIT_INTERVAL = click.FloatRange(0.0, 1.0, min_open=True, max_open=True)
POSITIVE = click.FloatRange(0.0, min_open=True)


class Source(str, Enum):
    model = "model"
    dump = "dump"
    cosine = "cosine"


class PlausibilityMode(str, Enum):
    e1 = "e1"
    e2 = "e2"
    full = "full"


def _input(help_text: str) -> Any:
    return typer.Option(
        ..., exists=True, dir_okay=False, readable=True, help=help_text
    )


def _emit(payload: Any) -> None:
    typer.echo(json.dumps(payload, indent=2, allow_nan=False))


def _run_config(subcommand: str, **fields: Any) -> RunConfig:
    run = RunConfig(subcommand=subcommand, **fields)
    create_module_logger("cli").debug(f"{subcommand}: {run.model_dump_json()}")
    return run


def _load_setup(
    corpus: Path, splits: Path, codes: Path
) -> Tuple[List[Document], SplitAssignment, CodeSpace]:
    documents, _ = load_corpus(corpus)
    code_space = load_code_descriptions(codes)
    check_labels(documents, code_space)
    return documents, load_splits(splits, documents), code_space


def _model_probabilities(
    model: LinearCodeModel, documents: Sequence[Document]
) -> np.ndarray:
    if isinstance(model, proxy.ProxyModel):
        return proxy.predict_prob_documents(model, documents)
    if isinstance(model, baselines.LogisticBaseline):
        return baselines.predict_prob_documents(model, documents)
    raise ValidationError(f"cannot score a {model.kind} model")


def _model_name(model: LinearCodeModel, path: Path, taken: Dict[str, Any]) -> str:
    name = MODEL_NAMES.get(model.kind, model.kind)
    return name if name not in taken else f"{name} ({path.stem})"


def _candidates(
    model_paths: Sequence[Path],
    candidate_paths: Sequence[Path],
    documents: Sequence[Document],
    code_space: CodeSpace,
) -> Dict[str, np.ndarray]:
    """Probability matrices of every model file and candidate predictions file"""
    doc_ids = [doc.doc_id for doc in documents]
    candidates: Dict[str, np.ndarray] = {}
    for path in model_paths:
        model = load_model(path)
        model.check_codes(code_space)
        name = _model_name(model, path, candidates)
        candidates[name] = _model_probabilities(model, documents)
    for path in candidate_paths:
        matrix = load_predictions(path, code_space, doc_ids)
        name = path.stem if path.stem not in candidates else str(path)
        candidates[name] = matrix.rows_for(doc_ids)
    if not candidates:
        raise typer.BadParameter("give at least one --model or --candidate")
    return candidates


@app.command()
def synth(
    out_dir: Path = typer.Option(..., file_okay=False, help="Output directory"),
    seed: int = typer.Option(13, help="Global seed"),
    n_docs: int = typer.Option(2000, min=3, help="Number of documents"),
    vocab_size: int = typer.Option(500, min=1, help="Vocabulary size"),
    n_codes: int = typer.Option(20, min=1, help="Number of codes"),
    noise_sd: float = typer.Option(0.0, min=0.0, help="Log-space noise sd"),
) -> None:
    """Write a synthetic corpus, its splits, codes, black-box predictions and
    planted weights."""
    run = _run_config(
        "synth",
        output=out_dir / "corpus.jsonl",
        seed=seed,
        synth=SynthConfig(
            seed=seed,
            n_docs=n_docs,
            vocab_size=vocab_size,
            n_codes=n_codes,
            noise_sd=noise_sd,
        ),
    )
    setup = generate_corpus(config=run.synth)
    target = run.output.parent if run.output else out_dir
    files = {
        "corpus": target / "corpus.jsonl",
        "splits": target / "splits.tsv",
        "codes": target / "codes.tsv",
        "predictions": target / "predictions.jsonl",
        "planted": target / "planted.json",
    }
    save_corpus(setup.documents, files["corpus"])
    save_splits(setup.splits, files["splits"])
    save_code_descriptions(setup.code_space, files["codes"])
    save_predictions(
        emit_predictions(setup.planted, setup.documents), files["predictions"]
    )
    save_planted(setup.planted, files["planted"])
    _emit(
        {
            "n_docs": len(setup.documents),
            "n_codes": len(setup.code_space),
            "vocab_size": run.synth.vocab_size,
            "seed": seed,
            "files": {name: str(path) for name, path in files.items()},
        }
    )


def _train_config(
    alpha: float,
    epochs: int,
    eta0: float,
    seed: int,
    binary: bool,
    min_doc_freq: int,
) -> TrainConfig:
    return TrainConfig(
        alpha=alpha,
        epochs=epochs,
        eta0=eta0,
        seed=seed,
        binary_features=binary,
        min_doc_freq=min_doc_freq,
    )


@app.command("train-proxy")
def train_proxy_cmd(
    corpus: Path = _input("Corpus JSON-lines file"),
    splits: Path = _input("Split assignment file"),
    codes: Path = _input("Code descriptions file"),
    predictions: Path = _input("Black-box predictions file"),
    out: Path = typer.Option(..., dir_okay=False, help="Model file to write"),
    alpha: float = typer.Option(1e-4, min=0.0, help="L1 strength"),
    grid: bool = typer.Option(False, "--grid", help="Choose alpha on validation"),
    alpha_grid: List[float] = typer.Option(
        [], "--alpha-grid", min=0.0, help="Candidate alphas for --grid"
    ),
    epochs: int = typer.Option(10, min=1),
    eta0: float = typer.Option(0.01, click_type=POSITIVE),
    seed: int = typer.Option(13, help="Global seed"),
    binary: bool = typer.Option(False, "--binary", help="Binary token features"),
    min_doc_freq: int = typer.Option(3, min=1),
    workers: int = typer.Option(1, min=1, help="Parallel workers across codes"),
    process_pool: bool = typer.Option(False, "--process-pool"),
) -> None:
    """Train the proxy: one L1 regressor per code on log black-box probabilities."""
    run = _run_config(
        "train-proxy",
        inputs={
            "corpus": corpus,
            "splits": splits,
            "codes": codes,
            "predictions": predictions,
        },
        output=out,
        seed=seed,
        train=_train_config(alpha, epochs, eta0, seed, binary, min_doc_freq),
        execution=ExecutionConfig(max_workers=workers, use_process_pool=process_pool),
    )
    documents, split_assignment, code_space = _load_setup(corpus, splits, codes)
    matrix: PredictionMatrix = load_predictions(
        predictions, code_space, [doc.doc_id for doc in documents]
    )
    config = run.train
    if grid:
        chosen = proxy.grid_search_alpha(
            documents,
            matrix,
            split_assignment,
            alpha_grid or DEFAULT_ALPHA_GRID,
            config,
            run.execution,
        )
        config = config.model_copy(update={"alpha": chosen})
    model = proxy.train_proxy(
        documents, matrix, split_assignment, config, run.execution
    )
    save_model(model, out)
    summary = model_summary(model)
    _emit(
        {
            "model": str(run.output),
            "kind": model.kind,
            "alpha": config.alpha,
            "nonzero_coefficients": summary["nonzero_coefficients"],
            "dense_parameters": summary["dense_parameters"],
        }
    )


@app.command("train-logistic")
def train_logistic_cmd(
    corpus: Path = _input("Corpus JSON-lines file"),
    splits: Path = _input("Split assignment file"),
    codes: Path = _input("Code descriptions file"),
    out: Path = typer.Option(..., dir_okay=False, help="Model file to write"),
    alpha: float = typer.Option(1e-4, min=0.0, help="L1 strength"),
    epochs: int = typer.Option(10, min=1),
    eta0: float = typer.Option(0.01, click_type=POSITIVE),
    seed: int = typer.Option(13, help="Global seed"),
    binary: bool = typer.Option(False, "--binary", help="Binary token features"),
    min_doc_freq: int = typer.Option(3, min=1),
    workers: int = typer.Option(1, min=1, help="Parallel workers across codes"),
    process_pool: bool = typer.Option(False, "--process-pool"),
) -> None:
    """Train the logistic baseline directly on the true codes."""
    run = _run_config(
        "train-logistic",
        inputs={"corpus": corpus, "splits": splits, "codes": codes},
        output=out,
        seed=seed,
        train=_train_config(alpha, epochs, eta0, seed, binary, min_doc_freq),
        execution=ExecutionConfig(max_workers=workers, use_process_pool=process_pool),
    )
    documents, split_assignment, code_space = _load_setup(corpus, splits, codes)
    model = baselines.train_logistic(
        documents, split_assignment, code_space, run.train, run.execution
    )
    save_model(model, out)
    summary = model_summary(model)
    _emit(
        {
            "model": str(run.output),
            "kind": model.kind,
            "alpha": run.train.alpha,
            "nonzero_coefficients": summary["nonzero_coefficients"],
            "dense_parameters": summary["dense_parameters"],
        }
    )


@app.command("eval-faithfulness")
def eval_faithfulness_cmd(
    corpus: Path = _input("Corpus JSON-lines file"),
    splits: Path = _input("Split assignment file"),
    codes: Path = _input("Code descriptions file"),
    predictions: Path = _input("Black-box predictions file"),
    model: List[Path] = typer.Option(
        [], exists=True, dir_okay=False, help="Model file (repeatable)"
    ),
    candidate: List[Path] = typer.Option(
        [], exists=True, dir_okay=False, help="Candidate predictions file (repeatable)"
    ),
    split: Split = typer.Option(Split.TEST, help="Split to evaluate on"),
    threshold: float = typer.Option(0.5, click_type=UNIT_INTERVAL),
    table: Optional[Path] = typer.Option(None, dir_okay=False, help="TSV table"),
) -> None:
    """Compare candidates with the black box on one split."""
    _run_config(
        "eval-faithfulness",
        inputs={
            "corpus": corpus,
            "splits": splits,
            "codes": codes,
            "predictions": predictions,
            **{f"model{i}": path for i, path in enumerate(model)},
            **{f"candidate{i}": path for i, path in enumerate(candidate)},
        },
        output=table,
    )
    documents, split_assignment, code_space = _load_setup(corpus, splits, codes)
    selected = select_split(documents, split_assignment, split)
    doc_ids = [doc.doc_id for doc in selected]
    blackbox = load_predictions(predictions, code_space, doc_ids).rows_for(doc_ids)
    reports = {
        name: faithfulness_report(probs, blackbox, threshold)
        for name, probs in _candidates(model, candidate, selected, code_space).items()
    }
    if table is not None:
        write_text_atomic(table, faithfulness_table(reports))
    _emit(
        {
            "split": split.value,
            "n_docs": len(selected),
            "reports": {name: report.model_dump() for name, report in reports.items()},
        }
    )


@app.command("eval-labels")
def eval_labels_cmd(
    corpus: Path = _input("Corpus JSON-lines file"),
    splits: Path = _input("Split assignment file"),
    codes: Path = _input("Code descriptions file"),
    model: List[Path] = typer.Option(
        [], exists=True, dir_okay=False, help="Model file (repeatable)"
    ),
    candidate: List[Path] = typer.Option(
        [], exists=True, dir_okay=False, help="Candidate predictions file (repeatable)"
    ),
    predictions: Optional[Path] = typer.Option(
        None, exists=True, dir_okay=False, help="Also evaluate the black box"
    ),
    split: Split = typer.Option(Split.TEST, help="Split to evaluate on"),
    k: List[int] = typer.Option([], "--k", min=1, help="Precision cut-off"),
    threshold: float = typer.Option(0.5, click_type=UNIT_INTERVAL),
    table: Optional[Path] = typer.Option(None, dir_okay=False, help="TSV table"),
) -> None:
    """Evaluate candidates against the true codes on one split."""
    inputs: Dict[str, Path] = {"corpus": corpus, "splits": splits, "codes": codes}
    if predictions is not None:
        inputs["predictions"] = predictions
    _run_config("eval-labels", inputs=inputs, output=table)
    documents, split_assignment, code_space = _load_setup(corpus, splits, codes)
    selected = select_split(documents, split_assignment, split)
    doc_ids = [doc.doc_id for doc in selected]
    candidates = _candidates(model, candidate, selected, code_space)
    if predictions is not None:
        matrix = load_predictions(predictions, code_space, doc_ids)
        candidates[BLACK_BOX] = matrix.rows_for(doc_ids)

    truth = label_matrix(selected, code_space)
    reports = {
        name: label_report(probs, truth, k or None, threshold)
        for name, probs in candidates.items()
    }
    if table is not None:
        write_text_atomic(table, label_table(reports))
    _emit(
        {
            "split": split.value,
            "n_docs": len(selected),
            "reports": {
                name: report.to_json_dict() for name, report in reports.items()
            },
        }
    )


@app.command("explain")
def explain_cmd(
    corpus: Path = _input("Corpus JSON-lines file"),
    codes: Path = _input("Code descriptions file"),
    out: Path = typer.Option(..., dir_okay=False, help="Explanations file to write"),
    source: Source = typer.Option(Source.model, help="Where importances come from"),
    model: Optional[Path] = typer.Option(None, exists=True, dir_okay=False),
    dump: Optional[Path] = typer.Option(None, exists=True, dir_okay=False),
    embeddings: Optional[Path] = typer.Option(None, exists=True, dir_okay=False),
    name: Optional[str] = typer.Option(None, help="Model name in the output"),
    doc_id: List[str] = typer.Option([], "--doc-id", help="Document (repeatable)"),
    code: List[str] = typer.Option([], "--code", help="Code (repeatable)"),
    splits: Optional[Path] = typer.Option(None, exists=True, dir_okay=False),
    split: Optional[Split] = typer.Option(None, help="Only documents of this split"),
    ngram: int = typer.Option(4, min=1),
    context: int = typer.Option(5, min=0),
    count_weighted: bool = typer.Option(False, "--count-weighted"),
) -> None:
    """Extract one explanation span per (document, code)."""
    flags = {
        Source.model: "--model",
        Source.dump: "--dump",
        Source.cosine: "--embeddings",
    }
    sources = {Source.model: model, Source.dump: dump, Source.cosine: embeddings}
    source_path = sources[source]
    if source_path is None:
        raise typer.BadParameter(f"--source {source.value} requires {flags[source]}")
    if split is not None and splits is None:
        raise typer.BadParameter("--split requires --splits")

    run = _run_config(
        "explain",
        inputs={"corpus": corpus, "codes": codes, source.value: source_path},
        output=out,
        extraction=ExtractionConfig(
            ngram=ngram, context=context, count_weighted=count_weighted
        ),
    )

    corpus_documents, _ = load_corpus(corpus)
    code_space = load_code_descriptions(codes)
    documents = corpus_documents
    if split is not None and splits is not None:
        documents = select_split(documents, load_splits(splits, documents), split)
    if doc_id:
        by_id = {doc.doc_id: doc for doc in documents}
        missing = [d for d in doc_id if d not in by_id]
        if missing:
            raise ValidationError(f"unknown document(s): {', '.join(missing)}")
        documents = [by_id[d] for d in doc_id]
    unknown = [c for c in code if c not in code_space]
    if unknown:
        raise ValidationError(f"unknown code(s): {', '.join(unknown)}")
    selected_codes = list(code) or list(code_space.codes)

    explainer: Explainer
    if source is Source.model:
        linear = load_model(source_path)
        linear.check_codes(code_space)
        explainer = ModelExplainer(
            linear, run.extraction, name or MODEL_NAMES.get(linear.kind, linear.kind)
        )
    elif source is Source.dump:
        explainer = DumpExplainer(
            load_importance_dump(source_path, corpus_documents),
            run.extraction,
            name or "dump",
        )
    else:
        explainer = CosineExplainer(
            load_embeddings(source_path), code_space, run.extraction
        )

    explanations = list(explain_documents(documents, selected_codes, explainer))
    save_explanations(explanations, out)
    _emit(
        {
            "source": source.value,
            "model": explainer.name,
            "explanations": len(explanations),
            "output": str(run.output),
        }
    )


def _model_scorers(paths: Sequence[Path]) -> Dict[str, CandidateScorer]:
    scorers: Dict[str, CandidateScorer] = {}
    for path in paths:
        linear = load_model(path)
        scorers[_model_name(linear, path, scorers)] = linear_candidate_scorer(linear)
    return scorers


@app.command("plausibility")
def plausibility_cmd(
    annotations: Path = _input("Annotations JSON-lines file"),
    codes: Path = _input("Code descriptions file"),
    embeddings: Path = _input("Word-vector file"),
    protocol: PlausibilityMode = typer.Option(PlausibilityMode.e2),
    explanations: List[Path] = typer.Option(
        [], exists=True, dir_okay=False, help="Explanations file to score (full)"
    ),
    target_rate: float = typer.Option(0.42, click_type=UNIT_INTERVAL),
    sweep_rate: List[float] = typer.Option(
        [], "--sweep-rate", click_type=UNIT_INTERVAL
    ),
    model: List[Path] = typer.Option(
        [],
        exists=True,
        dir_okay=False,
        help="Model file whose reassigned annotations are scored (e1/e2)",
    ),
    n_bootstrap: int = typer.Option(1000, min=1),
    level: float = typer.Option(0.95, click_type=UNIT_INTERVAL),
    l2: float = typer.Option(1.0, click_type=POSITIVE),
    seed: int = typer.Option(13, help="Global seed"),
) -> None:
    """Evaluate the annotation classifier, or score models' explanations with it."""
    if protocol is PlausibilityMode.full and not explanations:
        raise typer.BadParameter("--protocol full needs at least one --explanations")
    if protocol is PlausibilityMode.full and model:
        raise typer.BadParameter("--model applies to --protocol e1 and e2")
    run = _run_config(
        "plausibility",
        inputs={
            "annotations": annotations,
            "codes": codes,
            "embeddings": embeddings,
            **{f"explanations{i}": path for i, path in enumerate(explanations)},
            **{f"model{i}": path for i, path in enumerate(model)},
        },
        seed=seed,
        plausibility=PlausibilityConfig(
            l2_strength=l2,
            target_rate=target_rate,
            n_bootstrap=n_bootstrap,
            level=level,
            seed=seed,
        ),
    )
    records = load_annotations(annotations)
    code_space = load_code_descriptions(codes)
    descriptions = {c: code_space.description(c) for c in code_space}
    table = load_embeddings(embeddings)

    if protocol is not PlausibilityMode.full:
        result = loo_evaluate(
            records, descriptions, table, Protocol(protocol.value), run.plausibility
        )
        payload = result.to_json_dict()
        if model:
            sets = candidate_sets(records)
            reassignment = reassign_annotations(sets, _model_scorers(model))
            payload["model_scores"] = predicted_scores(
                reassignment, sets, records, result.probabilities
            )
            payload["human_scores"] = human_scores(reassignment, sets, records)
        _emit(payload)
        return

    classifier = train_classifier(records, descriptions, table, run.plausibility)
    probabilities: Dict[str, Dict[str, float]] = {}
    for path in explanations:
        for explanation in load_explanations(path):
            if explanation.code not in code_space:
                raise ValidationError(
                    f"{path}: unknown code {explanation.code!r} for document "
                    f"{explanation.doc_id!r}"
                )
            key = f"{explanation.doc_id}\t{explanation.code}"
            per_model = probabilities.setdefault(explanation.model, {})
            if key in per_model:
                raise ValidationError(
                    f"{path}: model {explanation.model!r} explains "
                    f"({explanation.doc_id}, {explanation.code}) twice"
                )
            features = featurize_text(
                explanation.text, descriptions[explanation.code], table
            )
            per_model[key] = float(classifier.predict_proba(features)[0])
    _, scores = plausibility_scores(probabilities, run.plausibility, sweep_rate)
    _emit([score.to_json_dict() for score in scores])


@app.command("describe-model")
def describe_model_cmd(
    model: Path = _input("Model file"),
    top_k: int = typer.Option(10, min=1, help="Features listed per code"),
    code: List[str] = typer.Option([], "--code", help="Code (repeatable)"),
) -> None:
    """Global explanations: the heaviest positive coefficients of each code."""
    _run_config("describe-model", inputs={"model": model})
    linear = load_model(model)
    selected = list(code) or list(linear.codes)
    _emit(
        {
            "summary": model_summary(linear),
            "top_features": {
                c: [[token, weight] for token, weight in top_features(linear, c, top_k)]
                for c in selected
            },
        }
    )


@app.command("assign")
def assign_cmd(
    annotations: Path = _input("Annotations JSON-lines file"),
    model: List[Path] = typer.Option(
        ..., exists=True, dir_okay=False, help="Model file (repeatable)"
    ),
) -> None:
    """Give each model the annotated explanation it weighs highest, per example."""
    _run_config(
        "assign",
        inputs={
            "annotations": annotations,
            **{f"model{i}": path for i, path in enumerate(model)},
        },
    )
    records = load_annotations(annotations)
    sets = candidate_sets(records)
    reassignment = reassign_annotations(sets, _model_scorers(model))
    _emit(
        {
            "over_selection": reassignment.over_selection,
            "over_selected_examples": list(reassignment.over_selected_examples),
            "human_scores": human_scores(reassignment, sets, records),
            "assignments": {
                example_id: {
                    name: reassignment.chosen_text(sets, example_id, name)
                    for name in chosen
                }
                for example_id, chosen in reassignment.assignments.items()
            },
        }
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI and return its exit code instead of exiting.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]

    Returns:
        int: 0 on success, 1 on usage errors, 2 on data or validation errors
    """
    command = typer.main.get_command(app)
    args = list(sys.argv[1:] if argv is None else argv)
    stderr = Console(stderr=True)
    try:
        result = command.main(
            args=args, prog_name="proxyexplain", standalone_mode=False
        )
    except click.exceptions.Exit as e:
        return int(e.exit_code)
    except click.exceptions.Abort:
        stderr.print("Aborted")
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except (ProxyExplainError, pydantic.ValidationError) as e:
        stderr.print(f"error: {e}", markup=False, highlight=False)
        return 2
    return int(result) if isinstance(result, int) else 0


def run() -> None:
    """Console-script entry point"""
    sys.exit(main())


if __name__ == "__main__":
    run()
