#!/usr/bin/env python3
"""
Example usage of ProxyExplain on the planted synthetic setup
"""

import sys
from pathlib import Path

# Add the src directory to Python path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from proxyexplain.data.blackbox_io import PredictionMatrix
from proxyexplain.data.config import SynthConfig
from proxyexplain.data.corpus import select_split
from proxyexplain.data.models import Split
from proxyexplain.data.synth import SyntheticCorpus, emit_predictions, generate_corpus
from proxyexplain.evaluation.reports import faithfulness_report, faithfulness_table
from proxyexplain.explain.spans import ModelExplainer, explain_documents
from proxyexplain.modeling import baselines, proxy
from proxyexplain.modeling.config import ExecutionConfig, TrainConfig
from proxyexplain.modeling.linear import model_summary, top_features


def build_setup(n_docs: int = 2000) -> tuple[SyntheticCorpus, PredictionMatrix]:
    config = SynthConfig(
        # Every random stream is derived from this seed
        seed=13,
        n_docs=n_docs,
        vocab_size=500,
        n_codes=20,
        # Zero noise makes the planted black box exactly log-linear
        noise_sd=0.0,
    )
    setup = generate_corpus(config=config)
    return setup, emit_predictions(setup.planted, setup.documents)


def main():
    """Train both models, compare them with the black box and explain a document"""
    setup, predictions = build_setup()
    print("Synthetic setup:")
    print(f"  Documents: {len(setup.documents)}")
    print(f"  Codes:     {len(setup.code_space)}")

    train_config = TrainConfig(alpha=1e-4, epochs=10, eta0=0.01)
    execution = ExecutionConfig(max_workers=2)

    proxy_model = proxy.train_proxy(
        setup.documents, predictions, setup.splits, train_config, execution
    )
    logistic = baselines.train_logistic(
        setup.documents, setup.splits, setup.code_space, train_config, execution
    )

    test_docs = select_split(setup.documents, setup.splits, Split.TEST)
    blackbox = predictions.rows_for([doc.doc_id for doc in test_docs])
    reports = {
        "Logistic": faithfulness_report(
            baselines.predict_prob_documents(logistic, test_docs), blackbox
        ),
        "Proxy": faithfulness_report(
            proxy.predict_prob_documents(proxy_model, test_docs), blackbox
        ),
    }
    print("\nFaithfulness on the test split:")
    print(faithfulness_table(reports))

    summary = model_summary(proxy_model)
    print(
        f"\nProxy keeps {summary['nonzero_coefficients']} of "
        f"{summary['dense_parameters']} dense parameters"
    )

    code = proxy_model.codes[0]
    print(f"\nTop features of {code} ({setup.code_space.description(code)}):")
    for token, weight in top_features(proxy_model, code, 5):
        print(f"  {token:<10} {weight:+.3f}")

    document = test_docs[0]
    (explanation,) = explain_documents(
        [document], [code], ModelExplainer(proxy_model, name="Proxy")
    )
    print(f"\nExplanation of {code} in {document.doc_id}:")
    print(f"  {explanation.text}")


if __name__ == "__main__":
    main()
