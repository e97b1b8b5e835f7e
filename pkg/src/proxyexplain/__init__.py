"""
ProxyExplain: faithful proxy models for black-box multi-label text classifiers

Subpackages:
- data: corpora, splits, black-box prediction files and the synthetic setup
- modeling: proxy regressors, the logistic baseline and their model files
- evaluation: faithfulness and label-quality metrics and reports
- explain: explanation spans from coefficients, importance dumps or embeddings
- plausibility: the annotation classifier and plausibility statistics
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
