"""
Modeling module for ProxyExplain

Per-code sparse linear models trained by SGD: proxy regressors on log
black-box probabilities and the logistic baseline on true codes.
"""

from .baselines import LogisticBaseline, train_logistic
from .config import DEFAULT_ALPHA_GRID, ExecutionConfig, TrainConfig
from .linear import LinearCodeModel, load_model, model_summary, save_model, top_features
from .proxy import (
    ProxyModel,
    grid_search_alpha,
    log_transform,
    predict_log,
    predict_prob,
    train_proxy,
    validation_mse,
)

__all__ = [
    "LogisticBaseline",
    "train_logistic",
    "DEFAULT_ALPHA_GRID",
    "ExecutionConfig",
    "TrainConfig",
    "LinearCodeModel",
    "load_model",
    "model_summary",
    "save_model",
    "top_features",
    "ProxyModel",
    "grid_search_alpha",
    "log_transform",
    "predict_log",
    "predict_prob",
    "train_proxy",
    "validation_mse",
]
