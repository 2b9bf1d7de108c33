"""Mobility tracking: dataset generation, regressors and their metrics."""
from .dataset import Dataset, FeatureRow, GenConfig, generate_dataset, read_csv, split_dataset, write_csv
from .metrics import RegressionMetrics, regression_metrics
from .model import (Regressor, SvrParams, TreeParams, evaluate, fit_decision_tree, fit_svr,
                    load_model, predict, save_model)

__all__ = [
    "Dataset", "FeatureRow", "GenConfig", "generate_dataset", "read_csv", "split_dataset",
    "write_csv", "RegressionMetrics", "regression_metrics", "Regressor", "SvrParams",
    "TreeParams", "evaluate", "fit_decision_tree", "fit_svr", "load_model", "predict",
    "save_model",
]
