from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RegressionMetrics:
    mae: float
    mse: float
    rmse: float
    r2: float


def regression_metrics(actual, predicted) -> RegressionMetrics:
    """Position-prediction errors pooled over both coordinates.

    MAE and MSE average over the ``2n`` scalar residuals; R^2 uses the
    residual and total sums of squares of the stacked 2-vectors.
    """
    actual = np.asarray(actual, dtype=float).reshape(-1, 2)
    predicted = np.asarray(predicted, dtype=float).reshape(-1, 2)
    if actual.shape != predicted.shape or actual.shape[0] == 0:
        raise ValueError("need matching, non-empty (n, 2) arrays")
    n = actual.shape[0]
    resid = actual - predicted
    mae = np.abs(resid).sum() / (2 * n)
    ss_res = (resid ** 2).sum()
    mse = ss_res / (2 * n)
    ss_tot = ((actual - actual.mean(axis=0)) ** 2).sum()
    if ss_tot == 0:
        raise ValueError("R^2 undefined: labels have zero total sum of squares")
    return RegressionMetrics(float(mae), float(mse), float(np.sqrt(mse)), float(1 - ss_res / ss_tot))
