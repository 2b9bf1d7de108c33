"""Mobility regressors predicting the legitimate vehicle's next position.

Each regressor holds one submodel per coordinate. By default the submodels
learn the displacement ``next - current`` and :func:`predict` adds it back to
the current-position features; ``target="position"`` regresses the raw
coordinates instead.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .cart import RegressionTree
from .dataset import N_FEATURES, POS_COLS, Dataset
from .metrics import RegressionMetrics, regression_metrics
from .smo import EpsilonSVR

FORMAT = "posauth-regressor"
VERSION = 1
TARGETS = ("displacement", "position")


@dataclass(frozen=True)
class TreeParams:
    max_depth: int = 20
    min_leaf: int = 5
    target: str = "displacement"


@dataclass(frozen=True)
class SvrParams:
    C: float = 1.0
    epsilon: float = 0.1
    kernel: str = "linear"
    gamma: float | None = None
    tol: float = 1e-3
    max_iter: int = 2_000_000
    target: str = "displacement"


class Regressor:
    def __init__(self, kind: str, submodels, params, feature_mean=None, feature_std=None,
                 target_mean=None, target_std=None):
        if kind not in ("decision-tree", "svr"):
            raise ValueError(f"unknown regressor kind {kind!r}")
        if params.target not in TARGETS:
            raise ValueError(f"unknown target {params.target!r}")
        self.kind = kind
        self.submodels = list(submodels)
        self.params = params
        self.feature_mean = None if feature_mean is None else np.asarray(feature_mean, float)
        self.feature_std = None if feature_std is None else np.asarray(feature_std, float)
        self.target_mean = np.zeros(2) if target_mean is None else np.asarray(target_mean, float)
        self.target_std = np.ones(2) if target_std is None else np.asarray(target_std, float)

    def _inputs(self, X):
        if self.kind == "svr":
            return (X - self.feature_mean) / self.feature_std
        return X

    def predict(self, features) -> np.ndarray:
        X = np.asarray(features, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != N_FEATURES:
            raise ValueError(f"expected {N_FEATURES} features, got {X.shape[1]}")
        Z = self._inputs(X)
        out = np.column_stack([m.predict(Z) for m in self.submodels])
        out = out * self.target_std + self.target_mean
        if self.params.target == "displacement":
            out = out + X[:, POS_COLS]
        return out[0] if single else out

    def to_dict(self) -> dict:
        def arr(a):
            return None if a is None else np.asarray(a).tolist()
        return {
            "format": FORMAT, "version": VERSION, "kind": self.kind,
            "params": asdict(self.params),
            "feature_mean": arr(self.feature_mean), "feature_std": arr(self.feature_std),
            "target_mean": arr(self.target_mean), "target_std": arr(self.target_std),
            "submodels": [m.to_dict() for m in self.submodels],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Regressor":
        if d.get("format") != FORMAT or d.get("version") != VERSION:
            raise ValueError("not a posauth regressor file (or unsupported version)")
        if d["kind"] == "svr":
            params = SvrParams(**d["params"])
            subs = [EpsilonSVR.from_dict(s) for s in d["submodels"]]
        else:
            params = TreeParams(**d["params"])
            subs = [RegressionTree.from_dict(s) for s in d["submodels"]]
        return cls(d["kind"], subs, params, d["feature_mean"], d["feature_std"],
                   d["target_mean"], d["target_std"])


def _targets(ds: Dataset, target: str) -> np.ndarray:
    if target == "displacement":
        return ds.Y - ds.X[:, POS_COLS]
    return ds.Y.copy()


def fit_decision_tree(train: Dataset, params: TreeParams = TreeParams()) -> Regressor:
    if len(train) == 0:
        raise ValueError("empty training set")
    T = _targets(train, params.target)
    subs = [RegressionTree(params.max_depth, params.min_leaf).fit(train.X, T[:, c]) for c in range(2)]
    return Regressor("decision-tree", subs, params)


def fit_svr(train: Dataset, params: SvrParams = SvrParams()) -> Regressor:
    """One epsilon-SVR per coordinate on z-scored features and targets."""
    if len(train) == 0:
        raise ValueError("empty training set")
    if train.feature_mean is None:
        raise ValueError("features must carry normalization statistics (split the dataset)")
    T = _targets(train, params.target)
    t_mean = T.mean(axis=0)
    t_std = T.std(axis=0)
    t_std = np.where(t_std > 0, t_std, 1.0)
    Z = train.normalized()
    Tn = (T - t_mean) / t_std
    subs = []
    for c in range(2):
        m = EpsilonSVR(params.C, params.epsilon, params.kernel, params.gamma, params.tol, params.max_iter)
        subs.append(m.fit(Z, Tn[:, c]))
    return Regressor("svr", subs, params, train.feature_mean, train.feature_std, t_mean, t_std)


def predict(model: Regressor, features) -> np.ndarray:
    return model.predict(features)


def evaluate(model: Regressor, test: Dataset) -> RegressionMetrics:
    if len(test) == 0:
        raise ValueError("empty test set")
    return regression_metrics(test.Y, model.predict(test.X))


def save_model(model: Regressor, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict()))


def load_model(path) -> Regressor:
    return Regressor.from_dict(json.loads(Path(path).read_text()))
