"""Least-squares regression tree (CART) for a single output."""
from __future__ import annotations

import numpy as np


class RegressionTree:
    """Binary tree grown greedily on the summed squared label deviation.

    Nodes are stored in flat arrays; ``feature[k] == -1`` marks a leaf.
    A sample goes left when ``x[feature] <= threshold``.
    """

    def __init__(self, max_depth: int = 20, min_leaf: int = 5):
        if max_depth < 0 or min_leaf < 1:
            raise ValueError("max_depth >= 0 and min_leaf >= 1 required")
        self.max_depth = max_depth
        self.min_leaf = min_leaf

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],) or X.shape[0] == 0:
            raise ValueError("need a non-empty (n, d) X and matching (n,) y")
        feature, threshold, left, right, value = [], [], [], [], []

        def new_node(idx):
            feature.append(-1)
            threshold.append(np.nan)
            left.append(-1)
            right.append(-1)
            value.append(float(y[idx].mean()))
            return len(value) - 1

        root = new_node(np.arange(len(y)))
        stack = [(root, np.arange(len(y)), 0)]
        while stack:
            node, idx, depth = stack.pop()
            if depth >= self.max_depth or len(idx) < 2 * self.min_leaf:
                continue
            split = self._best_split(X[idx], y[idx])
            if split is None:
                continue
            f, thr = split
            go_left = X[idx, f] <= thr
            li, ri = idx[go_left], idx[~go_left]
            feature[node], threshold[node] = f, thr
            left[node], right[node] = new_node(li), new_node(ri)
            stack.append((right[node], ri, depth + 1))
            stack.append((left[node], li, depth + 1))

        self.feature_ = np.array(feature, dtype=np.int64)
        self.threshold_ = np.array(threshold, dtype=float)
        self.left_ = np.array(left, dtype=np.int64)
        self.right_ = np.array(right, dtype=np.int64)
        self.value_ = np.array(value, dtype=float)
        return self

    def _best_split(self, X, y):
        n = len(y)
        m = self.min_leaf
        total, total_sq = y.sum(), (y * y).sum()
        parent_sse = total_sq - total * total / n
        if parent_sse <= 1e-12 * max(total_sq, 1.0):
            return None
        best = (parent_sse, None, None)
        nl = np.arange(1, n)  # left sizes for a cut after position i-1
        for f in range(X.shape[1]):
            order = np.argsort(X[:, f], kind="stable")
            xs, ys = X[order, f], y[order]
            cs = np.cumsum(ys)[:-1]
            cs2 = np.cumsum(ys * ys)[:-1]
            sse = (cs2 - cs * cs / nl) + ((total_sq - cs2) - (total - cs) ** 2 / (n - nl))
            valid = (xs[1:] > xs[:-1]) & (nl >= m) & (n - nl >= m)
            if not valid.any():
                continue
            sse = np.where(valid, sse, np.inf)
            k = int(np.argmin(sse))
            if sse[k] < best[0]:
                lo, hi = xs[k], xs[k + 1]
                thr = 0.5 * (lo + hi)
                if not lo <= thr < hi:
                    thr = lo
                best = (sse[k], f, thr)
        if best[1] is None:
            return None
        return best[1], best[2]

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by each row of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature_[node] >= 0
        while active.any():
            rows = np.nonzero(active)[0]
            nd = node[rows]
            go_left = X[rows, self.feature_[nd]] <= self.threshold_[nd]
            node[rows] = np.where(go_left, self.left_[nd], self.right_[nd])
            active[rows] = self.feature_[node[rows]] >= 0
        return node

    def predict(self, X) -> np.ndarray:
        return self.value_[self.apply(X)]

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature_ < 0))

    @property
    def depth(self) -> int:
        d = np.zeros(len(self.feature_), dtype=np.int64)
        for k in range(len(self.feature_)):
            if self.feature_[k] >= 0:
                d[self.left_[k]] = d[self.right_[k]] = d[k] + 1
        return int(d.max())

    def to_dict(self) -> dict:
        return {
            "max_depth": self.max_depth, "min_leaf": self.min_leaf,
            "feature": self.feature_.tolist(), "threshold": self.threshold_.tolist(),
            "left": self.left_.tolist(), "right": self.right_.tolist(),
            "value": self.value_.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        t = cls(d["max_depth"], d["min_leaf"])
        t.feature_ = np.array(d["feature"], dtype=np.int64)
        t.threshold_ = np.array(d["threshold"], dtype=float)
        t.left_ = np.array(d["left"], dtype=np.int64)
        t.right_ = np.array(d["right"], dtype=np.int64)
        t.value_ = np.array(d["value"], dtype=float)
        return t
