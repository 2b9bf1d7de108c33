import numpy as np
import pytest

from posauth.tracker.cart import RegressionTree


def test_constant_labels_single_leaf():
    X = np.random.default_rng(0).standard_normal((50, 3))
    t = RegressionTree().fit(X, np.full(50, 7.0))
    assert t.n_leaves == 1
    assert np.all(t.predict(X) == 7.0)


def test_step_function():
    X = np.arange(10, dtype=float)[:, None]
    y = np.where(X[:, 0] < 5, 0.0, 10.0)
    t = RegressionTree(min_leaf=1).fit(X, y)
    assert t.feature_[0] == 0 and 4 < t.threshold_[0] <= 5
    assert t.n_leaves == 2
    assert np.array_equal(t.predict(X), y)


def test_leaf_mean_property():
    g = np.random.default_rng(1)
    X = g.standard_normal((500, 4))
    y = X[:, 0] * 3 + np.sin(X[:, 1]) + 0.1 * g.standard_normal(500)
    t = RegressionTree(max_depth=6, min_leaf=7).fit(X, y)
    leaves = t.apply(X)
    for leaf in np.unique(leaves):
        mask = leaves == leaf
        assert mask.sum() >= 7
        assert t.value_[leaf] == pytest.approx(y[mask].mean(), rel=1e-12, abs=1e-12)
    assert t.depth <= 6


def brute_force_root(X, y, min_leaf):
    best = (np.inf, None, None)
    for f in range(X.shape[1]):
        vals = np.unique(X[:, f])
        for lo, hi in zip(vals[:-1], vals[1:]):
            thr = (lo + hi) / 2
            left = X[:, f] <= thr
            if left.sum() < min_leaf or (~left).sum() < min_leaf:
                continue
            sse = ((y[left] - y[left].mean()) ** 2).sum() + ((y[~left] - y[~left].mean()) ** 2).sum()
            if sse < best[0] - 1e-12:
                best = (sse, f, thr)
    return best


def test_root_split_matches_exhaustive_search():
    g = np.random.default_rng(2)
    for _ in range(5):
        X = np.round(g.standard_normal((60, 3)), 1)
        y = X[:, 1] ** 2 + g.standard_normal(60)
        t = RegressionTree(max_depth=1, min_leaf=4).fit(X, y)
        sse, f, thr = brute_force_root(X, y, 4)
        assert t.feature_[0] == f
        assert t.threshold_[0] == pytest.approx(thr)


def test_each_input_routes_to_one_leaf():
    g = np.random.default_rng(3)
    X = g.standard_normal((200, 2))
    t = RegressionTree(max_depth=5, min_leaf=3).fit(X, X[:, 0] - X[:, 1])
    Xt = g.standard_normal((30, 2))
    leaves = t.apply(Xt)
    assert np.all(t.feature_[leaves] == -1)
    assert np.array_equal(t.predict(Xt), t.value_[leaves])


def test_min_leaf_and_depth_limits():
    g = np.random.default_rng(4)
    X = g.standard_normal((100, 1))
    y = g.standard_normal(100)
    assert RegressionTree(max_depth=0).fit(X, y).n_leaves == 1
    t = RegressionTree(max_depth=30, min_leaf=50).fit(X, y)
    assert t.n_leaves <= 2


def test_round_trip():
    g = np.random.default_rng(5)
    X = g.standard_normal((100, 3))
    t = RegressionTree(max_depth=4).fit(X, X.sum(1))
    t2 = RegressionTree.from_dict(t.to_dict())
    assert np.array_equal(t.predict(X), t2.predict(X))
