import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from hypothesis.extra.numpy import arrays

from posauth import rng
from posauth.channel import ChannelParams, resolve_toa_scale
from posauth.tracker import (Dataset, GenConfig, RegressionMetrics, SvrParams, TreeParams, evaluate,
                             fit_decision_tree, fit_svr, generate_dataset, load_model, predict,
                             read_csv, regression_metrics, save_model, split_dataset, write_csv)
from posauth.tracker.dataset import HEADER

CH = ChannelParams(toa_scale=resolve_toa_scale("carrier", 1.8e9, 1e6))


@pytest.fixture(scope="module")
def small():
    cfg = GenConfig(lq_db=(0.0, 10.0, 20.0), slots_per_lq=150, channel=CH)
    return cfg, generate_dataset(cfg, 3)


@pytest.fixture(scope="module")
def split_small(small):
    return split_dataset(small[1], 0.7, rng.stream(3, rng.SPLIT))


# ---- metrics

def test_metric_example():
    m = regression_metrics([(0, 0), (2, 2)], [(1, 0), (2, 2)])
    assert m.mae == 0.25 and m.mse == 0.25 and m.rmse == 0.5


def test_metric_identities():
    a = np.array([[0.0, 1.0], [2.0, 5.0], [3.0, -1.0]])
    m = regression_metrics(a, a)
    assert (m.mae, m.mse, m.r2) == (0.0, 0.0, 1.0)
    assert regression_metrics(a, np.broadcast_to(a.mean(0), a.shape)).r2 == pytest.approx(0.0)
    with pytest.raises(ValueError):
        regression_metrics([(1, 1), (1, 1)], [(0, 0), (1, 1)])


@given(arrays(float, (20, 2), elements=st.floats(-1e3, 1e3)),
       arrays(float, (20, 2), elements=st.floats(-1e3, 1e3)))
def test_rmse_squared_is_mse(a, p):
    assume(np.sum((a - a.mean(axis=0)) ** 2) > 0)
    m = regression_metrics(a, p)
    assert m.rmse ** 2 == pytest.approx(m.mse, rel=1e-12, abs=1e-300)
    assert m.mae >= 0 and m.mse >= 0 and m.r2 <= 1


# ---- dataset

def test_row_count_and_shape(small):
    cfg, ds = small
    assert len(ds) == 3 * 150
    assert ds.X.shape == (450, 9) and ds.Y.shape == (450, 2)
    assert np.all(np.isfinite(ds.X))
    row = ds.row(0)
    assert row.features.shape == (9,) and len(row.label_next_position) == 2


def test_rsus_in_range_of_true_position(small):
    cfg, ds = small
    rsus = ds.meta["rsu_positions"]
    anchors = rsus[ds.meta["rsu_index"]]
    d = np.linalg.norm(anchors - ds.meta["true_position"][:, None, :], axis=-1)
    assert np.all(d < cfg.rsu_range_limit)
    assert np.all(np.diff(d, axis=1) >= 0)


def test_toa_differences_recompute_exactly(small):
    _, ds = small
    slot, block = ds.meta["slot"], ds.meta["block"]
    firsts = 0
    for i in range(len(ds)):
        prev = np.nonzero((block == block[i]) & (slot == slot[i] - 1))[0]
        if prev.size:
            assert np.array_equal(ds.X[i, 4:7], ds.X[i, 1:4] - ds.X[prev[0], 1:4])
        else:
            assert np.all(ds.X[i, 4:7] == 0.0)
            firsts += 1
    # each block opens with a zero-difference row
    for b in np.unique(block):
        assert np.all(ds.X[np.nonzero(block == b)[0][0], 4:7] == 0.0)
    assert firsts >= 3


def test_labels_are_next_slot_estimates(small):
    _, ds = small
    slot, block = ds.meta["slot"], ds.meta["block"]
    nxt = {(b, s): i for i, (b, s) in enumerate(zip(block, slot))}
    checked = 0
    for i in range(len(ds)):
        j = nxt.get((block[i], slot[i] + 1))
        if j is not None:
            assert np.array_equal(ds.Y[i], ds.X[j, 7:9])
            checked += 1
    assert checked > len(ds) // 2


def test_generation_is_deterministic(small):
    cfg, ds = small
    again = generate_dataset(cfg, 3)
    assert np.array_equal(ds.X, again.X) and np.array_equal(ds.Y, again.Y)
    other = generate_dataset(cfg, 4)
    assert not np.array_equal(ds.X, other.X)


def test_csv_round_trip(tmp_path, small):
    _, ds = small
    path = tmp_path / "d.csv"
    write_csv(ds, path)
    assert path.read_text().splitlines()[0] == ",".join(HEADER)
    back = read_csv(path)
    assert np.array_equal(back.X, ds.X) and np.array_equal(back.Y, ds.Y)


def test_split_sizes_and_determinism():
    ds = Dataset(np.zeros((315_000, 9)), np.zeros((315_000, 2)))
    tr, te = split_dataset(ds, 0.7, rng.stream(1, rng.SPLIT))
    assert (len(tr), len(te)) == (220_500, 94_500)
    tiny = Dataset(np.arange(90.0).reshape(10, 9), np.zeros((10, 2)))
    a, b = split_dataset(tiny, 0.999, rng.stream(1, rng.SPLIT))
    assert (len(a), len(b)) == (9, 1)
    a2, _ = split_dataset(tiny, 0.999, rng.stream(1, rng.SPLIT))
    assert np.array_equal(a.X, a2.X)
    with pytest.raises(ValueError):
        split_dataset(tiny, 0.01, rng.stream(1, rng.SPLIT))
    with pytest.raises(ValueError):
        split_dataset(tiny, 1.0, rng.stream(1, rng.SPLIT))


def test_split_partition_and_train_statistics(small, split_small):
    _, ds = small
    tr, te = split_small
    rows = {tuple(r) for r in np.vstack([tr.X, te.X])}
    assert len(tr) + len(te) == len(ds) and len(rows) == len(ds)
    assert np.allclose(tr.feature_mean, tr.X.mean(0))
    assert te.feature_mean is tr.feature_mean


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 9)), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        Dataset(np.full((1, 9), np.nan), np.zeros((1, 2)))


# ---- models

def test_tree_model(split_small, tmp_path):
    tr, te = split_small
    m = fit_decision_tree(tr, TreeParams())
    p = predict(m, te.X[0])
    assert p.shape == (2,)
    assert np.array_equal(p, predict(m, te.X[0]))
    save_model(m, tmp_path / "t.json")
    assert np.array_equal(load_model(tmp_path / "t.json").predict(te.X), m.predict(te.X))
    with pytest.raises(ValueError):
        m.predict(np.zeros(8))


def test_tree_position_target_is_leaf_mean(split_small):
    tr, _ = split_small
    m = fit_decision_tree(tr, TreeParams(max_depth=3, target="position"))
    sub = m.submodels[0]
    leaves = sub.apply(tr.X)
    for leaf in np.unique(leaves):
        assert sub.value_[leaf] == pytest.approx(tr.Y[leaves == leaf, 0].mean())
    assert np.array_equal(m.predict(tr.X)[:, 0], sub.value_[leaves])


def test_svr_model(split_small, tmp_path):
    tr, te = split_small
    m = fit_svr(tr, SvrParams())
    for sub in m.submodels:
        assert np.all(np.abs(sub.dual_coef_) <= 1.0)
    save_model(m, tmp_path / "s.json")
    assert np.allclose(load_model(tmp_path / "s.json").predict(te.X), m.predict(te.X), rtol=0, atol=1e-9)
    assert isinstance(evaluate(m, te), RegressionMetrics)
    with pytest.raises(ValueError):
        fit_svr(Dataset(tr.X, tr.Y), SvrParams())


def test_generated_dataset_beats_mean_predictor(split_small):
    tr, te = split_small
    for m in (fit_decision_tree(tr), fit_svr(tr)):
        assert evaluate(m, te).r2 > 0


def test_load_rejects_foreign_file(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"format": "other", "version": 1}')
    with pytest.raises(ValueError):
        load_model(p)
