"""Monte Carlo experiments on the road scenario and the tracker benchmark.

One sweep point is an (LQ, speed) pair. Each trial is one pair of slots:
the legitimate vehicle transmits in slot ``s`` and the tracker predicts
where it will be in slot ``s + 1``. In slot ``s + 1`` the legitimate vehicle
transmits again (an H0 sample) and the attacker transmits in the idle slot
next to it (an H1 sample); both are scored against the same prediction.
"""
from __future__ import annotations

import csv
import functools
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.stats import chi2

from .. import __version__
from .. import rng as rngmod
from ..authenticator import aoa_estimates, aoa_variance, bearing, error_rates, roc_sweep, wrap_angle
from ..channel import ranging_variance, sample_toas
from ..localizer import solve_ls_batch
from ..scenario import InsufficientCoverage, Scenario, build_road_scenario, nearest_rsus, road_trajectory
from ..tracker import dataset as ds_mod
from ..tracker.model import Regressor, evaluate, fit_decision_tree, fit_svr, load_model
from .config import ExperimentConfig

log = logging.getLogger(__name__)

SWEEP_HEADER = ("lq_db", "threshold", "speed", "pfa", "pmd", "pfa_baseline", "pmd_baseline")
ROC_HEADER = ("lq_db", "speed", "threshold", "pfa", "pd")
BENCH_HEADER = ("model", "rmse", "mse", "mae", "r2")


@dataclass
class ResultTable:
    kind: str
    header: tuple[str, ...]
    rows: list[tuple]
    provenance: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        i = self.header.index(name)
        return np.array([r[i] for r in self.rows])

    def select(self, **match) -> "ResultTable":
        keep = [r for r in self.rows
                if all(r[self.header.index(k)] == v for k, v in match.items())]
        return ResultTable(self.kind, self.header, keep, self.provenance)

    def write_csv(self, path, columns=None) -> Path:
        cols = tuple(columns or self.header)
        ix = [self.header.index(c) for c in cols]
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for r in self.rows:
                w.writerow([_cell(r[i]) for i in ix])
        return path


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def provenance(cfg: ExperimentConfig, kind: str) -> dict:
    return {"kind": kind, "config_hash": cfg.digest(), "seed": cfg.seed, "version": __version__}


def write_provenance(table: ResultTable, out_dir) -> Path:
    p = Path(out_dir) / f"{table.kind}.provenance.json"
    p.write_text(json.dumps(table.provenance, sort_keys=True) + "\n")
    return p


# ---------------------------------------------------------------- tracker


def load_dataset(cfg: ExperimentConfig, slots_per_lq: int | None = None) -> ds_mod.Dataset:
    if cfg.dataset.path and slots_per_lq is None:
        return ds_mod.read_csv(cfg.dataset.path)
    return ds_mod.generate_dataset(cfg.gen_config(slots_per_lq), cfg.seed)


def split(cfg: ExperimentConfig, data: ds_mod.Dataset):
    return ds_mod.split_dataset(data, cfg.dataset.split_ratio, rngmod.stream(cfg.seed, rngmod.SPLIT))


def train_model(cfg: ExperimentConfig, train: ds_mod.Dataset, kind: str | None = None) -> Regressor:
    kind = kind or cfg.model.tracker
    if kind == "svr":
        return fit_svr(train, cfg.model.svr_params())
    return fit_decision_tree(train, cfg.model.tree_params())


@functools.lru_cache(maxsize=4)
def _trained_tracker(seed, channel, dataset, model) -> Regressor:
    cfg = ExperimentConfig(channel=channel, dataset=dataset, model=model).with_seed(seed)
    train, _ = split(cfg, load_dataset(cfg, model.train_slots_per_lq))
    return train_model(cfg, train)


def tracker_for(cfg: ExperimentConfig) -> Regressor:
    """The ground-truth predictor: loaded from ``model.path`` or trained."""
    if cfg.model.path:
        p = Path(cfg.model.path)
        if not p.is_file():
            raise FileNotFoundError(f"model file {p} does not exist")
        return load_model(p)
    return _trained_tracker(cfg.seed, cfg.channel, cfg.dataset, cfg.model)


# ---------------------------------------------------------------- road trials


@dataclass
class PointScores:
    """Test statistics for one (LQ, speed) point; NaN marks a lost trial."""

    ts_h0: np.ndarray
    ts_h1: np.ndarray
    aoa_h0: np.ndarray
    aoa_h1: np.ndarray
    lost: float


def _localize(rsu_pos, points, lq_db, cfg: ExperimentConfig, g, range_limit):
    ch = cfg.channel_params()
    idx, covered = nearest_rsus(rsu_pos, points, 3, range_limit)
    anchors = rsu_pos[idx]
    dist = np.maximum(np.linalg.norm(anchors - points[:, None, :], axis=-1), 1e-9)
    var_t = ranging_variance(dist, lq_db, ch) / ch.rf_speed ** 2
    toas = sample_toas(g, dist, var_t, ch)
    theta, ok = solve_ls_batch(anchors, ch.rf_speed * toas)
    return idx, toas, theta[:, :2], covered & ok


def simulate_point(cfg: ExperimentConfig, scn: Scenario, model: Regressor, lq_db: float,
                   speed: float, trials: int, g: np.random.Generator) -> PointScores:
    dt = cfg.sweep.slot_duration
    rsu_pos = scn.rsu_positions
    q = road_trajectory(scn, speed, dt, trials + 1)
    idx, toas, est, valid = _localize(rsu_pos, q, lq_db, cfg, g, scn.rsu_range_limit)

    dtoa = np.zeros_like(toas)
    prev = np.zeros(len(q), bool)
    prev[1:] = valid[:-1]
    dtoa[1:] = toas[1:] - toas[:-1]
    dtoa[~prev] = 0.0
    feats = np.column_stack([np.full(trials, float(lq_db)), toas[:-1], dtoa[:-1], est[:-1]])
    usable = valid[:-1]
    pred = np.full((trials, 2), np.nan)
    if usable.any():
        pred[usable] = model.predict(feats[usable])

    atk = q[1:] + np.asarray(scn.attacker_offset, float)
    _, _, est_a, valid_a = _localize(rsu_pos, atk, lq_db, cfg, g, scn.rsu_range_limit)

    ok0 = usable & valid[1:]
    ok1 = usable & valid_a
    ts0 = np.where(ok0, np.linalg.norm(est[1:] - pred, axis=1), np.nan)
    ts1 = np.where(ok1, np.linalg.norm(est_a - pred, axis=1), np.nan)

    # baseline: bearings at the RSUs serving the legitimate vehicle, compared
    # with the exact bearings of its true position
    anchors = rsu_pos[idx[1:]]
    truth = bearing(q[1:, None, :], anchors)
    a0 = np.linalg.norm(wrap_angle(aoa_estimates(q[1:], anchors, lq_db, g) - truth), axis=1)
    a1 = np.linalg.norm(wrap_angle(aoa_estimates(atk, anchors, lq_db, g) - truth), axis=1)

    lost = 1.0 - min(ok0.mean(), ok1.mean())
    if lost > cfg.sweep.max_coverage_loss:
        raise InsufficientCoverage(
            f"LQ {lq_db} dB, speed {speed} m/s: {lost:.1%} of trials lacked 3 RSUs in range "
            f"or a usable geometry (limit {cfg.sweep.max_coverage_loss:.0%})")
    return PointScores(ts0, ts1, a0, a1, lost)


def aoa_threshold(lq_db: float, pfa: float) -> float:
    """Bearing threshold with false-alarm rate ``pfa`` under Gaussian noise.

    The statistic is the norm of three i.i.d. errors, so TS^2 / sigma^2 is
    chi-square with 3 degrees of freedom (wrapping ignored).
    """
    return float(np.sqrt(aoa_variance(lq_db) * chi2.ppf(1.0 - pfa, 3)))


def _scenario(cfg: ExperimentConfig, speed: float) -> Scenario:
    return build_road_scenario(replace(cfg.scenario, speed=speed))


def point_scores(cfg: ExperimentConfig, model: Regressor, lq_db: float, speed: float,
                 purpose: int, key: tuple[int, int]) -> PointScores:
    g = rngmod.stream(cfg.seed, purpose, *key)
    return simulate_point(cfg, _scenario(cfg, speed), model, lq_db, speed, cfg.sweep.trials, g)


def run_error_sweep(cfg: ExperimentConfig, model: Regressor | None = None) -> ResultTable:
    """Pfa/Pmd of the position test and the bearing baseline per sweep point."""
    model = model or tracker_for(cfg)
    s = cfg.sweep
    rows = []
    for si, speed in enumerate(s.speeds):
        for li, lq in enumerate(s.lq_db):
            sc = point_scores(cfg, model, lq, speed, rngmod.SWEEP, (li, si))
            h0, h1 = sc.ts_h0[~np.isnan(sc.ts_h0)], sc.ts_h1[~np.isnan(sc.ts_h1)]
            base = error_rates(sc.aoa_h0, sc.aoa_h1, aoa_threshold(lq, s.aoa_pfa))
            for thr in s.thresholds:
                er = error_rates(h0, h1, thr)
                rows.append((float(lq), float(thr), float(speed), er.p_fa, er.p_md,
                             base.p_fa, base.p_md))
    rows.sort(key=lambda r: (r[2], r[1], r[0]))
    return ResultTable("sweep", SWEEP_HEADER, rows, provenance(cfg, "sweep"))


def roc_grid(max_ts: float, n: int) -> np.ndarray:
    """0 followed by log-spaced thresholds ending just above ``max_ts``."""
    top = max(max_ts, 1e-3) * (1 + 1e-9) + 1e-12
    return np.concatenate([[0.0], np.geomspace(1e-3 * min(top, 1.0), top, n - 1)])


def run_roc(cfg: ExperimentConfig, model: Regressor | None = None) -> ResultTable:
    """ROC curves of the position test per (LQ, speed) on a shared grid."""
    model = model or tracker_for(cfg)
    s = cfg.sweep
    scores = {}
    for si, speed in enumerate(s.roc_speeds):
        for li, lq in enumerate(s.roc_lq_db):
            sc = point_scores(cfg, model, lq, speed, rngmod.ROC, (li, si))
            scores[(lq, speed)] = (sc.ts_h0[~np.isnan(sc.ts_h0)], sc.ts_h1[~np.isnan(sc.ts_h1)])
    top = max(max(a.max(), b.max()) for a, b in scores.values())
    grid = roc_grid(float(top), s.roc_points)
    rows = []
    for (lq, speed), (h0, h1) in scores.items():
        for p in roc_sweep(h0, h1, grid):
            rows.append((float(lq), float(speed), p.threshold, p.p_fa, p.p_d))
    rows.sort(key=lambda r: (r[1], r[0], r[2]))
    return ResultTable("roc", ROC_HEADER, rows, provenance(cfg, "roc"))


def run_ml_benchmark(cfg: ExperimentConfig, data: ds_mod.Dataset | None = None) -> ResultTable:
    """Decision tree versus SVR on one train/test split of the mobility dataset."""
    data = data if data is not None else load_dataset(cfg)
    train, test = split(cfg, data)
    rows = []
    for kind in ("decision-tree", "svr"):
        m = evaluate(train_model(cfg, train, kind), test)
        rows.append((kind, m.rmse, m.mse, m.mae, m.r2))
    return ResultTable("bench", BENCH_HEADER, rows, provenance(cfg, "bench"))
