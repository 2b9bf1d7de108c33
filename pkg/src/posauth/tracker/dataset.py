"""Mobility dataset: one row per slot of (LQ, ToAs, ToA differences, position).

Rows are generated by driving a legitimate vehicle through a square region
with randomly deployed RSUs. Each LQ block uses its own random substream so
blocks can be generated independently.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import rng as rngmod
from ..channel import ChannelParams, ranging_variance, sample_toas
from ..localizer import solve_ls_batch
from ..scenario import nearest_rsus

log = logging.getLogger(__name__)

HEADER = ("lq_db", "toa1", "toa2", "toa3", "dtoa1", "dtoa2", "dtoa3",
          "x", "y", "label_x", "label_y")
N_FEATURES = 9
POS_COLS = slice(7, 9)


@dataclass(frozen=True)
class FeatureRow:
    lq_db: float
    toas: tuple[float, float, float]
    toa_diffs: tuple[float, float, float]
    current_position: tuple[float, float]
    label_next_position: tuple[float, float]

    @property
    def features(self) -> np.ndarray:
        return np.array([self.lq_db, *self.toas, *self.toa_diffs, *self.current_position])


@dataclass
class Dataset:
    """Feature matrix ``X`` (n x 9) and labels ``Y`` (n x 2).

    ``feature_mean``/``feature_std`` are set by :func:`split_dataset` from the
    training rows. ``meta`` holds generation-side arrays (true positions,
    chosen RSUs, slot numbers) when the dataset was simulated.
    """

    X: np.ndarray
    Y: np.ndarray
    feature_mean: np.ndarray | None = None
    feature_std: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float).reshape(-1, N_FEATURES)
        self.Y = np.asarray(self.Y, dtype=float).reshape(-1, 2)
        if self.X.shape[0] != self.Y.shape[0]:
            raise ValueError("feature and label row counts differ")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.Y))):
            raise ValueError("dataset rows must be finite")

    def __len__(self) -> int:
        return self.X.shape[0]

    def row(self, i: int) -> FeatureRow:
        x = self.X[i]
        return FeatureRow(float(x[0]), tuple(x[1:4]), tuple(x[4:7]), tuple(x[7:9]), tuple(self.Y[i]))

    def subset(self, idx) -> "Dataset":
        meta = {k: v[idx] for k, v in self.meta.items() if isinstance(v, np.ndarray)
                and v.shape[:1] == (len(self),)}
        return Dataset(self.X[idx], self.Y[idx], self.feature_mean, self.feature_std, meta)

    def normalized(self) -> np.ndarray:
        if self.feature_mean is None:
            raise ValueError("dataset has no normalization statistics; split it first")
        return (self.X - self.feature_mean) / self.feature_std


@dataclass(frozen=True)
class GenConfig:
    region_size: float = 5000.0
    n_rsus: int = 100
    lq_db: tuple[float, ...] = tuple(float(v) for v in range(21))
    slots_per_lq: int = 15000
    speed_min: float = 0.0
    speed_max: float = 33.0
    slot_duration: float = 0.1
    rsu_range_limit: float = 400.0
    channel: ChannelParams = ChannelParams()
    heading_mode: str = "slot"
    chunk: int = 20000
    max_slots_factor: int = 200

    def __post_init__(self):
        if self.region_size <= 0 or self.n_rsus < 3 or self.slots_per_lq < 1:
            raise ValueError("invalid dataset generation config")
        if not 0 <= self.speed_min <= self.speed_max <= 33:
            raise ValueError("speeds must satisfy 0 <= min <= max <= 33 m/s")
        if self.slot_duration <= 0 or not self.lq_db:
            raise ValueError("slot_duration must be positive and lq_db non-empty")
        if self.heading_mode not in ("slot", "block"):
            raise ValueError(f"unknown heading_mode {self.heading_mode!r}")


def _fold(u, width):
    # reflect an unfolded coordinate back into [0, width]
    m = np.mod(u, 2 * width)
    return width - np.abs(width - m)


def deploy_rsus(cfg: GenConfig, seed: int) -> np.ndarray:
    """Random RSU positions for a dataset."""
    g = rngmod.stream(seed, rngmod.DEPLOY)
    return g.uniform(0.0, cfg.region_size, size=(cfg.n_rsus, 2))


def covered_start(rsus, cfg: GenConfig, g: np.random.Generator) -> np.ndarray:
    """Uniform random start point with three RSUs in range that do not lie
    on a line, so the first slot can be localized."""
    for _ in range(10000):
        start = g.uniform(0.0, cfg.region_size, size=2)
        idx, covered = nearest_rsus(rsus, start[None], 3, cfg.rsu_range_limit)
        if covered[0]:
            anchors = rsus[idx]
            if solve_ls_batch(anchors, np.linalg.norm(anchors - start, axis=-1))[1][0]:
                return start
    raise RuntimeError("no covered start position found; deployment too sparse")


def _simulate_block(rsus, lq_db, cfg: GenConfig, g: np.random.Generator):
    """Slot-level arrays for one LQ block, extended chunk by chunk until
    enough labelled rows exist."""
    start = covered_start(rsus, cfg, g)
    phi = g.uniform(0.0, 2 * np.pi)
    heading = np.array([np.cos(phi), np.sin(phi)])
    u = np.asarray(start, dtype=float)
    parts = []
    n_rows = 0
    n_slots = 0
    while n_rows < cfg.slots_per_lq:
        if n_slots >= cfg.max_slots_factor * cfg.slots_per_lq:
            raise RuntimeError(f"LQ {lq_db} dB: coverage too sparse, {n_rows} rows "
                               f"after {n_slots} slots")
        S = cfg.chunk
        step = g.uniform(cfg.speed_min, cfg.speed_max, size=S) * cfg.slot_duration
        if cfg.heading_mode == "slot":
            ang = g.uniform(0.0, 2 * np.pi, size=S)
            disp = step[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
        else:
            disp = step[:, None] * heading
        unfolded = u + np.concatenate([np.zeros((1, 2)), np.cumsum(disp, axis=0)[:-1]])
        u = unfolded[-1] + disp[-1]
        true_pos = _fold(unfolded, cfg.region_size)
        idx, covered = nearest_rsus(rsus, true_pos, 3, cfg.rsu_range_limit)
        anchors = rsus[idx]
        dist = np.linalg.norm(anchors - true_pos[:, None, :], axis=-1)
        dist = np.maximum(dist, 1e-9)
        var_t = ranging_variance(dist, lq_db, cfg.channel) / cfg.channel.rf_speed ** 2
        toas = sample_toas(g, dist, var_t, cfg.channel)
        theta, ok = solve_ls_batch(anchors, cfg.channel.rf_speed * toas)
        valid = covered & ok
        parts.append((true_pos, idx, toas, theta[:, :2], valid))
        n_slots += S
        v = np.concatenate([p[4] for p in parts])
        n_rows = int(np.sum(v[:-1] & v[1:]))
    true_pos, idx, toas, est, valid = (np.concatenate(a) for a in zip(*parts))
    skipped = int(np.sum(~valid))
    if skipped:
        log.info("LQ %g dB: %d of %d slots skipped (fewer than 3 RSUs in range)",
                 lq_db, skipped, len(valid))
    return true_pos, idx, toas, est, valid


def _block_rows(lq_db, true_pos, idx, toas, est, valid, n_rows):
    emit = np.nonzero(valid[:-1] & valid[1:])[0][:n_rows]
    prev_ok = np.zeros_like(valid)
    prev_ok[1:] = valid[:-1]
    dtoa = np.where(prev_ok[emit, None], toas[emit] - toas[np.maximum(emit - 1, 0)], 0.0)
    X = np.column_stack([np.full(len(emit), float(lq_db)), toas[emit], dtoa, est[emit]])
    Y = est[emit + 1]
    return X, Y, emit, true_pos[emit], idx[emit]


def generate_dataset(cfg: GenConfig, seed: int) -> Dataset:
    """Simulate ``len(cfg.lq_db) * cfg.slots_per_lq`` labelled rows."""
    rsus = deploy_rsus(cfg, seed)
    Xs, Ys, slots, tps, idxs, blocks = [], [], [], [], [], []
    for b, lq in enumerate(cfg.lq_db):
        g = rngmod.stream(seed, rngmod.DATASET, b)
        arrays = _simulate_block(rsus, lq, cfg, g)
        X, Y, emit, tp, ix = _block_rows(lq, *arrays, cfg.slots_per_lq)
        Xs.append(X)
        Ys.append(Y)
        slots.append(emit)
        tps.append(tp)
        idxs.append(ix)
        blocks.append(np.full(len(emit), b))
    meta = {"slot": np.concatenate(slots), "block": np.concatenate(blocks),
            "true_position": np.concatenate(tps), "rsu_index": np.concatenate(idxs),
            "rsu_positions": rsus}
    return Dataset(np.vstack(Xs), np.vstack(Ys), meta=meta)


def split_dataset(ds: Dataset, ratio: float, rng: np.random.Generator) -> tuple[Dataset, Dataset]:
    """Random train/test partition; train size is ``floor(ratio * n)``.

    Normalization statistics come from the training rows and are attached
    to both halves.
    """
    if not 0 < ratio < 1:
        raise ValueError("ratio must be in (0, 1)")
    n = len(ds)
    n_train = int(np.floor(ratio * n))
    if n_train == 0 or n_train == n:
        raise ValueError(f"split of {n} rows at {ratio} leaves an empty side")
    perm = rng.permutation(n)
    train, test = ds.subset(np.sort(perm[:n_train])), ds.subset(np.sort(perm[n_train:]))
    mean = train.X.mean(axis=0)
    std = train.X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    for part in (train, test):
        part.feature_mean, part.feature_std = mean, std
    return train, test


def write_csv(ds: Dataset, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for x, y in zip(ds.X, ds.Y):
            w.writerow([repr(float(v)) for v in (*x, *y)])


def read_csv(path) -> Dataset:
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = tuple(next(r))
        if header != HEADER:
            raise ValueError(f"unexpected dataset header {header}")
        data = np.array([[float(v) for v in row] for row in r], dtype=float).reshape(-1, 11)
    return Dataset(data[:, :9], data[:, 9:])
