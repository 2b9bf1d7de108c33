"""Position test statistic, threshold test, empirical error rates and ROC.

Also carries the angle-of-arrival baseline: a bearing fingerprint at the
selected RSUs compared against perfectly known legitimate bearings.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .scenario import Rsu

H0 = "H0"
H1 = "H1"
LEGIT = "legit"
MALICIOUS = "malicious"


@dataclass(frozen=True)
class DecisionRecord:
    test_statistic: float
    threshold: float
    decision: str
    truth: str

    def __post_init__(self):
        if self.test_statistic < 0:
            raise ValueError("test statistic must be non-negative")
        if self.decision not in (H0, H1) or self.truth not in (LEGIT, MALICIOUS):
            raise ValueError("bad decision or truth label")


@dataclass(frozen=True)
class ErrorRates:
    p_fa: float
    p_md: float
    n_h0: int
    n_h1: int


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    p_fa: float
    p_d: float


def test_statistic(p_hat, p_ground):
    """Euclidean distance between the estimated and the predicted position."""
    d = np.linalg.norm(np.asarray(p_hat, float) - np.asarray(p_ground, float), axis=-1)
    return d if np.ndim(d) else float(d)


def decide(ts: float, threshold: float) -> str:
    """``H1`` when ``ts >= threshold``; equality is treated as an attack."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return H1 if ts >= threshold else H0


def record(ts: float, threshold: float, truth: str) -> DecisionRecord:
    return DecisionRecord(float(ts), float(threshold), decide(ts, threshold), truth)


def empirical_error_rates(records: Iterable[DecisionRecord]) -> ErrorRates:
    n0 = n1 = fa = md = 0
    for r in records:
        if r.truth == LEGIT:
            n0 += 1
            fa += r.decision == H1
        else:
            n1 += 1
            md += r.decision == H0
    if n0 == 0 or n1 == 0:
        raise ValueError("need at least one legitimate and one malicious record")
    return ErrorRates(fa / n0, md / n1, n0, n1)


def error_rates(ts_h0, ts_h1, threshold: float) -> ErrorRates:
    """Array shortcut for :func:`empirical_error_rates` at one threshold."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    ts_h0 = np.asarray(ts_h0, float)
    ts_h1 = np.asarray(ts_h1, float)
    if ts_h0.size == 0 or ts_h1.size == 0:
        raise ValueError("need at least one legitimate and one malicious sample")
    return ErrorRates(float(np.mean(ts_h0 >= threshold)), float(np.mean(ts_h1 < threshold)),
                      ts_h0.size, ts_h1.size)


def roc_sweep(ts_h0, ts_h1, thresholds: Sequence[float]) -> list[RocPoint]:
    s0 = np.sort(np.asarray(ts_h0, float))
    s1 = np.sort(np.asarray(ts_h1, float))
    if s0.size == 0 or s1.size == 0:
        raise ValueError("score arrays must be non-empty")
    th = np.asarray(thresholds, float)
    if np.any(np.diff(th) < 0):
        raise ValueError("thresholds must be sorted ascending")
    # #(ts0 >= eps) and #(ts1 < eps)
    p_fa = (s0.size - np.searchsorted(s0, th, side="left")) / s0.size
    p_md = np.searchsorted(s1, th, side="left") / s1.size
    return [RocPoint(float(t), float(f), float(1 - m)) for t, f, m in zip(th, p_fa, p_md)]


def pd_at_pfa(points: Sequence[RocPoint], pfa_grid) -> np.ndarray:
    """Detection rate on a false-alarm grid by linear interpolation.

    Where several points share a false-alarm rate the best detection rate
    is used, i.e. the upper edge of the staircase.
    """
    fa = np.array([p.p_fa for p in points])
    pd = np.array([p.p_d for p in points])
    ufa = np.unique(fa)
    upd = np.array([pd[fa == f].max() for f in ufa])
    return np.interp(np.asarray(pfa_grid, float), ufa, upd)


def wrap_angle(theta):
    """Map angles to (-pi, pi]."""
    t = np.asarray(theta, float)
    w = t - 2 * np.pi * np.ceil((t - np.pi) / (2 * np.pi))
    return w if w.ndim else float(w)


def bearing(tx, rsu_position):
    tx = np.asarray(tx, float)
    p = np.asarray(rsu_position, float)
    d = tx - p
    if np.any(np.hypot(d[..., 0], d[..., 1]) == 0):
        raise ValueError("transmitter coincides with the RSU")
    return np.arctan2(d[..., 1], d[..., 0])


def aoa_variance(lq_db) -> float:
    return 1.0 / (2.0 * 10.0 ** (np.asarray(lq_db, float) / 10.0))


def aoa_estimate(tx, rsu: Rsu, lq, rng: np.random.Generator) -> float:
    """Noisy bearing of ``tx`` seen from ``rsu``; noise variance 1/(2 LQ)."""
    lq_db = getattr(lq, "lq_db", lq)
    theta = bearing(tx, rsu.position)
    return wrap_angle(theta + np.sqrt(aoa_variance(lq_db)) * rng.standard_normal())


def aoa_estimates(tx, anchors, lq_db: float, rng: np.random.Generator) -> np.ndarray:
    """Array version: ``tx`` is (T, 2), ``anchors`` (T, k, 2); returns (T, k)."""
    theta = bearing(np.asarray(tx, float)[:, None, :], anchors)
    return wrap_angle(theta + np.sqrt(aoa_variance(lq_db)) * rng.standard_normal(theta.shape))


def aoa_statistic(angles, ground_angles):
    d = wrap_angle(np.asarray(angles, float) - np.asarray(ground_angles, float))
    ts = np.linalg.norm(np.atleast_1d(d), axis=-1)
    return ts if np.ndim(ts) else float(ts)


def aoa_decide(angles, ground_angles, threshold: float) -> str:
    return decide(aoa_statistic(angles, ground_angles), threshold)


def write_decision_log(path, rows: Iterable[tuple[int, str, float, float, str]]) -> None:
    """CSV with columns ``trial,truth,ts,threshold,decision``."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("trial", "truth", "ts", "threshold", "decision"))
        for trial, truth, ts, thr, dec in rows:
            w.writerow((trial, truth, repr(float(ts)), repr(float(thr)), dec))
