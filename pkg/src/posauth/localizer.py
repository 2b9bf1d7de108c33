"""Linearized least-squares position extraction from ranges.

Squaring the range equations gives, for each anchor ``j``::

    -2 x_j x - 2 y_j y + (x^2 + y^2) = r_j^2 - x_j^2 - y_j^2

which is linear in ``theta = (x, y, x^2 + y^2)``. The position estimate is
the first two entries of the least-squares ``theta``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import RangeEstimate
from .scenario import Rsu

DEGENERATE_COND = 1e12
ILL_CONDITIONED_COND = 1e9


class DegenerateGeometry(np.linalg.LinAlgError):
    """Anchors are (numerically) collinear; the system has no unique solution."""


@dataclass(frozen=True)
class RangeSystem:
    design_matrix: np.ndarray  # A, L x 3
    observation: np.ndarray  # b_hat, L
    anchor_ids: tuple[int, ...]

    def __post_init__(self):
        A, b = self.design_matrix, self.observation
        if A.ndim != 2 or A.shape[1] != 3 or A.shape[0] < 3:
            raise ValueError("design matrix must be L x 3 with L >= 3")
        if b.shape != (A.shape[0],):
            raise ValueError("observation length must match the design matrix")


@dataclass(frozen=True)
class PositionEstimate:
    position: np.ndarray
    theta: np.ndarray
    residual_norm: float
    condition_flag: str  # "ok" | "ill-conditioned"
    condition_number: float


def design_rows(anchors) -> np.ndarray:
    anchors = np.asarray(anchors, dtype=float)
    ones = np.ones(anchors.shape[:-1] + (1,))
    return np.concatenate([-2.0 * anchors, ones], axis=-1)


def observation_vector(anchors, ranges) -> np.ndarray:
    anchors = np.asarray(anchors, dtype=float)
    r = np.asarray(ranges, dtype=float)
    return r ** 2 - np.sum(anchors ** 2, axis=-1)


def build_system(rsus: Sequence[Rsu], ranges: Sequence[RangeEstimate]) -> RangeSystem:
    if len(rsus) != len(ranges):
        raise ValueError(f"{len(rsus)} RSUs but {len(ranges)} ranges")
    if len(rsus) < 3:
        raise ValueError("at least 3 anchors are required")
    by_id = {r.rsu_id: r.range for r in ranges}
    if set(by_id) != {r.id for r in rsus}:
        raise ValueError("range estimates do not match the RSU ids")
    anchors = np.array([r.position for r in rsus], dtype=float)
    rng = np.array([by_id[r.id] for r in rsus])
    return RangeSystem(design_rows(anchors), observation_vector(anchors, rng),
                       tuple(r.id for r in rsus))


def _normal_cond(A: np.ndarray) -> np.ndarray:
    # cond(A^T A) = cond(A)^2; inf when rank deficient
    s = np.linalg.svd(A, compute_uv=False)
    with np.errstate(divide="ignore"):
        return np.where(s[..., -1] > 0, (s[..., 0] / s[..., -1]) ** 2, np.inf)


def _qr_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    # column equilibration keeps the x^2+y^2 column from swamping the others
    scale = np.linalg.norm(A, axis=-2, keepdims=True)
    scale = np.where(scale > 0, scale, 1.0)
    Q, R = np.linalg.qr(A / scale)
    z = np.linalg.solve(R, np.einsum("...ji,...j->...i", Q, b)[..., None])[..., 0]
    return z / scale[..., 0, :]


def solve_ls(system: RangeSystem) -> PositionEstimate:
    A, b = system.design_matrix, system.observation
    cond = float(_normal_cond(A))
    if not cond < DEGENERATE_COND:
        raise DegenerateGeometry(f"cond(A^T A) = {cond:.3g} for anchors {system.anchor_ids}")
    theta = _qr_solve(A, b)
    res = float(np.linalg.norm(A @ theta - b))
    flag = "ok" if cond < ILL_CONDITIONED_COND else "ill-conditioned"
    return PositionEstimate(extract_position(theta), theta, res, flag, cond)


def extract_position(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta must be finite")
    return theta[..., :2].copy()


def solve_ls_batch(anchors, ranges) -> tuple[np.ndarray, np.ndarray]:
    """Solve many systems at once.

    ``anchors`` is ``(T, L, 2)``, ``ranges`` is ``(T, L)``. Returns
    ``(theta, ok)`` where rows with a degenerate geometry are NaN and
    ``ok`` is False.
    """
    anchors = np.asarray(anchors, dtype=float)
    A = design_rows(anchors)
    b = observation_vector(anchors, ranges)
    ok = _normal_cond(A) < DEGENERATE_COND
    theta = np.full(b.shape[:-1] + (3,), np.nan)
    if np.any(ok):
        theta[ok] = _qr_solve(A[ok], b[ok])
    return theta, ok


def grid_oracle(rsus, ranges, bounds, step: float, objective: str = "range") -> np.ndarray:
    """Brute-force argmin over a rectangular grid.

    ``bounds`` is ``(xmin, xmax, ymin, ymax)``. ``objective="range"`` scores
    ``sum_j (|p - p_j| - r_j)^2``; ``objective="linearized"`` scores the
    squared-range residual ``min_t |A (x, y, t) - b|^2`` that :func:`solve_ls`
    minimizes. Ties go to the smaller x, then the smaller y.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    anchors = np.array([r.position if isinstance(r, Rsu) else r for r in rsus], dtype=float)
    r = np.array([x.range if isinstance(x, RangeEstimate) else x for x in ranges], dtype=float)
    xmin, xmax, ymin, ymax = bounds
    xs = xmin + step * np.arange(int(np.floor((xmax - xmin) / step + 1e-9)) + 1)
    ys = ymin + step * np.arange(int(np.floor((ymax - ymin) / step + 1e-9)) + 1)
    if xs.size == 0 or ys.size == 0 or xmax < xmin or ymax < ymin:
        raise ValueError("empty grid")
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    if objective == "range":
        cost = np.zeros_like(X)
        for (ax, ay), rj in zip(anchors, r):
            cost += (np.hypot(X - ax, Y - ay) - rj) ** 2
    elif objective == "linearized":
        b = observation_vector(anchors, r)
        # residual of each row without the free third unknown
        e = np.stack([-2 * ax * X - 2 * ay * Y - bj for (ax, ay), bj in zip(anchors, b)])
        cost = np.sum((e - e.mean(axis=0)) ** 2, axis=0)
    else:
        raise ValueError(f"unknown objective {objective!r}")
    k = int(np.argmin(cost))  # first minimum in (x, y) lexicographic order
    i, j = np.unravel_index(k, cost.shape)
    return np.array([xs[i], ys[j]])
