"""Road world: RSU placement, vehicle kinematics, attacker and RSU selection."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


class InsufficientCoverage(RuntimeError):
    """Fewer than the requested number of RSUs are within range."""


@dataclass(frozen=True)
class Rsu:
    id: int
    position: tuple[float, float]

    def __post_init__(self):
        if not np.all(np.isfinite(self.position)):
            raise ValueError(f"RSU {self.id} has a non-finite position")


@dataclass(frozen=True)
class VehicleState:
    position: tuple[float, float]
    speed: float
    heading: tuple[float, float] = (1.0, 0.0)
    slot_index: int = 0

    def __post_init__(self):
        if not 0.0 <= self.speed <= 33.0:
            raise ValueError(f"speed {self.speed} outside [0, 33] m/s")
        if abs(np.hypot(*self.heading) - 1.0) > 1e-9:
            raise ValueError("heading must be a unit vector")


@dataclass(frozen=True)
class ScenarioConfig:
    """Defaults: 3000 m x 20 m road, RSUs every 300 m, 1 m attacker offset."""

    road_length: float = 3000.0
    road_width: float = 20.0
    rsu_spacing: float = 300.0
    rsu_range_limit: float = 400.0
    legit_start: tuple[float, float] = (1.0, 10.0)
    attacker_start: tuple[float, float] = (0.0, 10.0)
    speed: float = 1.0
    heading: tuple[float, float] = (1.0, 0.0)


@dataclass(frozen=True)
class Scenario:
    road_length: float
    road_width: float
    rsus: tuple[Rsu, ...]
    rsu_range_limit: float
    legit: VehicleState
    attacker: VehicleState
    attacker_offset: tuple[float, float]
    _positions: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.rsu_range_limit <= 0:
            raise ValueError("rsu_range_limit must be positive")
        ids = [r.id for r in self.rsus]
        if len(set(ids)) != len(ids):
            raise ValueError("RSU ids must be unique")
        for v in (self.legit, self.attacker):
            x, y = v.position
            if not (0.0 <= x <= self.road_length and 0.0 <= y <= self.road_width):
                raise ValueError(f"vehicle position {v.position} outside the road")
        # sorted by id so that a stable distance sort breaks ties by lower id
        order = sorted(self.rsus, key=lambda r: r.id)
        object.__setattr__(self, "rsus", tuple(order))
        pos = np.array([r.position for r in order], dtype=float).reshape(-1, 2)
        pos.setflags(write=False)
        object.__setattr__(self, "_positions", pos)

    @property
    def rsu_positions(self) -> np.ndarray:
        return self._positions


def build_road_scenario(config: ScenarioConfig = ScenarioConfig()) -> Scenario:
    """Place RSUs on both road edges every ``rsu_spacing`` meters.

    The lower edge (y = 0) gets ids 0..m-1 and the upper edge ids m..2m-1.
    """
    c = config
    if c.road_length <= 0 or c.road_width <= 0:
        raise ValueError("road dimensions must be positive")
    if c.rsu_spacing <= 0:
        raise ValueError("rsu_spacing must be positive")
    n_per_side = int(np.floor(c.road_length / c.rsu_spacing + 1e-9)) + 1
    xs = np.arange(n_per_side) * c.rsu_spacing
    rsus = [Rsu(i, (float(x), 0.0)) for i, x in enumerate(xs)]
    rsus += [Rsu(n_per_side + i, (float(x), c.road_width)) for i, x in enumerate(xs)]
    legit = VehicleState(tuple(map(float, c.legit_start)), c.speed, tuple(c.heading))
    offset = (c.attacker_start[0] - c.legit_start[0], c.attacker_start[1] - c.legit_start[1])
    attacker = VehicleState(tuple(map(float, c.attacker_start)), c.speed, tuple(c.heading))
    return Scenario(c.road_length, c.road_width, tuple(rsus), c.rsu_range_limit,
                    legit, attacker, offset)


def step_vehicle(state: VehicleState, dt: float) -> VehicleState:
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = state.position[0] + state.speed * state.heading[0] * dt
    y = state.position[1] + state.speed * state.heading[1] * dt
    return replace(state, position=(x, y), slot_index=state.slot_index + 1)


def attacker_step(scenario: Scenario) -> VehicleState:
    """Attacker state for the current slot: legit position plus the fixed offset."""
    lg = scenario.legit
    dx, dy = scenario.attacker_offset
    pos = (lg.position[0] + dx, lg.position[1] + dy)
    return VehicleState(pos, lg.speed, lg.heading, lg.slot_index)


def nearest_rsus(rsu_positions: np.ndarray, points: np.ndarray, k: int,
                 range_limit: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized RSU selection.

    Returns ``(idx, covered)``: ``idx[t]`` holds the row indices of the ``k``
    nearest RSUs to ``points[t]`` in ascending distance (ties by lower row),
    ``covered[t]`` is False when fewer than ``k`` lie strictly inside range.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = np.linalg.norm(pts[:, None, :] - rsu_positions[None, :, :], axis=-1)
    idx = np.argsort(d, axis=1, kind="stable")[:, :k]
    kth = np.take_along_axis(d, idx[:, -1:], axis=1)[:, 0]
    covered = (kth < range_limit) & (rsu_positions.shape[0] >= k)
    return idx, covered


def select_rsus(scenario: Scenario, tx_position, k: int = 3) -> list[Rsu]:
    idx, covered = nearest_rsus(scenario.rsu_positions, np.asarray(tx_position, float),
                                k, scenario.rsu_range_limit)
    if not covered[0]:
        raise InsufficientCoverage(
            f"fewer than {k} RSUs within {scenario.rsu_range_limit} m of {tuple(tx_position)}")
    return [scenario.rsus[i] for i in idx[0]]


def road_trajectory(scenario: Scenario, speed: float, dt: float, n_slots: int) -> np.ndarray:
    """Legit positions for ``n_slots`` slots along the road heading.

    The vehicle restarts from its start position whenever it would reach the
    road end, so the trajectory can be arbitrarily long.
    """
    start = np.asarray(scenario.legit.position, dtype=float)
    heading = np.asarray(scenario.legit.heading, dtype=float)
    travel = speed * dt * np.arange(n_slots)
    # distance available before the road end along the heading
    span = _distance_to_edge(start, heading, scenario.road_length, scenario.road_width)
    if span > 0:
        travel = np.mod(travel, span)
    return start + travel[:, None] * heading


def _distance_to_edge(start, heading, length, width) -> float:
    limits = []
    for s, h, hi in ((start[0], heading[0], length), (start[1], heading[1], width)):
        if h > 0:
            limits.append((hi - s) / h)
        elif h < 0:
            limits.append(-s / h)
    return min(limits) if limits else np.inf
