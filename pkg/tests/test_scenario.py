import numpy as np
import pytest

from posauth.scenario import (InsufficientCoverage, Rsu, Scenario, ScenarioConfig, VehicleState,
                              attacker_step, build_road_scenario, nearest_rsus, road_trajectory,
                              select_rsus, step_vehicle)


@pytest.fixture
def road():
    return build_road_scenario()


def test_default_road_has_22_rsus(road):
    assert len(road.rsus) == 22
    xs = sorted({r.position[0] for r in road.rsus})
    assert xs == [300.0 * i for i in range(11)]
    assert {r.position[1] for r in road.rsus} == {0.0, 20.0}
    assert len({r.id for r in road.rsus}) == 22


def test_attacker_offset_from_starts(road):
    assert road.attacker_offset == (-1.0, 0.0)
    assert road.legit.position == (1.0, 10.0)
    assert road.attacker.position == (0.0, 10.0)


@pytest.mark.parametrize("kw", [{"rsu_spacing": 0.0}, {"road_length": -1.0}, {"road_width": 0.0}])
def test_bad_geometry_rejected(kw):
    with pytest.raises(ValueError):
        build_road_scenario(ScenarioConfig(**kw))


def test_rsu_layout_is_pure_function_of_geometry():
    a = build_road_scenario(ScenarioConfig(road_length=1000, road_width=30, rsu_spacing=250))
    b = build_road_scenario(ScenarioConfig(road_length=1000, road_width=30, rsu_spacing=250))
    assert np.array_equal(a.rsu_positions, b.rsu_positions)
    assert len(a.rsus) == 10


def test_step_vehicle():
    s = step_vehicle(VehicleState((1.0, 10.0), 1.0), 1.0)
    assert s.position == (2.0, 10.0) and s.slot_index == 1 and s.speed == 1.0
    assert step_vehicle(VehicleState((1.0, 10.0), 0.0), 1.0).position == (1.0, 10.0)
    fast = step_vehicle(VehicleState((0.0, 0.0), 33.0, (0.6, 0.8)), 1.0)
    assert np.hypot(*fast.position) == pytest.approx(33.0)
    with pytest.raises(ValueError):
        step_vehicle(VehicleState((0.0, 0.0), 1.0), 0.0)


def test_vehicle_state_invariants():
    with pytest.raises(ValueError):
        VehicleState((0.0, 0.0), 34.0)
    with pytest.raises(ValueError):
        VehicleState((0.0, 0.0), 1.0, (1.0, 1.0))


def test_attacker_follows_legit(road):
    from dataclasses import replace
    scn = replace(road, legit=VehicleState((5.0, 10.0), 1.0))
    a = attacker_step(scn)
    assert a.position == (4.0, 10.0)
    moved = replace(scn, legit=step_vehicle(scn.legit, 1.0))
    a2 = attacker_step(moved)
    assert a2.position[0] - a.position[0] == pytest.approx(1.0)
    assert np.hypot(a2.position[0] - moved.legit.position[0],
                    a2.position[1] - moved.legit.position[1]) == pytest.approx(1.0)


def test_select_rsus_near_300(road):
    chosen = select_rsus(road, (300.0, 10.0))
    d = [np.hypot(r.position[0] - 300.0, r.position[1] - 10.0) for r in chosen]
    assert len(chosen) == 3
    assert all(x < 400 for x in d) and d == sorted(d)
    assert {r.position for r in chosen[:2]} == {(300.0, 0.0), (300.0, 20.0)}
    # both edge RSUs are 10 m away; the lower id wins the tie
    assert chosen[0].id < chosen[1].id


def test_select_rsus_insufficient():
    rsus = (Rsu(0, (0.0, 0.0)), Rsu(1, (100.0, 0.0)), Rsu(2, (1000.0, 0.0)))
    v = VehicleState((50.0, 0.0), 1.0)
    scn = Scenario(2000.0, 20.0, rsus, 400.0, v, v, (0.0, 0.0))
    with pytest.raises(InsufficientCoverage):
        select_rsus(scn, (50.0, 0.0))


def test_range_limit_is_strict():
    pos = np.array([[0.0, 0.0], [400.0, 0.0], [0.0, 10.0]])
    _, covered = nearest_rsus(pos, np.array([[0.0, 0.0]]), 3, 400.0)
    assert not covered[0]
    _, covered = nearest_rsus(pos, np.array([[0.0, 0.0]]), 3, 400.0 + 1e-9)
    assert covered[0]


def test_equidistant_tie_goes_to_lower_id():
    rsus = (Rsu(7, (10.0, 0.0)), Rsu(3, (-10.0, 0.0)), Rsu(5, (0.0, 20.0)), Rsu(9, (0.0, -30.0)))
    v = VehicleState((0.0, 0.0), 1.0)
    scn = Scenario(100.0, 100.0, rsus, 400.0, v, v, (0.0, 0.0))
    assert [r.id for r in select_rsus(scn, (0.0, 0.0))] == [3, 7, 5]


def test_duplicate_ids_rejected():
    v = VehicleState((0.0, 0.0), 1.0)
    with pytest.raises(ValueError):
        Scenario(10.0, 10.0, (Rsu(1, (0.0, 0.0)), Rsu(1, (1.0, 0.0))), 400.0, v, v, (0.0, 0.0))


def test_road_trajectory_restarts_at_road_end(road):
    q = road_trajectory(road, 10.0, 1.0, 400)
    assert np.all(q[:, 0] < road.road_length) and np.all(q[:, 0] >= 1.0)
    assert q[0, 0] == 1.0 and q[1, 0] == 11.0
    assert np.all(q[:, 1] == 10.0)
    # the 2999 m span is covered then the vehicle resets
    assert np.any(np.diff(q[:, 0]) < 0)
