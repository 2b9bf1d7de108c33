"""One authentication slot on the default road, step by step.

The legitimate vehicle is localized from three ToA ranges, the tracker
predicts where it should be one slot later, and both the legitimate
transmission and a spoofed one from 1 m behind are scored against that
prediction.

    python demos/one_slot.py [lq_db]
"""
import sys
from dataclasses import replace

import numpy as np

from posauth import authenticator as au
from posauth import rng
from posauth.channel import estimate_range, ranging_variance, sample_toa
from posauth.harness import experiments as ex
from posauth.harness.config import ExperimentConfig
from posauth.localizer import build_system, solve_ls
from posauth.scenario import attacker_step, build_road_scenario, select_rsus, step_vehicle


def localize(scn, tx, lq_db, ch, g):
    rsus = select_rsus(scn, tx)
    obs = []
    for r in rsus:
        d = float(np.hypot(tx[0] - r.position[0], tx[1] - r.position[1]))
        var_t = ranging_variance(d, lq_db, ch) / ch.rf_speed ** 2
        obs.append(sample_toa(g, d, float(var_t), ch, r.id))
    est = solve_ls(build_system(rsus, [estimate_range(o, ch) for o in obs]))
    return rsus, obs, est


def main(lq_db=10.0):
    cfg = ExperimentConfig()
    ch = cfg.channel_params()
    g = rng.stream(cfg.seed, "demo")
    scn = build_road_scenario(cfg.scenario)
    dt = cfg.sweep.slot_duration

    print("training the tracker (a few seconds on first use)...")
    model = ex.tracker_for(cfg)

    # slots s-1 and s: the legitimate vehicle transmits; the ToA change
    # between them is part of the tracker input
    lg = scn.legit
    for _ in range(500):
        lg = step_vehicle(lg, dt)
    _, obs, _ = localize(scn, lg.position, lq_db, ch, g)
    before = np.array([o.toa for o in obs])
    lg = step_vehicle(lg, dt)
    _, obs, est = localize(scn, lg.position, lq_db, ch, g)
    toas = np.array([o.toa for o in obs])
    feats = np.concatenate([[lq_db], toas, toas - before, est.position])
    predicted = model.predict(feats)
    print(f"slot s   true {np.round(lg.position, 3)}  estimate {np.round(est.position, 3)}")

    # slot s+1: legitimate and spoofed transmissions
    lg = step_vehicle(lg, dt)
    atk = attacker_step(replace(scn, legit=lg))
    _, _, est_l = localize(scn, lg.position, lq_db, ch, g)
    _, _, est_a = localize(scn, atk.position, lq_db, ch, g)
    print(f"slot s+1 predicted {np.round(predicted, 3)}")

    eps = cfg.sweep.thresholds[0]
    for who, e in (("legit", est_l), ("attacker", est_a)):
        ts = au.test_statistic(e.position, predicted)
        print(f"  {who:8s} estimate {np.round(e.position, 3)}  TS {ts:.3f} m  -> {au.decide(ts, eps)}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 10.0)
