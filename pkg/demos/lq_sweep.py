"""False-alarm and missed-detection rates versus link quality.

Runs the default road experiment at reduced trial count and prints the
position test next to the bearing baseline, then the detection rate of
the position test at a few false-alarm rates for the weakest and the
strongest link.

    python demos/lq_sweep.py [trials]
"""
import sys
from dataclasses import replace

import numpy as np

from posauth import authenticator as au
from posauth.harness import experiments as ex
from posauth.harness.config import ExperimentConfig


def main(trials=2000):
    base = ExperimentConfig()
    cfg = replace(base, sweep=replace(base.sweep, trials=trials, roc_speeds=(1.0,), roc_lq_db=(0.0, 20.0)))
    sweep = ex.run_error_sweep(cfg)
    print(f"threshold {cfg.sweep.thresholds[0]} m, speed {cfg.sweep.speeds[0]} m/s, {trials} trials per point")
    print(" LQ dB    Pfa     Pmd    Pfa AoA  Pmd AoA")
    for lq, _, _, pfa, pmd, bfa, bmd in sweep.rows:
        print(f"{lq:6.0f} {pfa:7.4f} {pmd:7.4f} {bfa:8.4f} {bmd:8.4f}")

    roc = ex.run_roc(cfg)
    grid = [0.01, 0.05, 0.1, 0.2]
    print("\nPd at Pfa " + "  ".join(f"{p:5.2f}" for p in grid))
    for lq in cfg.sweep.roc_lq_db:
        c = roc.select(lq_db=lq)
        pts = [au.RocPoint(*r[2:]) for r in c.rows]
        pd = au.pd_at_pfa(pts, grid)
        print(f"LQ {lq:4.0f} dB " + "  ".join(f"{v:5.3f}" for v in np.atleast_1d(pd)))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 2000)
