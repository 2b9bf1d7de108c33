"""Decision tree versus SVR as next-position predictors.

Simulates a small mobility dataset (a random walk through randomly placed
RSUs, one block per link quality), splits it 0.7/0.3 and scores both
regressors on the held-out rows.

    python demos/tracker_benchmark.py [slots_per_lq]
"""
import sys
import time
from dataclasses import replace

from posauth.harness import experiments as ex
from posauth.harness.config import ExperimentConfig


def main(slots=300):
    base = ExperimentConfig()
    cfg = replace(base, dataset=replace(base.dataset, slots_per_lq=slots))
    t0 = time.perf_counter()
    table = ex.run_ml_benchmark(cfg)
    print(f"{21 * slots} rows, {time.perf_counter() - t0:.1f} s")
    print(f"{'model':14s} {'RMSE':>8s} {'MSE':>8s} {'MAE':>8s} {'R2':>10s}")
    for name, rmse, mse, mae, r2 in table.rows:
        print(f"{name:14s} {rmse:8.4f} {mse:8.4f} {mae:8.4f} {r2:10.6f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 300)
