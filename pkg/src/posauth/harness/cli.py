"""Command line entry point: ``python -m posauth.harness <command> ...``.

Every command accepts ``--config``, ``--seed`` and ``--out``. On success one
summary line goes to stdout; on failure a single JSON object with the error
goes to stderr and the exit status is nonzero.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..tracker import dataset as ds_mod
from ..tracker.model import save_model
from . import experiments as ex
from .config import ConfigError, ExperimentConfig, dump_config, load_config


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class UsageError(Exception):
    pass


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="posauth", description="Position-based V2I authentication experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "dataset": "simulate the mobility dataset and write dataset.csv",
        "train": "train the tracker and write model.json",
        "sweep": "Pfa/Pmd versus LQ for the position test and the bearing baseline",
        "roc": "detection rate versus false-alarm rate per LQ and speed",
        "bench": "decision tree versus SVR on the mobility dataset",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", type=Path, help="INI-style experiment file")
        s.add_argument("--seed", type=_u64, help="master seed, overrides [run] master_seed")
        s.add_argument("--out", type=Path, help="output directory")
        if name in ("sweep", "roc"):
            s.add_argument("--model", type=Path, help="trained tracker to use as ground truth")
    return p


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config is not None else ExperimentConfig()
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    if args.out is not None:
        cfg = cfg.with_output(args.out)
    if getattr(args, "model", None) is not None:
        cfg = replace(cfg, model=replace(cfg.model, path=str(args.model)))
    return cfg


def _emit(table: ex.ResultTable, out: Path, name: str, columns=None) -> Path:
    path = table.write_csv(out / name, columns)
    ex.write_provenance(table, out)
    return path


def cmd_dataset(cfg, out):
    data = ex.load_dataset(cfg)
    ds_mod.write_csv(data, out / "dataset.csv")
    return f"dataset: {len(data)} rows -> {out / 'dataset.csv'}"


def cmd_train(cfg, out):
    train, test = ex.split(cfg, ex.load_dataset(cfg))
    model = ex.train_model(cfg, train)
    save_model(model, out / "model.json")
    m = ex.evaluate(model, test)
    table = ex.ResultTable("train", ex.BENCH_HEADER,
                           [(model.kind, m.rmse, m.mse, m.mae, m.r2)], ex.provenance(cfg, "train"))
    _emit(table, out, "train_metrics.csv")
    return f"train: {model.kind} on {len(train)} rows, test rmse {m.rmse:.4g} m -> {out / 'model.json'}"


def cmd_sweep(cfg, out):
    t = ex.run_error_sweep(cfg)
    _emit(t, out, "sweep.csv")
    _emit(t, out, "pfa_vs_lq.csv", ("lq_db", "threshold", "speed", "pfa", "pfa_baseline"))
    _emit(t, out, "pmd_vs_lq.csv", ("lq_db", "threshold", "speed", "pmd", "pmd_baseline"))
    pmd = t.column("pmd")
    return (f"sweep: {len(t.rows)} points, pmd {pmd.max():.3g}..{pmd.min():.3g} "
            f"-> {out / 'pfa_vs_lq.csv'}, {out / 'pmd_vs_lq.csv'}")


def cmd_roc(cfg, out):
    t = ex.run_roc(cfg)
    _emit(t, out, "roc.csv")
    n = len({(r[0], r[1]) for r in t.rows})
    return f"roc: {n} curves, {len(t.rows)} rows -> {out / 'roc.csv'}"


def cmd_bench(cfg, out):
    t = ex.run_ml_benchmark(cfg)
    _emit(t, out, "bench.csv")
    parts = ", ".join(f"{r[0]} r2 {r[4]:.4f}" for r in t.rows)
    return f"bench: {parts} -> {out / 'bench.csv'}"


COMMANDS = {"dataset": cmd_dataset, "train": cmd_train, "sweep": cmd_sweep,
            "roc": cmd_roc, "bench": cmd_bench}


def _fail(kind: str, message: str, **extra) -> int:
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)
    return 2 if kind == "usage" else 1


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("usage", str(exc))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        out = cfg.output_path()
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.ini").write_text(dump_config(cfg))
        with np.errstate(all="ignore"):
            print(COMMANDS[args.command](cfg, out))
    except ConfigError as exc:
        return _fail("config", str(exc), flag="--config")
    except Exception as exc:  # every other failure still yields one JSON line
        extra = {}
        for attr in ("iterations", "violation"):
            if hasattr(exc, attr):
                extra[attr] = getattr(exc, attr)
        return _fail(type(exc).__name__, str(exc), **extra)
    return 0


if __name__ == "__main__":
    sys.exit(main())
