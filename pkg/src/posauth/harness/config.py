"""Experiment configuration read from an INI-style file.

Every key has a default, so an empty file (or no file) runs the road
experiments with the Monte Carlo parameters of the reference setup.
``dump_config`` writes all values back out, defaults included.
"""
from __future__ import annotations

import configparser
import hashlib
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from ..channel import C_LIGHT, ChannelParams, resolve_toa_scale
from ..scenario import ScenarioConfig
from ..tracker.dataset import GenConfig
from ..tracker.model import SvrParams, TreeParams

OUTPUT_ENV = "POSAUTH_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelSection:
    tx_power: float = 0.1
    carrier_freq: float = 1.8e9
    pathloss_exponent: float = 2.0
    toa_scale: str = "carrier"
    # extra divisor on the carrier-based kappa; see README for the calibration
    processing_gain: float = 1e6
    rf_speed: float = C_LIGHT

    def params(self) -> ChannelParams:
        kappa = resolve_toa_scale(self.toa_scale, self.carrier_freq, self.processing_gain)
        return ChannelParams(self.tx_power, self.carrier_freq, self.pathloss_exponent, kappa,
                             self.rf_speed)


@dataclass(frozen=True)
class SweepSection:
    lq_db: tuple[float, ...] = tuple(float(v) for v in range(21))
    thresholds: tuple[float, ...] = (0.5,)
    speeds: tuple[float, ...] = (1.0,)
    trials: int = 10000
    slot_duration: float = 0.1
    # baseline threshold is set per LQ so that its false-alarm rate is this value
    aoa_pfa: float = 0.05
    roc_lq_db: tuple[float, ...] = (0.0, 10.0, 20.0)
    roc_speeds: tuple[float, ...] = (1.0, 3.0, 10.0)
    roc_points: int = 200
    max_coverage_loss: float = 0.10


@dataclass(frozen=True)
class DatasetSection:
    region_size: float = 5000.0
    n_rsus: int = 100
    lq_db: tuple[float, ...] = tuple(float(v) for v in range(21))
    slots_per_lq: int = 15000
    speed_min: float = 0.0
    speed_max: float = 33.0
    slot_duration: float = 0.1
    rsu_range_limit: float = 400.0
    heading_mode: str = "slot"
    split_ratio: float = 0.7
    path: str = ""


@dataclass(frozen=True)
class ModelSection:
    tracker: str = "svr"
    # rows per LQ for the dataset a sweep trains its own tracker on
    train_slots_per_lq: int = 500
    path: str = ""
    max_depth: int = 20
    min_leaf: int = 5
    C: float = 1.0
    epsilon: float = 0.1
    kernel: str = "linear"
    gamma: float = 0.0
    tol: float = 1e-3
    max_iter: int = 20_000_000
    target: str = "displacement"

    def tree_params(self) -> TreeParams:
        return TreeParams(self.max_depth, self.min_leaf, self.target)

    def svr_params(self) -> SvrParams:
        return SvrParams(self.C, self.epsilon, self.kernel, self.gamma or None, self.tol,
                         self.max_iter, self.target)


@dataclass(frozen=True)
class RunSection:
    master_seed: int = 7
    output_dir: str = ""


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioConfig = ScenarioConfig()
    channel: ChannelSection = ChannelSection()
    sweep: SweepSection = SweepSection()
    dataset: DatasetSection = DatasetSection()
    model: ModelSection = ModelSection()
    run: RunSection = RunSection()

    def __post_init__(self):
        s = self.sweep
        if s.trials < 1:
            raise ConfigError("sweep.trials must be at least 1")
        for name in ("lq_db", "thresholds", "speeds", "roc_lq_db", "roc_speeds"):
            if len(getattr(s, name)) == 0:
                raise ConfigError(f"sweep.{name} must be non-empty")
        if any(t < 0 for t in s.thresholds):
            raise ConfigError("sweep.thresholds must be non-negative")
        if s.roc_points < 2 or s.slot_duration <= 0 or not 0 < s.aoa_pfa < 1:
            raise ConfigError("invalid sweep.roc_points, slot_duration or aoa_pfa")
        if self.model.tracker not in ("svr", "decision-tree"):
            raise ConfigError(f"model.tracker must be svr or decision-tree, got {self.model.tracker!r}")
        if not 0 <= self.run.master_seed < 2**64:
            raise ConfigError("run.master_seed must be an unsigned 64-bit integer")
        try:
            self.channel.params()
            self.gen_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def seed(self) -> int:
        return self.run.master_seed

    def channel_params(self) -> ChannelParams:
        return self.channel.params()

    def gen_config(self, slots_per_lq: int | None = None) -> GenConfig:
        d = self.dataset
        return GenConfig(d.region_size, d.n_rsus, tuple(d.lq_db),
                         slots_per_lq or d.slots_per_lq, d.speed_min, d.speed_max,
                         d.slot_duration, d.rsu_range_limit, self.channel_params(), d.heading_mode)

    def output_path(self) -> Path:
        return Path(self.run.output_dir or os.environ.get(OUTPUT_ENV, "") or "results")

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, run=replace(self.run, master_seed=int(seed)))

    def with_output(self, out) -> "ExperimentConfig":
        return replace(self, run=replace(self.run, output_dir=str(out)))

    def digest(self) -> str:
        return hashlib.sha256(dump_config(self).encode()).hexdigest()[:16]


SECTIONS = {"scenario": ScenarioConfig, "channel": ChannelSection, "sweep": SweepSection,
            "dataset": DatasetSection, "model": ModelSection, "run": RunSection}


def _format(v) -> str:
    if isinstance(v, (tuple, list)):
        return ", ".join(_format(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(raw: str, default, where: str):
    try:
        if isinstance(default, tuple):
            parts = [p.strip() for p in raw.split(",") if p.strip()]
            return tuple(float(p) for p in parts)
        if isinstance(default, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(float(raw)) if "e" in raw.lower() else int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r}") from exc


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    unknown = set(cp.sections()) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    parts = {}
    for name, cls in SECTIONS.items():
        base = cls()
        known = {f.name for f in fields(cls)}
        kw = {}
        if cp.has_section(name):
            for key, raw in cp.items(name):
                if key not in known:
                    raise ConfigError(f"unknown key {name}.{key}")
                kw[key] = _parse(raw, getattr(base, key), f"{name}.{key}")
        try:
            parts[name] = cls(**{**asdict(base), **kw})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{name}]: {exc}") from exc
    return ExperimentConfig(**parts)


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from exc
    return parse_config(text)


def dump_config(cfg: ExperimentConfig) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    for name in SECTIONS:
        cp[name] = {k: _format(v) for k, v in asdict(getattr(cfg, name)).items()}
    lines = []
    for name in SECTIONS:
        lines.append(f"[{name}]")
        lines += [f"{k} = {v}" for k, v in cp[name].items()]
        lines.append("")
    return "\n".join(lines)
