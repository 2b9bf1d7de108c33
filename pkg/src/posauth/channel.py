"""Ranging channel: path loss, link quality, Gaussian ToA draws and ranges.

The ToA estimate at an RSU is Gaussian around the true propagation delay
with variance ``kappa * sigma2 * psi / (4 P)``. ``kappa`` is a calibration
factor: ``kappa = 1`` is the bare formula, the ``carrier`` setting divides
by ``(2 pi f)^2`` (and optionally by a processing gain).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C_LIGHT = 3e8


@dataclass(frozen=True)
class LinkQuality:
    lq_db: float

    def __post_init__(self):
        if not np.isfinite(self.lq_db):
            raise ValueError("lq_db must be finite")

    @property
    def linear(self) -> float:
        return 10.0 ** (self.lq_db / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    tx_power: float = 0.1
    carrier_freq: float = 1.8e9
    pathloss_exponent: float = 2.0
    toa_scale: float = 1.0
    rf_speed: float = C_LIGHT

    def __post_init__(self):
        if self.tx_power <= 0:
            raise ValueError("tx_power must be positive")
        if self.carrier_freq <= 0:
            raise ValueError("carrier_freq must be positive")
        if self.toa_scale <= 0:
            raise ValueError("toa_scale must be positive")


def resolve_toa_scale(setting, carrier_freq: float, processing_gain: float = 1.0) -> float:
    """Map a ``toa_scale`` config value to the numeric factor kappa.

    ``"literal"`` -> 1, ``"carrier"`` -> 1 / ((2 pi f)^2 * processing_gain),
    anything else is parsed as a positive float.
    """
    if isinstance(setting, str):
        s = setting.strip().lower()
        if s == "literal":
            return 1.0
        if s == "carrier":
            if processing_gain <= 0:
                raise ValueError("processing_gain must be positive")
            return 1.0 / ((2 * np.pi * carrier_freq) ** 2 * processing_gain)
        setting = float(s)
    value = float(setting)
    if not value > 0:
        raise ValueError(f"toa_scale must be positive, got {setting!r}")
    return value


@dataclass(frozen=True)
class ToaObservation:
    rsu_id: int
    toa: float
    variance: float
    true_toa: float


@dataclass(frozen=True)
class RangeEstimate:
    rsu_id: int
    range: float
    variance: float


def path_loss(distance, params: ChannelParams):
    """Free-space path loss ``(4 pi d f / c)^eta`` (dimensionless, linear)."""
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    psi = (4 * np.pi * d * params.carrier_freq / params.rf_speed) ** params.pathloss_exponent
    return psi if psi.ndim else float(psi)


def noise_power(params: ChannelParams, lq: LinkQuality | float):
    lq_db = lq.lq_db if isinstance(lq, LinkQuality) else lq
    return params.tx_power / 10.0 ** (np.asarray(lq_db, dtype=float) / 10.0)


def toa_variance(params: ChannelParams, sigma2, psi):
    sigma2 = np.asarray(sigma2, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if np.any(sigma2 < 0):
        raise ValueError("noise power must be non-negative")
    if np.any(psi <= 0):
        raise ValueError("path loss must be positive")
    var = params.toa_scale * sigma2 * psi / (4 * params.tx_power)
    return var if var.ndim else float(var)


def ranging_variance(distance, lq_db, params: ChannelParams):
    """Range variance ``c^2 * sigma_t^2`` at a given distance and LQ."""
    var_t = toa_variance(params, noise_power(params, lq_db), path_loss(distance, params))
    return params.rf_speed ** 2 * np.asarray(var_t)


def sample_toa(rng: np.random.Generator, true_distance: float, variance: float,
               params: ChannelParams, rsu_id: int = -1) -> ToaObservation:
    if variance < 0:
        raise ValueError("variance must be non-negative")
    t = true_distance / params.rf_speed
    return ToaObservation(rsu_id, t + np.sqrt(variance) * rng.standard_normal(), variance, t)


def sample_toas(rng: np.random.Generator, true_distances, variances,
                params: ChannelParams) -> np.ndarray:
    """Array version of :func:`sample_toa`; returns the noisy ToAs only."""
    d = np.asarray(true_distances, dtype=float)
    v = np.asarray(variances, dtype=float)
    if np.any(v < 0):
        raise ValueError("variance must be non-negative")
    return d / params.rf_speed + np.sqrt(v) * rng.standard_normal(d.shape)


def estimate_range(obs: ToaObservation, params: ChannelParams) -> RangeEstimate:
    c = params.rf_speed
    return RangeEstimate(obs.rsu_id, c * obs.toa, c * c * obs.variance)
