import numpy as np
import pytest
from hypothesis import given, strategies as st

from posauth import rng
from posauth.channel import (C_LIGHT, ChannelParams, LinkQuality, ToaObservation, estimate_range,
                             noise_power, path_loss, ranging_variance, resolve_toa_scale, sample_toa,
                             sample_toas, toa_variance)

F = 1.8e9
CARRIER = ChannelParams(toa_scale=1.0 / (2 * np.pi * F) ** 2)


def test_path_loss_examples():
    p = ChannelParams()
    assert path_loss(C_LIGHT / (4 * np.pi * F), p) == pytest.approx(1.0)
    assert path_loss(100.0, p) == pytest.approx((4 * np.pi * 600) ** 2)
    assert path_loss(100.0, p) == pytest.approx(5.685e7, rel=1e-3)
    with pytest.raises(ValueError):
        path_loss(0.0, p)


@given(st.floats(1e-3, 1e5))
def test_path_loss_quadruples_with_distance(d):
    p = ChannelParams()
    assert path_loss(2 * d, p) == pytest.approx(4 * path_loss(d, p), rel=1e-12)


def test_noise_power():
    p = ChannelParams()
    assert noise_power(p, LinkQuality(0.0)) == pytest.approx(0.1)
    assert noise_power(p, 20.0) == pytest.approx(1e-3)
    assert noise_power(p, 10.0) == pytest.approx(1e-2)
    lq = np.arange(0, 21)
    assert np.all(np.diff(noise_power(p, lq)) < 0)


def test_toa_variance_literal_formula():
    p = ChannelParams(toa_scale=1.0)
    assert toa_variance(p, p.tx_power, 4.0) == pytest.approx(1.0)
    assert toa_variance(p, 0.0, 4.0) == 0.0


def test_carrier_kappa_gives_range_sigma_equal_to_distance_at_0db():
    var_t = toa_variance(CARRIER, noise_power(CARRIER, 0.0), path_loss(100.0, CARRIER))
    assert np.sqrt(var_t) == pytest.approx(3.33e-7, rel=1e-2)
    assert np.sqrt(ranging_variance(100.0, 0.0, CARRIER)) == pytest.approx(100.0)


def test_resolve_toa_scale():
    assert resolve_toa_scale("literal", F) == 1.0
    assert resolve_toa_scale("carrier", F) == pytest.approx(1 / (2 * np.pi * F) ** 2)
    assert resolve_toa_scale("carrier", F, 100.0) == pytest.approx(1 / (2 * np.pi * F) ** 2 / 100)
    assert resolve_toa_scale("2.5e-3", F) == 2.5e-3
    with pytest.raises(ValueError):
        resolve_toa_scale("-1", F)


def test_variance_monotone_in_distance():
    d = np.linspace(1, 400, 50)
    v = ranging_variance(d, 10.0, CARRIER)
    assert np.all(np.diff(v) > 0)


def test_sample_toa_zero_variance():
    obs = sample_toa(rng.stream(1), 300.0, 0.0, ChannelParams())
    assert obs.toa == pytest.approx(1e-6, rel=1e-15)
    assert obs.true_toa == obs.toa


def test_sample_toa_moments():
    v = 1e-16
    g = rng.stream(3, "moments")
    t = sample_toas(g, np.full(100_000, 300.0), np.full(100_000, v), ChannelParams())
    assert abs(t.mean() - 1e-6) <= 4 * np.sqrt(v / 1e5)
    assert t.var() == pytest.approx(v, rel=0.05)


def test_equal_seeds_equal_draws():
    a = sample_toa(rng.stream(11, 2), 100.0, 1e-16, ChannelParams())
    b = sample_toa(rng.stream(11, 2), 100.0, 1e-16, ChannelParams())
    assert a == b


def test_estimate_range():
    p = ChannelParams()
    r = estimate_range(ToaObservation(4, 1e-6, 1e-16, 1e-6), p)
    assert r.range == pytest.approx(300.0)
    assert r.variance == pytest.approx(9.0)
    assert estimate_range(ToaObservation(4, 0.0, 0.0, 0.0), p).range == 0.0


def test_empirical_range_variance_matches_formula():
    g = rng.stream(5, "range-var")
    for lq, d in ((0.0, 50.0), (10.0, 200.0)):
        var_t = ranging_variance(d, lq, CARRIER) / C_LIGHT ** 2
        r = C_LIGHT * sample_toas(g, np.full(200_000, d), np.full(200_000, var_t), CARRIER)
        assert r.var() == pytest.approx(ranging_variance(d, lq, CARRIER), rel=0.05)


def test_params_validation():
    with pytest.raises(ValueError):
        ChannelParams(tx_power=0.0)
    with pytest.raises(ValueError):
        ChannelParams(carrier_freq=-1.0)
    with pytest.raises(ValueError):
        LinkQuality(float("nan"))
    assert LinkQuality(20.0).linear == pytest.approx(100.0)
