import numpy as np
import pytest

from posauth import rng


def test_same_keys_same_stream():
    a = rng.stream(7, rng.SWEEP, 3, 0).standard_normal(5)
    b = rng.stream(7, rng.SWEEP, 3, 0).standard_normal(5)
    assert np.array_equal(a, b)


def test_keys_and_seeds_separate_streams():
    draws = {tuple(rng.stream(s, *k).integers(0, 2**62, 4))
             for s in (0, 1) for k in ((rng.SWEEP, 0, 0), (rng.SWEEP, 1, 0), (rng.ROC, 0, 0), ("x",))}
    assert len(draws) == 8


def test_order_does_not_matter():
    first = [rng.stream(3, rng.DATASET, b).random() for b in range(4)]
    rev = [rng.stream(3, rng.DATASET, b).random() for b in reversed(range(4))]
    assert first == rev[::-1]


def test_seed_range():
    rng.stream(2**64 - 1)
    with pytest.raises(ValueError):
        rng.stream(-1)
    with pytest.raises(ValueError):
        rng.stream(2**64)
