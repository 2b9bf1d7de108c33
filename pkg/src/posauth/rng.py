"""Seeded random streams.

Every random draw in the package comes from a ``numpy.random.Generator``
derived from a master seed plus a tuple of integer keys, so a sweep point,
an LQ block or a data split always sees the same numbers regardless of the
order in which work is scheduled.
"""
from __future__ import annotations

import zlib

import numpy as np

# stream purposes; values are part of the reproducibility contract
DATASET = 1
SPLIT = 2
SWEEP = 3
ROC = 4
DEPLOY = 5


def _tag(name: str) -> int:
    return zlib.crc32(name.encode())


def stream(master_seed: int, *keys: int | str) -> np.random.Generator:
    """Independent generator for ``(master_seed, *keys)``.

    String keys are hashed with CRC32 so call sites can use readable names.
    """
    if master_seed < 0 or master_seed >= 2**64:
        raise ValueError("master_seed must be an unsigned 64-bit integer")
    spawn_key = tuple(_tag(k) if isinstance(k, str) else int(k) for k in keys)
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.PCG64(ss))
