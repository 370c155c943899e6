"""Seeded random streams.

Every stochastic entry point takes ``seed`` which may be ``None``, an int, a
``numpy.random.SeedSequence`` or an already constructed ``Generator``.
Per-trial streams are derived from ``(master_seed, *indices)`` through the
SeedSequence spawn key, so results never depend on how trials are scheduled.
"""
from __future__ import annotations

from typing import Union

import numpy as np

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.default_rng(seed)


def stream(master_seed: int, *indices: int) -> np.random.Generator:
    """Independent generator for the trial identified by ``indices``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(i) for i in indices))
    return np.random.Generator(np.random.PCG64(ss))
