"""Reproducible random streams derived from a master seed.

Generation for a master seed and the simulation of each run draw from
separate child streams, so running simulations in parallel (or in a
different order) cannot change any outcome.
"""

from __future__ import annotations

import numpy as np

_GENERATION = 0
_SIMULATION = 1


def generation_stream(master_seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(master_seed, spawn_key=(_GENERATION,))))


def run_stream(master_seed: int, run_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(master_seed, spawn_key=(_SIMULATION, run_index))))
