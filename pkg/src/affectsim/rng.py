"""Seed-derived random streams.

Every consumer of randomness gets its own ``numpy.random.Generator`` built
from ``SeedSequence([seed, tag, *extra])``. Streams never share state, so the
order in which subsystems are initialised cannot change any result.
"""

from __future__ import annotations

import numpy as np

GRAPH = 0
WEIGHTS = 1
INIT_ETV = 2
NODE_CODES = 3
INFO_CODES = 4
SEEDING = 5
ROUND = 6
VOTE = 7
SWEEP = 8


def stream(seed: int, tag: int, *extra: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), tag, *map(int, extra)]))


def round_stream(seed: int, t_global: int) -> np.random.Generator:
    return stream(seed, ROUND, t_global)


def derive_seed(master: int, index: int) -> int:
    """64-bit child seed for run ``index`` of a sweep rooted at ``master``."""
    ss = np.random.SeedSequence([int(master), SWEEP, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
