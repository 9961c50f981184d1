"""Keyed, splittable random streams (Philox under numpy SeedSequence spawning).

Every stochastic component draws from a stream addressed by a (seed, path)
tuple, so simulation of one realization can parallelize over clusters and
replicate runs stay reproducible regardless of execution order.
"""

from __future__ import annotations

import numpy as np

# Stream tags; keep stable, they are part of the reproducibility contract.
PARENTS = 0
CLUSTER = 1
CHAIN = 2
INIT = 3

__all__ = ["stream", "child_seed", "PARENTS", "CLUSTER", "CHAIN", "INIT"]


def stream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream addressed by (seed, *path)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *path: int) -> int:
    """Derive a child integer seed (e.g. per experiment replicate)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])
