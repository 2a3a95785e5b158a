"""Counter-based random streams: reproducible regardless of evaluation order.

Every randomized operation takes an explicit integer seed.  Sub-streams are
keyed by (seed, *indices) through Philox, so per-sample draws are identical
no matter how samples are chunked across workers.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *indices: int) -> np.random.Generator:
    """Independent generator for the given seed and index path."""
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1),
                                spawn_key=tuple(int(i) for i in indices))
    return np.random.Generator(np.random.Philox(ss))


def split(seed: int, n: int, *prefix: int):
    """n per-item generators derived from one seed."""
    return [stream(seed, *prefix, i) for i in range(n)]
