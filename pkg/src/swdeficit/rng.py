"""Counter-based splittable random streams.

Every stochastic routine in the package draws from a Philox generator keyed
by ``(master_seed, task_index)``.  Philox is counter-based, so streams for
distinct task indices are statistically independent and reproducible no
matter in which order (or on how many threads) they are consumed.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "substreams"]


def stream(seed: int, task: int = 0) -> np.random.Generator:
    """Return the generator for task ``task`` of master seed ``seed``.

    Two calls with the same ``(seed, task)`` produce bit-identical output.
    """
    if seed is None:
        raise ValueError("an explicit seed is required for reproducibility")
    ss = np.random.SeedSequence([int(seed), int(task)])
    return np.random.Generator(np.random.Philox(ss))


def substreams(seed: int, n: int, base_task: int = 0) -> list[np.random.Generator]:
    """Independent generators for ``n`` parallel tasks under one master seed."""
    return [stream(seed, base_task + i) for i in range(n)]
