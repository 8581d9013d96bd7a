"""Reproducible, mutually independent random streams for simulations.

Every trajectory owns three streams, one per purpose: block activation draws,
perturbation draws, and initial-point draws.  Streams are derived from a
counter-based generator keyed by ``(master seed, trajectory id, purpose)``, so
activation randomness never depends on iterate history, distinct purposes
never share bits, and whole experiments replay bit for bit.
"""

from __future__ import annotations

import numpy as np

SWEEP_STREAM = 0
ERROR_STREAM = 1
INIT_STREAM = 2

__all__ = ["stream", "SWEEP_STREAM", "ERROR_STREAM", "INIT_STREAM"]


def stream(master_seed: int, trajectory: int, purpose: int) -> np.random.Generator:
    """Return the generator keyed by ``(master_seed, trajectory, purpose)``."""
    key = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=(int(trajectory), int(purpose))
    )
    return np.random.Generator(np.random.Philox(key))
