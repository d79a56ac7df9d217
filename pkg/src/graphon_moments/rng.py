"""Deterministic random streams.

All randomness in the package flows through Philox4x64-10 counter-based
generators keyed by an integer seed plus an optional tuple of integer
stream labels.  The key derivation is numpy's SeedSequence applied to the
entropy tuple ``(seed, *labels)``, which is documented and stable across
numpy releases, so identical inputs reproduce identical streams on any
platform.
"""

from __future__ import annotations

import numpy as np


def philox_stream(seed: int, *labels: int) -> np.random.Generator:
    """Return a Philox generator for the stream named by (seed, *labels)."""
    ss = np.random.SeedSequence((int(seed),) + tuple(int(x) for x in labels))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *labels: int) -> int:
    """Derive a plain integer sub-seed, e.g. for per-graph sampling tasks."""
    ss = np.random.SeedSequence((int(seed),) + tuple(int(x) for x in labels))
    return int(ss.generate_state(1, np.uint64)[0])
