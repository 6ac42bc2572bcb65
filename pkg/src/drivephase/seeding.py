"""Deterministic per-point random generators.

Every stochastic draw in the package comes from a Philox counter-based
generator keyed by (master seed, *indices) through a SeedSequence, so any
scan point or RB sequence can be regenerated in isolation, independent of
evaluation order.
"""
from __future__ import annotations

import numpy as np

__all__ = ["derived_rng"]


def derived_rng(*key_parts: int) -> np.random.Generator:
    """Generator for one (seed, index...) tuple."""
    seq = np.random.SeedSequence([int(k) % (2**64) for k in key_parts])
    return np.random.Generator(np.random.Philox(seq))
