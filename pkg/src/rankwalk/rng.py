"""Named random sub-streams so every consumer derives from one run seed
without perturbing the others."""

from __future__ import annotations

import random


def substream(seed: int, name: str) -> random.Random:
    """Deterministic, platform-independent RNG keyed by (seed, name).

    str seeding hashes the bytes (SHA-512 under the hood), so adding a new
    named consumer never shifts the draws of existing ones.
    """
    return random.Random(f"{seed}/{name}")
