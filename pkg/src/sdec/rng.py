"""Deterministic seeding helpers.

Every random quantity in the toolkit derives from a run seed plus a fixed
tuple of stage indices, so any trial of any sweep can be reproduced in
isolation without replaying shared generator state.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .errors import ValidationError

SeedLike = Union[int, Sequence[int]]


def seed_key(seed: SeedLike) -> tuple[int, ...]:
    """Normalize ``seed`` to a tuple of nonnegative ints usable as entropy."""
    if isinstance(seed, (int, np.integer)):
        key = (int(seed),)
    else:
        try:
            key = tuple(int(x) for x in seed)
        except TypeError:
            raise ValidationError(f"seed must be an int or a sequence of ints, got {seed!r}")
    if any(x < 0 for x in key):
        raise ValidationError(f"seed material must be nonnegative, got {key}")
    return key


def rng_for(seed: SeedLike, *stages: int) -> np.random.Generator:
    """Generator keyed by ``seed`` plus a stage path (trial index, purpose, ...)."""
    entropy = list(seed_key(seed)) + [int(s) for s in stages]
    return np.random.default_rng(np.random.SeedSequence(entropy))
