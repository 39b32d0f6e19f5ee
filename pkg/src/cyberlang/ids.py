"""Identifier generation; the seeded variant is the only randomness in a simulation."""

from __future__ import annotations

import random
import uuid


def new_uuid() -> str:
    return str(uuid.uuid4())


class IdGenerator:
    """Deterministic UUID4-format ids from a seed.

    Instances are callable so they can be passed wherever an id source is
    expected (``parse(src, ids=IdGenerator(7))``).
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._rng = random.Random(seed)

    def __call__(self) -> str:
        return str(uuid.UUID(int=self._rng.getrandbits(128), version=4))
