"""Seeded, splittable randomness.

Every randomized routine takes an :class:`Rng` explicitly. Bit-level draws come
from a :class:`random.Random` stream and array draws from a
:class:`numpy.random.Generator`; both are seeded from one
:class:`numpy.random.SeedSequence`, so a seed fixes everything.
"""
from __future__ import annotations

import random

import numpy as np

__all__ = ["Rng", "as_rng", "trial_rng"]


class Rng:
    """Deterministic random source with independent child streams."""

    __slots__ = ("seedseq", "_np", "_py")

    def __init__(self, seed: int | np.random.SeedSequence | None = 0):
        if isinstance(seed, np.random.SeedSequence):
            ss = seed
        else:
            if seed is None:
                raise ValueError("a seed is required; ambient randomness is not used")
            ss = np.random.SeedSequence(int(seed))
        self.seedseq = ss
        self._np = None
        words = ss.generate_state(8, dtype=np.uint32)
        self._py = random.Random(int.from_bytes(words.tobytes(), "little"))

    @property
    def np(self) -> np.random.Generator:
        """numpy Generator for array draws (created on first use)."""
        if self._np is None:
            self._np = np.random.Generator(np.random.PCG64(self.seedseq))
        return self._np

    def bits(self, k: int) -> int:
        """Uniform k-bit integer (bit i is position i of the string)."""
        if k < 0:
            raise ValueError("negative bit count")
        return self._py.getrandbits(k) if k else 0

    def bit(self) -> int:
        return self._py.getrandbits(1)

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return self._py.random()

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return self._py.randrange(n)

    def spawn(self, n: int) -> list["Rng"]:
        return [Rng(s) for s in self.seedseq.spawn(n)]

    def child(self) -> "Rng":
        return self.spawn(1)[0]


def as_rng(x) -> Rng:
    """Accept an :class:`Rng` or an integer seed."""
    if isinstance(x, Rng):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return Rng(int(x))
    raise TypeError(f"expected Rng or int seed, got {type(x).__name__}")


def trial_rng(seed: int, index: int, stream: int = 0) -> Rng:
    """Stream for trial ``index`` of a seeded run, independent of scheduling."""
    return Rng(np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(index))))
