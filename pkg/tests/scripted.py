"""Exhaustive enumeration of a randomized routine's coin flips.

:class:`ScriptedRng` answers ``bit``/``bits``/``below`` from a script;
:func:`enumerate_runs` replays the routine over every script (depth-first),
giving the exact output distribution as :class:`~fractions.Fraction` weights.
"""
from __future__ import annotations

from fractions import Fraction


class ScriptedRng:
    def __init__(self, script):
        self.script = list(script)
        self.pos = 0
        self.arity = []  # branching factor of each draw

    def _draw(self, k: int) -> int:
        if self.pos < len(self.script):
            v = self.script[self.pos]
        else:
            v = 0
            self.script.append(0)
        if len(self.arity) <= self.pos:
            self.arity.append(k)
        self.pos += 1
        return v

    def bit(self) -> int:
        return self._draw(2)

    def bits(self, k: int) -> int:
        return self._draw(1 << k) if k else 0

    def below(self, n: int) -> int:
        return self._draw(n)

    def spawn(self, n: int):
        return [self] * n

    def child(self):
        return self

    @property
    def np(self):  # pragma: no cover - guard
        raise AssertionError("array draws cannot be enumerated")


def enumerate_runs(fn) -> dict:
    """Map each output of ``fn(rng)`` to its exact probability."""
    dist = {}
    script = []
    while True:
        rng = ScriptedRng(script)
        out = fn(rng)
        used = rng.script[: rng.pos]
        arity = rng.arity[: rng.pos]
        w = Fraction(1)
        for a in arity:
            w /= a
        dist[out] = dist.get(out, 0) + w
        # odometer increment from the last draw
        i = len(used) - 1
        while i >= 0 and used[i] + 1 >= arity[i]:
            i -= 1
        if i < 0:
            break
        script = used[:i] + [used[i] + 1]
    return dist
