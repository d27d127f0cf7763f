"""BB84 strings and the certified-deletion game.

The game: the challenger samples ``(x, theta)``, hands over ``|x^theta>``, gets
back a string ``y``, then reveals ``theta`` and the Hadamard-position bits of
``x`` and gets a second string ``z``. The adversary wins when ``y`` is right on
every Hadamard position and ``z`` is right on every computational position.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from . import bits as _bits
from .qsim import BB84Qubit, computational_measure, embed, hadamard_measure
from .rng import Rng, trial_rng

__all__ = [
    "BB84String",
    "CDBB84Outcome",
    "CDAdversary",
    "HadamardDeleter",
    "ComputationalHoarder",
    "BlindGuesser",
    "sample_bb84",
    "run_cdbb84",
    "expected_win",
    "mean_win",
    "STRATEGIES",
    "cdbb84_csv",
]


@dataclass(frozen=True)
class BB84String:
    x: int
    theta: int
    n: int

    @property
    def qubits(self) -> list[BB84Qubit]:
        return [BB84Qubit((self.x >> i) & 1, (self.theta >> i) & 1) for i in range(self.n)]

    @property
    def hadamard_positions(self) -> list[int]:
        return [i for i in range(self.n) if (self.theta >> i) & 1]

    @property
    def computational_positions(self) -> list[int]:
        return [i for i in range(self.n) if not (self.theta >> i) & 1]


@dataclass(frozen=True)
class CDBB84Outcome:
    y: int
    z: int
    won: int


def sample_bb84(n: int, rng: Rng, theta_bias: float = 0.5) -> BB84String:
    """Uniform x; theta[i] = 1 with probability ``theta_bias`` (uniform at 1/2)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    x = rng.bits(n)
    if theta_bias == 0.5:
        theta = rng.bits(n)
    else:
        if not 0.0 <= theta_bias <= 1.0:
            raise ValueError("theta_bias must lie in [0, 1]")
        theta = _bits.from_list(int(rng.random() < theta_bias) for _ in range(n))
    return BB84String(x, theta, n)


class CDAdversary:
    """Two-stage adversary. Subclasses override both stages."""

    name = "adversary"

    def stage1(self, registers, rng: Rng):
        """Receive the n qubit registers; return ``(y, state)``."""
        raise NotImplementedError

    def stage2(self, state, theta: int, x_hadamard: dict[int, int], rng: Rng):
        """Receive theta and x on Hadamard positions; return ``z``."""
        raise NotImplementedError


class HadamardDeleter(CDAdversary):
    """Measures every qubit in the Hadamard basis, then guesses z blindly."""

    name = "honest-deleter"

    def stage1(self, registers, rng):
        y = _bits.from_list(hadamard_measure(r, rng).e for r in registers)
        return y, len(registers)

    def stage2(self, state, theta, x_hadamard, rng):
        return rng.bits(state)


class ComputationalHoarder(CDAdversary):
    """Measures in the computational basis, guesses y, reports the readings as z."""

    name = "basis-hoarder"

    def stage1(self, registers, rng):
        seen = _bits.from_list(computational_measure(r, rng)[0][0] for r in registers)
        return rng.bits(len(registers)), seen

    def stage2(self, state, theta, x_hadamard, rng):
        return state


class BlindGuesser(CDAdversary):
    """Ignores the qubits and guesses both strings uniformly."""

    name = "cert-forger"

    def stage1(self, registers, rng):
        return rng.bits(len(registers)), len(registers)

    def stage2(self, state, theta, x_hadamard, rng):
        return rng.bits(state)


STRATEGIES = {cls.name: cls for cls in (HadamardDeleter, ComputationalHoarder, BlindGuesser)}


def _as_bits(v, n, what):
    if isinstance(v, (list, tuple)):
        if len(v) != n:
            raise ValueError(f"{what} has length {len(v)}, expected {n}")
        return _bits.from_list(v)
    v = int(v)
    if v < 0 or v >> n:
        raise ValueError(f"{what} does not fit in {n} bits")
    return v


def run_cdbb84(n: int, adversary: CDAdversary, rng: Rng, *, theta_bias: float = 0.5,
               state: BB84String | None = None) -> CDBB84Outcome:
    """One run of the certified-deletion game. ``state`` forces (x, theta)."""
    chal, adv = rng.spawn(2)
    bb = state if state is not None else sample_bb84(n, chal, theta_bias)
    if bb.n != n:
        raise ValueError("forced state has the wrong length")
    regs = [embed(q, (0, 0), length=0) for q in bb.qubits]
    y, st = adversary.stage1(regs, adv)
    y = _as_bits(y, n, "y")
    z = _as_bits(adversary.stage2(st, bb.theta, {i: (bb.x >> i) & 1 for i in bb.hadamard_positions}, adv), n, "z")
    had = bb.theta
    comp = ((1 << n) - 1) ^ had
    won = int(((y ^ bb.x) & had) == 0 and ((z ^ bb.x) & comp) == 0)
    return CDBB84Outcome(y, z, won)


def expected_win(strategy: str, theta: int, n: int) -> float:
    """Exact win probability of a shipped strategy for a fixed theta."""
    h = (theta & ((1 << n) - 1)).bit_count()
    if strategy == HadamardDeleter.name:
        return 2.0 ** -(n - h)
    if strategy == ComputationalHoarder.name:
        return 2.0 ** -h
    if strategy == BlindGuesser.name:
        return 2.0 ** -n
    raise KeyError(strategy)


def mean_win(strategy: str, n: int, theta_bias: float = 0.5) -> float:
    """Win probability averaged over theta with Pr[theta[i] = 1] = theta_bias."""
    p = theta_bias
    if strategy == HadamardDeleter.name:
        return (p + (1 - p) / 2) ** n
    if strategy == ComputationalHoarder.name:
        return ((1 - p) + p / 2) ** n
    if strategy == BlindGuesser.name:
        return 0.5 ** n
    raise KeyError(strategy)


def cdbb84_csv(ns, strategies, trials: int, seed: int, theta_bias: float = 0.5) -> str:
    """Win counts as CSV with columns n, strategy, trials, wins."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "strategy", "trials", "wins"])
    for si, name in enumerate(strategies):
        adv = STRATEGIES[name]()
        for n in ns:
            wins = sum(run_cdbb84(n, adv, trial_rng(seed, t, stream=1000 * si + n), theta_bias=theta_bias).won
                       for t in range(trials))
            w.writerow([n, name, trials, wins])
    return buf.getvalue()
