"""Exact two-branch simulator for BB84-controlled key legs.

A key leg is a control qubit followed by an ``L``-bit payload register. Every
state the leasing schemes produce is either a single basis state
(:class:`Collapsed`) or an equal-weight superposition of two basis states with
the control qubit equal to the branch index and a relative sign
(:class:`Superposed`)::

    Collapsed(b, p)        = |b>|p>
    Superposed(p0, p1, x)  = (|0>|p0> + (-1)^x |1>|p1>) / sqrt(2)

Global phase is dropped. Payloads are ints in ``[0, 2**L)`` (see :mod:`skl.bits`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import bits as _bits
from .encoding import DecodeError, dec_int, enc_int, pack, unpack
from .rng import Rng

__all__ = [
    "BB84Qubit",
    "BranchedRegister",
    "Collapsed",
    "Superposed",
    "HadamardOutcome",
    "LegArray",
    "KeyConsumedError",
    "embed",
    "oracle_measure",
    "hadamard_measure",
    "computational_measure",
    "register_from_bytes",
]


@dataclass(frozen=True)
class BB84Qubit:
    """|x> if theta == 0, H|x> if theta == 1."""

    x_bit: int
    theta_bit: int

    def __post_init__(self):
        if self.x_bit not in (0, 1) or self.theta_bit not in (0, 1):
            raise ValueError("BB84 qubit fields must be bits")


class BranchedRegister:
    """Base class for the two register variants."""

    length: int

    def to_bytes(self) -> bytes:  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True)
class Collapsed(BranchedRegister):
    bit: int
    payload: int
    length: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError("control bit must be 0 or 1")
        _bits.check_len(self.payload, self.length, "payload")

    def to_bytes(self) -> bytes:
        return pack("collapsed", [enc_int(self.length), bytes([self.bit]), enc_int(self.payload)])


@dataclass(frozen=True)
class Superposed(BranchedRegister):
    payload0: int
    payload1: int
    phase: int
    length: int

    def __post_init__(self):
        if self.phase not in (0, 1):
            raise ValueError("phase must be 0 or 1")
        _bits.check_len(self.payload0, self.length, "payload0")
        _bits.check_len(self.payload1, self.length, "payload1")

    def payload(self, b: int) -> int:
        return self.payload1 if b else self.payload0

    def to_bytes(self) -> bytes:
        return pack(
            "superposed",
            [enc_int(self.length), bytes([self.phase]), enc_int(self.payload0), enc_int(self.payload1)],
        )


def register_from_bytes(data: bytes) -> BranchedRegister:
    name, f = unpack(data)
    if name == "collapsed" and len(f) == 3:
        return Collapsed(f[1][0], dec_int(f[2]), dec_int(f[0]))
    if name == "superposed" and len(f) == 4:
        return Superposed(dec_int(f[2]), dec_int(f[3]), f[1][0], dec_int(f[0]))
    raise DecodeError("not a register encoding")


@dataclass(frozen=True)
class HadamardOutcome:
    """Result of measuring control and payload in the Hadamard basis."""

    e: int
    d: int
    length: int

    def to_bytes(self) -> bytes:
        return pack("hadamard_outcome", [enc_int(self.length), bytes([self.e]), enc_int(self.d)])

    @classmethod
    def from_bytes(cls, data: bytes) -> "HadamardOutcome":
        _, f = unpack(data, "hadamard_outcome")
        if len(f) != 3:
            raise DecodeError("bad outcome encoding")
        return cls(f[1][0], dec_int(f[2]), dec_int(f[0]))


def _as_payload(v, length):
    if isinstance(v, str):
        if set(v) - {"0", "1"}:
            raise ValueError("payload strings use only 0 and 1")
        return _bits.from_list(int(c) for c in v), len(v)
    return int(v), length


def embed(qubit: BB84Qubit, payload_of, rng: Rng | None = None, *, length: int | None = None) -> BranchedRegister:
    """Attach payloads behind a BB84 qubit: |b>|0> -> |b>|payload_of(b)>.

    ``payload_of`` is a callable or a pair. Payloads may be bit strings such as
    ``"01"`` (character i is position i) or ints together with ``length``.
    """
    get = payload_of if callable(payload_of) else (lambda b: payload_of[b])
    p0, l0 = _as_payload(get(0), length)
    p1, l1 = _as_payload(get(1), length)
    if l0 is None or l1 is None:
        raise ValueError("integer payloads need an explicit length")
    if l0 != l1:
        raise ValueError(f"payload length mismatch: {l0} != {l1}")
    if qubit.theta_bit == 0:
        p = p1 if qubit.x_bit else p0
        return Collapsed(qubit.x_bit, p, l0)
    return Superposed(p0, p1, qubit.x_bit, l0)


def oracle_measure(reg: BranchedRegister, f: Callable[[int, int], object], rng: Rng):
    """Compute f(control, payload) into a fresh register and measure it.

    Returns ``(outcome, reg')``. Branches with equal outputs are left exactly
    as they were; differing outputs collapse onto a uniformly chosen branch.
    """
    if isinstance(reg, Collapsed):
        return f(reg.bit, reg.payload), reg
    v0 = f(0, reg.payload0)
    v1 = f(1, reg.payload1)
    if v0 == v1:
        return v0, reg
    b = rng.bit()
    return (v1 if b else v0), Collapsed(b, reg.payload(b), reg.length)


def hadamard_measure(reg: BranchedRegister, rng: Rng) -> HadamardOutcome:
    """Measure all 1 + L qubits in the Hadamard basis.

    For a superposition the outcome satisfies e = x XOR d.(p0 XOR p1) with d
    uniform; a basis state gives uniform (e, d).
    """
    L = reg.length
    if isinstance(reg, Collapsed):
        return HadamardOutcome(rng.bit(), rng.bits(L), L)
    d = rng.bits(L)
    e = reg.phase ^ _bits.dot(d, reg.payload0 ^ reg.payload1)
    return HadamardOutcome(e, d, L)


def computational_measure(reg: BranchedRegister, rng: Rng):
    """Read control and payload. Returns ``((b, payload), reg')``."""
    if isinstance(reg, Collapsed):
        return (reg.bit, reg.payload), reg
    b = rng.bit()
    p = reg.payload(b)
    return (b, p), Collapsed(b, p, reg.length)


class KeyConsumedError(RuntimeError):
    """The leased key was already deleted."""


class LegArray:
    """Mutable holder for the n legs of one leased key.

    Decryption, evaluation and signing update legs in place; deletion consumes
    the whole array. Callers must not use one instance concurrently.
    """

    def __init__(self, legs):
        self.legs = list(legs)
        self.size = len(self.legs)
        self.consumed = False

    def __len__(self):
        return self.size

    def _live(self):
        if self.consumed:
            raise KeyConsumedError("key legs were measured for deletion")

    def oracle(self, i: int, f, rng: Rng):
        self._live()
        out, self.legs[i] = oracle_measure(self.legs[i], f, rng)
        return out

    def read(self, i: int, rng: Rng):
        self._live()
        out, self.legs[i] = computational_measure(self.legs[i], rng)
        return out

    def delete(self, rng: Rng) -> list[HadamardOutcome]:
        self._live()
        outs = [hadamard_measure(r, rng) for r in self.legs]
        self.consumed = True
        self.legs = []
        return outs

    def snapshot(self) -> bytes:
        """Canonical bytes of the current legs, for exact before/after checks."""
        self._live()
        return b"".join(r.to_bytes() for r in self.legs)
