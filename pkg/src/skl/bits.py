"""Bitstrings as Python integers.

A bitstring of length ``L`` is an ``int`` in ``[0, 2**L)`` whose bit ``i``
(value ``2**i``) is position ``i``. Concatenation ``a || b`` puts ``a`` in the
low positions.
"""
from __future__ import annotations

import numpy as np

__all__ = ["dot", "parity", "concat", "split", "from_list", "to_list", "check_len", "to_array", "from_array"]


def parity(x: int) -> int:
    return x.bit_count() & 1


def dot(x: int, y: int) -> int:
    """Inner product mod 2: XOR over i of x[i] AND y[i]."""
    return (x & y).bit_count() & 1


def concat(a: int, b: int, len_a: int) -> int:
    return a | (b << len_a)


def split(x: int, len_a: int) -> tuple[int, int]:
    return x & ((1 << len_a) - 1), x >> len_a


def check_len(x: int, L: int, what: str = "bitstring") -> int:
    if not isinstance(x, int) or x < 0 or x >> L:
        raise ValueError(f"{what} does not fit in {L} bits")
    return x


def from_list(bits) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        out |= int(b) << i
    return out


def to_list(x: int, L: int) -> list[int]:
    return [(x >> i) & 1 for i in range(L)]


def to_array(x: int, L: int) -> np.ndarray:
    """Bits of ``x`` as a uint8 array of length ``L``."""
    raw = np.frombuffer(x.to_bytes((L + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:L].copy()


def from_array(a) -> int:
    a = np.asarray(a, dtype=np.uint8)
    return int.from_bytes(np.packbits(a, bitorder="little").tobytes(), "little")
