"""Two-key equivocal PRFs.

Two keys that compute the same one-bit function everywhere except at a single
target input, where they disagree.

Reference form (``tabulated=False``), key bits from low to high::

    k (128 bits) | s* XOR pad (l bits) | pad (l bits) | b (1 bit)

    Eval(sk, s) = PRF(k, s) XOR (b AND s == s*)

The pair shares ``k``, ``pad`` and the masked target and differs only in ``b``.
This gives the two correctness properties but does not hide the target: it
is stored, masked, inside both keys. Do not treat it as a secure TEPRF.

Tabulated form (``tabulated=True``) is the truth table of the reference
function: bit ``s`` of the key is ``Eval(sk, s)``. It is used where the key
has to be read by a shallow circuit.

The PRF core is SHAKE-128 (a Keccak sponge over 64-bit lanes) of
``k | l | s`` with the first output bit taken.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .encoding import DecodeError, dec_int, enc_int, pack, unpack
from .rng import Rng

__all__ = ["TeprfKey", "TeprfKeyPair", "prf_bit", "teprf_keygen", "teprf_eval", "key_len", "PRF_KEY_BITS"]

PRF_KEY_BITS = 128


def prf_bit(k: int, s: int, ell: int) -> int:
    """Keyed PRF {0,1}^ell -> {0,1}."""
    data = k.to_bytes(PRF_KEY_BITS // 8, "little") + ell.to_bytes(4, "little") + s.to_bytes((ell + 7) // 8, "little")
    return hashlib.shake_128(data).digest(1)[0] & 1


def key_len(ell: int, tabulated: bool = False) -> int:
    return (1 << ell) if tabulated else PRF_KEY_BITS + 2 * ell + 1


@dataclass(frozen=True)
class TeprfKey:
    bits: int
    ell: int
    tabulated: bool = False

    def __post_init__(self):
        if self.bits < 0 or self.bits >> key_len(self.ell, self.tabulated):
            raise ValueError("key does not fit its length")

    @property
    def length(self) -> int:
        return key_len(self.ell, self.tabulated)

    def to_bytes(self) -> bytes:
        return pack("teprf_key", [b"\x01", enc_int(self.ell), enc_int(self.length), bytes([self.tabulated]), enc_int(self.bits)])

    @classmethod
    def from_bytes(cls, data: bytes) -> "TeprfKey":
        _, f = unpack(data, "teprf_key")
        if len(f) != 5 or f[0] != b"\x01":
            raise DecodeError("unsupported key encoding")
        key = cls(dec_int(f[4]), dec_int(f[1]), bool(f[3][0]))
        if key.length != dec_int(f[2]):
            raise DecodeError("key length field mismatch")
        return key


@dataclass(frozen=True)
class TeprfKeyPair:
    sk0: TeprfKey
    sk1: TeprfKey
    target: int  # held for testing; not part of either key's contract


def _split_ref(bits: int, ell: int):
    mask = (1 << ell) - 1
    k = bits & ((1 << PRF_KEY_BITS) - 1)
    masked = (bits >> PRF_KEY_BITS) & mask
    pad = (bits >> (PRF_KEY_BITS + ell)) & mask
    b = (bits >> (PRF_KEY_BITS + 2 * ell)) & 1
    return k, masked ^ pad, b


def teprf_eval(sk, s: int, ell: int | None = None, tabulated: bool | None = None) -> int:
    """Evaluate a key (a :class:`TeprfKey`, or raw bits plus ``ell``)."""
    if isinstance(sk, TeprfKey):
        bits, ell, tabulated = sk.bits, sk.ell, sk.tabulated
    else:
        if ell is None:
            raise ValueError("raw key bits need ell")
        bits, tabulated = int(sk), bool(tabulated)
        if bits >> key_len(ell, tabulated):
            raise ValueError("key has the wrong length")
    if s < 0 or s >> ell:
        raise ValueError(f"input does not fit in {ell} bits")
    if tabulated:
        return (bits >> s) & 1
    k, target, b = _split_ref(bits, ell)
    return prf_bit(k, s, ell) ^ (b & (s == target))


def teprf_keygen(ell: int, s_star: int, rng: Rng, tabulated: bool = False) -> TeprfKeyPair:
    if ell < 1:
        raise ValueError("ell must be positive")
    if s_star < 0 or s_star >> ell:
        raise ValueError(f"target does not fit in {ell} bits")
    if tabulated and ell > 20:
        raise ValueError("tabulated keys are limited to ell <= 20")
    k = rng.bits(PRF_KEY_BITS)
    pad = rng.bits(ell)
    base = k | ((s_star ^ pad) << PRF_KEY_BITS) | (pad << (PRF_KEY_BITS + ell))
    flag = 1 << (PRF_KEY_BITS + 2 * ell)
    if not tabulated:
        return TeprfKeyPair(TeprfKey(base, ell), TeprfKey(base | flag, ell), s_star)
    table = 0
    for s in range(1 << ell):
        table |= prf_bit(k, s, ell) << s
    return TeprfKeyPair(TeprfKey(table, ell, True), TeprfKey(table ^ (1 << s_star), ell, True), s_star)
