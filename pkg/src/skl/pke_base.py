"""Regev-style bit encryption used as the classical PKE inside PKE-SKL.

Toy parameters, not secure. The public matrix ``A`` is shared by all keys of
one parameter set (derived from ``matrix_seed``); a key is ``b = sA + e``.

Decryption keys are fixed-width bitstrings: the secret ``s`` in ``Z_q^n`` is
packed coefficient by coefficient, little-endian, ``coeff_bits`` bits each,
coefficient 0 in the lowest positions.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .encoding import DecodeError, dec_int, enc_int, pack, unpack
from .rng import Rng

__all__ = [
    "RegevParams",
    "REFERENCE",
    "ZERO_NOISE",
    "BitPkeKeyPair",
    "BitCiphertext",
    "pke_keygen",
    "pke_keygen_batch",
    "pke_enc",
    "pke_enc_batch",
    "pke_dec",
    "decode_dk",
    "encode_dk",
]


@dataclass(frozen=True)
class RegevParams:
    n_lwe: int = 64
    q: int = 3329
    m_lwe: int = 256
    noise: str = "ternary"  # or "zero"
    matrix_seed: int = 0
    coeff_bits: int = 16
    err_budget: float = 2.0 ** -20

    def __post_init__(self):
        if self.noise not in ("ternary", "zero"):
            raise ValueError("noise must be 'ternary' or 'zero'")
        if min(self.n_lwe, self.m_lwe) < 1 or self.q < 4:
            raise ValueError("dimensions must be positive and q >= 4")
        if (self.q - 1).bit_length() > self.coeff_bits:
            raise ValueError("coeff_bits too small for q")
        # |<e, r>| <= m_lwe * max|e| must stay below q/4 for exact decryption.
        if self.noise_bound * self.m_lwe * 4 >= self.q:
            raise ValueError("modulus too small: decryption error is not bounded")

    @property
    def noise_bound(self) -> int:
        return 0 if self.noise == "zero" else 1

    @property
    def dk_len(self) -> int:
        return self.n_lwe * self.coeff_bits

    @property
    def scheme_id(self) -> str:
        return f"regev/{self.n_lwe}/{self.q}/{self.m_lwe}/{self.noise}/{self.matrix_seed}"

    @property
    def A(self) -> np.ndarray:
        return _public_matrix(self.n_lwe, self.m_lwe, self.q, self.matrix_seed)


REFERENCE = RegevParams()
ZERO_NOISE = RegevParams(noise="zero")


@lru_cache(maxsize=16)
def _public_matrix(n, m, q, seed):
    A = Rng(seed).np.integers(0, q, size=(n, m), dtype=np.int64)
    A.setflags(write=False)
    return A


@dataclass(frozen=True, eq=False)
class BitPkeKeyPair:
    ek: np.ndarray  # b = sA + e, shape (m_lwe,)
    dk: int  # packed secret, dk_len bits
    params: RegevParams

    def ek_bytes(self) -> bytes:
        return pack("pke_ek", [self.params.scheme_id.encode(), self.ek.astype("<u2").tobytes()])

    def dk_bytes(self) -> bytes:
        return pack("pke_dk", [self.params.scheme_id.encode(), enc_int(self.dk)])


@dataclass(frozen=True, eq=False)
class BitCiphertext:
    u: np.ndarray  # A r mod q, shape (n_lwe,)
    v: int
    scheme_id: str

    def to_bytes(self) -> bytes:
        return pack("pke_ct", [self.scheme_id.encode(), self.u.astype("<u2").tobytes(), enc_int(self.v)])

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitCiphertext":
        _, f = unpack(data, "pke_ct")
        if len(f) != 3:
            raise DecodeError("bad ciphertext encoding")
        return cls(np.frombuffer(f[1], dtype="<u2").astype(np.int64), dec_int(f[2]), f[0].decode())


def encode_dk(s: np.ndarray, params: RegevParams) -> int:
    if params.coeff_bits == 16:
        return int.from_bytes(np.asarray(s, dtype="<u2").tobytes(), "little")
    out = 0
    for i, c in enumerate(np.asarray(s).tolist()):
        out |= int(c) << (i * params.coeff_bits)
    return out


@lru_cache(maxsize=8192)
def _decode(dk: int, n: int, width: int, q: int) -> np.ndarray:
    if dk < 0 or dk >> (n * width):
        raise ValueError("decryption key has the wrong length")
    if width == 16:
        s = np.frombuffer(dk.to_bytes(2 * n, "little"), dtype="<u2").astype(np.int64)
    else:
        mask = (1 << width) - 1
        s = np.array([(dk >> (i * width)) & mask for i in range(n)], dtype=np.int64)
    if s.max(initial=0) >= q:
        raise ValueError("decryption key coefficient out of range")
    s.setflags(write=False)
    return s


def decode_dk(dk: int, params: RegevParams) -> np.ndarray:
    return _decode(int(dk), params.n_lwe, params.coeff_bits, params.q)


def _noise(params, rng, shape):
    if params.noise == "zero":
        return np.zeros(shape, dtype=np.int64)
    return rng.np.integers(-1, 2, size=shape, dtype=np.int64)


def pke_keygen_batch(params: RegevParams, count: int, rng: Rng) -> list[BitPkeKeyPair]:
    """``count`` independent key pairs in one vectorized pass."""
    S = rng.np.integers(0, params.q, size=(count, params.n_lwe), dtype=np.int64)
    E = _noise(params, rng, (count, params.m_lwe))
    B = (S @ params.A + E) % params.q
    return [BitPkeKeyPair(B[i], encode_dk(S[i], params), params) for i in range(count)]


def pke_keygen(params: RegevParams, rng: Rng) -> BitPkeKeyPair:
    return pke_keygen_batch(params, 1, rng)[0]


def pke_enc_batch(eks, msgs, params: RegevParams, rng: Rng) -> list[BitCiphertext]:
    """Encrypt bit ``msgs[j]`` under ``eks[j]`` for every j."""
    msgs = np.asarray(msgs, dtype=np.int64)
    if np.any((msgs != 0) & (msgs != 1)):
        raise ValueError("messages are bits")
    Bm = np.asarray([np.asarray(e) for e in eks], dtype=np.int64)
    R = rng.np.integers(0, 2, size=(len(msgs), params.m_lwe), dtype=np.int64)
    U = (R @ params.A.T) % params.q
    V = ((Bm * R).sum(axis=1) + msgs * (params.q // 2)) % params.q
    sid = params.scheme_id
    return [BitCiphertext(U[j], int(V[j]), sid) for j in range(len(msgs))]


def pke_enc(ek, m: int, rng: Rng, params: RegevParams = REFERENCE) -> BitCiphertext:
    if isinstance(ek, BitPkeKeyPair):
        ek, params = ek.ek, ek.params
    return pke_enc_batch([ek], [m], params, rng)[0]


def pke_dec(dk: int, ct: BitCiphertext, params: RegevParams = REFERENCE) -> int:
    """Decrypt one bit; raises on malformed ciphertexts or wrong-length keys."""
    if not isinstance(ct, BitCiphertext) or ct.scheme_id != params.scheme_id:
        raise ValueError("ciphertext does not belong to this scheme instance")
    if ct.u.shape != (params.n_lwe,) or not 0 <= ct.v < params.q:
        raise ValueError("malformed ciphertext")
    s = decode_dk(dk, params)
    w = (ct.v - int(s @ ct.u)) % params.q
    half = params.q // 2
    return int(abs(w - half) < min(w, params.q - w))
