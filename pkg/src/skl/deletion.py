"""Deletion certificates and the verification relation shared by all schemes.

On every Hadamard position ``i`` an honest certificate satisfies
``e_i = x[i] XOR d_i . (p_{i,0} XOR p_{i,1})`` where ``p_{i,b}`` are the two
branch payloads of leg ``i``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from . import bits as _bits
from .encoding import pack, unpack
from .qsim import HadamardOutcome

__all__ = ["Verdict", "DeletionCertificate", "verify_relation", "recover_bits", "random_certificate"]


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    MALFORMED = "malformed"

    def __bool__(self):
        return self is Verdict.ACCEPT


@dataclass(frozen=True)
class DeletionCertificate:
    pairs: tuple[HadamardOutcome, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def to_bytes(self, tag: str = "skl_cert") -> bytes:
        return pack(tag, [p.to_bytes() for p in self.pairs])

    @classmethod
    def from_bytes(cls, data: bytes, tag: str = "skl_cert") -> "DeletionCertificate":
        _, f = unpack(data, tag)
        return cls(tuple(HadamardOutcome.from_bytes(x) for x in f))


def _well_formed(cert, n: int, length: int) -> bool:
    if not isinstance(cert, DeletionCertificate) or len(cert.pairs) != n:
        return False
    for p in cert.pairs:
        if not isinstance(p, HadamardOutcome) or p.length != length or p.e not in (0, 1):
            return False
        if not isinstance(p.d, int) or p.d < 0 or p.d >> length:
            return False
    return True


def verify_relation(theta: int, x_had: dict, deltas: dict, cert, n: int, length: int) -> Verdict:
    """Check the relation at every Hadamard position. Shape errors give MALFORMED."""
    if not _well_formed(cert, n, length):
        return Verdict.MALFORMED
    for i, delta in deltas.items():
        p = cert.pairs[i]
        if p.e != x_had[i] ^ _bits.dot(p.d, delta):
            return Verdict.REJECT
    return Verdict.ACCEPT


def recover_bits(deltas: dict, cert) -> dict:
    """y_i = e_i XOR d_i . delta_i on each Hadamard position."""
    return {i: cert.pairs[i].e ^ _bits.dot(cert.pairs[i].d, dl) for i, dl in deltas.items()}


def random_certificate(n: int, length: int, rng) -> DeletionCertificate:
    """Uniformly random certificate of the right shape."""
    return DeletionCertificate(tuple(HadamardOutcome(rng.bit(), rng.bits(length), length) for _ in range(n)))


