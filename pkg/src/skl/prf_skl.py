"""Unpredictable functions with leased keys, and the PRF built from them.

UPF: ``n`` TEPRF pairs, one per output bit. The master key keeps the ``b = 0``
keys; leg ``i`` of the leased key embeds both keys of pair ``i`` behind a BB84
qubit. Input ``s = s_1 || ... || s_n`` with ``l``-bit blocks; output bit ``i``
is ``Eval(sk_i, s_i)``. Leased evaluation agrees with the master key unless
some block hits that pair's target.

PRF: the input is split as ``s' || r`` and the output is ``UPF(s') . r``. This
wrapper turns a leased UPF into a leased PRF; it is not a general compiler from
a plain UPF to a plain PRF. :func:`compose_plain` XORs in an independent PRF
when plain PRF security of the master-key function is also wanted.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import bits as _bits
from .deletion import DeletionCertificate, Verdict, recover_bits, verify_relation
from .encoding import enc_int, pack
from .qsim import BB84Qubit, LegArray, embed
from .rng import Rng
from .teprf import PRF_KEY_BITS, key_len, prf_bit, teprf_eval, teprf_keygen

__all__ = [
    "UpfMasterKey",
    "UpfLeasedKey",
    "UpfVerificationKey",
    "PrfInput",
    "upf_keygen",
    "upf_eval",
    "upf_leval",
    "upf_del",
    "upf_delvrfy",
    "upf_check",
    "upf_recover_x",
    "prf_eval",
    "prf_leval",
    "PlainPrfKey",
    "plain_prf_keygen",
    "compose_plain",
    "shadow_targets",
]


@dataclass(frozen=True, eq=False)
class UpfMasterKey:
    sk0_list: tuple  # raw TEPRF key bits
    ell: int
    _targets: tuple = field(default=(), repr=False)

    @property
    def n(self) -> int:
        return len(self.sk0_list)

    def to_bytes(self) -> bytes:
        return pack("upf_msk", [enc_int(self.ell)] + [enc_int(k) for k in self.sk0_list])


def shadow_targets(msk: UpfMasterKey) -> tuple:
    """Target inputs of each pair. Test tooling only."""
    return msk._targets


@dataclass(eq=False)
class UpfLeasedKey:
    legs: LegArray
    ell: int

    @property
    def n(self) -> int:
        return len(self.legs)

    def to_bytes(self) -> bytes:
        return pack("upf_sk", [enc_int(self.ell), self.legs.snapshot()])


@dataclass(frozen=True, eq=False)
class UpfVerificationKey:
    theta: int
    x_had: dict
    key_pairs_had: dict
    n: int
    key_len: int

    @property
    def deltas(self) -> dict:
        return {i: a ^ b for i, (a, b) in self.key_pairs_had.items()}

    def to_bytes(self) -> bytes:
        fields = [enc_int(self.n), enc_int(self.key_len), enc_int(self.theta)]
        for i in sorted(self.key_pairs_had):
            a, b = self.key_pairs_had[i]
            fields += [enc_int(i), bytes([self.x_had[i]]), enc_int(a), enc_int(b)]
        return pack("upf_dvk", fields)


@dataclass(frozen=True)
class PrfInput:
    s_prime: int  # n*ell bits
    r: int  # n bits


def _block(s: int, i: int, ell: int) -> int:
    return (s >> (i * ell)) & ((1 << ell) - 1)


def _check_input(s: int, n: int, ell: int) -> int:
    s = int(s)
    if s < 0 or s >> (n * ell):
        raise ValueError(f"input does not fit in {n * ell} bits")
    return s


def upf_keygen(n: int, ell: int, rng: Rng, *, theta: int | None = None, x: int | None = None):
    """Return ``(msk, sk, dvk)``; ``theta``/``x`` override the sampled strings."""
    if n < 1 or ell < 1:
        raise ValueError("n and ell must be positive")
    xs = rng.bits(n) if x is None else x
    th = rng.bits(n) if theta is None else theta
    L = key_len(ell)
    legs, sk0s, targets, x_had, pairs = [], [], [], {}, {}
    for i in range(n):
        target = rng.bits(ell)
        kp = teprf_keygen(ell, target, rng)
        q = BB84Qubit((xs >> i) & 1, (th >> i) & 1)
        legs.append(embed(q, (kp.sk0.bits, kp.sk1.bits), length=L))
        sk0s.append(kp.sk0.bits)
        targets.append(target)
        if q.theta_bit:
            x_had[i] = q.x_bit
            pairs[i] = (kp.sk0.bits, kp.sk1.bits)
    msk = UpfMasterKey(tuple(sk0s), ell, tuple(targets))
    return msk, UpfLeasedKey(LegArray(legs), ell), UpfVerificationKey(th, x_had, pairs, n, L)


def upf_eval(msk: UpfMasterKey, s: int) -> int:
    ell = msk.ell
    s = _check_input(s, msk.n, ell)
    return sum(teprf_eval(k, _block(s, i, ell), ell) << i for i, k in enumerate(msk.sk0_list))


def upf_leval(sk: UpfLeasedKey, s: int, rng: Rng) -> int:
    ell = sk.ell
    s = _check_input(s, sk.n, ell)
    out = 0
    for i in range(sk.n):
        si = _block(s, i, ell)
        out |= sk.legs.oracle(i, lambda u, p, si=si: teprf_eval(p, si, ell), rng) << i
    return out


def upf_del(sk: UpfLeasedKey, rng: Rng) -> DeletionCertificate:
    return DeletionCertificate(tuple(sk.legs.delete(rng)))


def upf_check(dvk: UpfVerificationKey, cert) -> Verdict:
    return verify_relation(dvk.theta, dvk.x_had, dvk.deltas, cert, dvk.n, dvk.key_len)


def upf_delvrfy(dvk: UpfVerificationKey, cert) -> bool:
    return bool(upf_check(dvk, cert))


def upf_recover_x(dvk: UpfVerificationKey, cert) -> dict:
    return recover_bits(dvk.deltas, cert)


def _check_prf_input(inp: PrfInput, n: int, ell: int):
    if not isinstance(inp, PrfInput):
        raise TypeError("expected a PrfInput")
    _check_input(inp.s_prime, n, ell)
    if inp.r < 0 or inp.r >> n:
        raise ValueError(f"r does not fit in {n} bits")


def prf_eval(msk: UpfMasterKey, inp: PrfInput) -> int:
    _check_prf_input(inp, msk.n, msk.ell)
    return _bits.dot(upf_eval(msk, inp.s_prime), inp.r)


def prf_leval(sk: UpfLeasedKey, inp: PrfInput, rng: Rng) -> int:
    _check_prf_input(inp, sk.n, sk.ell)
    return _bits.dot(upf_leval(sk, inp.s_prime, rng), inp.r)


@dataclass(frozen=True)
class PlainPrfKey:
    k: int


def plain_prf_keygen(rng: Rng) -> PlainPrfKey:
    return PlainPrfKey(rng.bits(PRF_KEY_BITS))


def compose_plain(value: int, key: PlainPrfKey, inp: PrfInput, n: int, ell: int) -> int:
    """XOR a PRF output (from eval or leval) with an independent plain PRF."""
    width = n * ell + n
    return value ^ prf_bit(key.k, inp.s_prime | (inp.r << (n * ell)), width)
