"""Digital signatures with a leased, certifiably deletable static signing key.

Leg ``i`` carries, behind BB84 qubit ``(x[i], theta[i])``, the payload::

    table_{i,b}  (2**l bits)  ||  CS key constrained to F[table_{i,b}]

where ``(table_{i,0}, table_{i,1})`` is a tabulated TEPRF pair with hidden
target ``s~_i`` and ``F[table](s || t) = 1`` iff ``t = table[s]``. Each leg
has its own constrained-signature instance ``svk_i``.

Signing ``m = s_1 || ... || s_n`` evaluates ``t_i = table[s_i]`` on leg ``i``
(no disturbance unless ``s_i = s~_i`` on a superposed leg) and then signs
``s_i || t_i`` coherently with that leg's CS key. Off target, the leased key
is left exactly as it was.

Deletion measures every leg in the Hadamard basis; the outcome on the payload
splits into ``d`` (table part) and ``c`` (CS key part) and must satisfy
``e = x[i] XOR d . (table_{i,0} XOR table_{i,1}) XOR c . (ck_{i,0} XOR ck_{i,1})``
on every Hadamard position.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import bits as _bits
from .cs import (
    CsSignature,
    cs_constrain,
    cs_qsign,
    cs_setup,
    cs_vrfy,
    describe,
    key_payload_len,
    message,
)
from .deletion import DeletionCertificate, Verdict, _well_formed
from .encoding import enc_int, pack
from .lattice.params import LatticeParams, validate_params, InvalidParams
from .qsim import BB84Qubit, LegArray, embed
from .rng import Rng
from .teprf import teprf_keygen

__all__ = [
    "DsLeasedKey",
    "DsDeletionKey",
    "DsVerificationKeys",
    "DsSignature",
    "ds_keygen",
    "ds_sign",
    "ds_sigvrfy",
    "ds_del",
    "ds_delvrfy",
    "ds_check",
    "ds_recover_x",
    "ds_shadow_targets",
    "ds_payload_len",
]


def ds_payload_len(params: LatticeParams) -> int:
    return (1 << params.table_bits) + key_payload_len(params)


@dataclass(eq=False)
class DsLeasedKey:
    legs: LegArray
    svk: tuple
    params: LatticeParams
    _targets: tuple = field(default=(), repr=False)

    @property
    def n(self) -> int:
        return len(self.legs)

    @property
    def ell(self) -> int:
        return self.params.table_bits

    def to_bytes(self) -> bytes:
        return pack("ds_sk", [enc_int(self.n), enc_int(self.ell), self.legs.snapshot()])


def ds_shadow_targets(sk: DsLeasedKey) -> tuple:
    """TEPRF targets of each leg. Test tooling only."""
    return sk._targets


@dataclass(frozen=True, eq=False)
class DsDeletionKey:
    theta: int
    x_had: dict
    pairs_had: dict  # i -> (table0, table1, cs_payload0, cs_payload1)
    n: int
    split: int  # bits of the table part
    length: int  # total payload bits

    @property
    def deltas(self) -> dict:
        """i -> (table0 XOR table1, cs0 XOR cs1)."""
        return {i: (a ^ b, c ^ d) for i, (a, b, c, d) in self.pairs_had.items()}

    def to_bytes(self) -> bytes:
        fields = [enc_int(self.n), enc_int(self.split), enc_int(self.length), enc_int(self.theta)]
        for i in sorted(self.pairs_had):
            fields += [enc_int(i), bytes([self.x_had[i]])] + [enc_int(v) for v in self.pairs_had[i]]
        return pack("ds_dvk", fields)


@dataclass(frozen=True, eq=False)
class DsVerificationKeys:
    svk: tuple
    dvk: DsDeletionKey

    def svk_bytes(self) -> bytes:
        return pack("ds_vk", [v.to_bytes() for v in self.svk])


@dataclass(frozen=True, eq=False)
class DsSignature:
    parts: tuple  # (t_i, CsSignature)

    def __len__(self):
        return len(self.parts)

    def to_bytes(self, q: int) -> bytes:
        return pack("ds_sig", [bytes([t]) + s.to_bytes(q) for t, s in self.parts])


def _blocks(m: int, n: int, ell: int) -> list:
    m = int(m)
    if m < 0 or m >> (n * ell):
        raise ValueError(f"message does not fit in {n * ell} bits")
    return [(m >> (i * ell)) & ((1 << ell) - 1) for i in range(n)]


def ds_keygen(n: int, params: LatticeParams, rng: Rng, *, ell: int | None = None,
              theta: int | None = None, x: int | None = None):
    """Return ``(sigk, vks)``; ``theta``/``x`` override the sampled strings."""
    if n < 1:
        raise ValueError("n must be at least 1")
    tb = params.table_bits
    if ell is not None and ell != tb:
        raise ValueError(f"these parameters sign {tb}-bit blocks")
    if params.strict and not validate_params(params).ok:
        raise InvalidParams("lattice parameters fail validation")
    xs = rng.bits(n) if x is None else x
    th = rng.bits(n) if theta is None else theta
    split = 1 << tb
    L = ds_payload_len(params)
    legs, svks, targets, x_had, pairs = [], [], [], {}, {}
    for i in range(n):
        target = rng.bits(tb)
        kp = teprf_keygen(tb, target, rng, tabulated=True)
        vk, msk = cs_setup(params.with_(strict=False), rng)
        tables = (kp.sk0.bits, kp.sk1.bits)
        cks = [cs_constrain(msk, describe(t, params), rng).payload() for t in tables]
        payloads = [tables[b] | (cks[b] << split) for b in (0, 1)]
        q = BB84Qubit((xs >> i) & 1, (th >> i) & 1)
        legs.append(embed(q, payloads, length=L))
        svks.append(vk)
        targets.append(target)
        if q.theta_bit:
            x_had[i] = q.x_bit
            pairs[i] = (tables[0], tables[1], cks[0], cks[1])
    svk = tuple(svks)
    sk = DsLeasedKey(LegArray(legs), svk, params, tuple(targets))
    return sk, DsVerificationKeys(svk, DsDeletionKey(th, x_had, pairs, n, split, L))


def ds_sign(sigk: DsLeasedKey, m: int, rng: Rng):
    """Sign ``m`` (n blocks of ``ell`` bits). Returns ``(sigk, sig)``; legs update in place."""
    p = sigk.params
    tb = p.table_bits
    split = 1 << tb
    parts = []
    for i, s in enumerate(_blocks(m, sigk.n, tb)):
        t = sigk.legs.oracle(i, lambda u, pl, s=s: (pl >> s) & 1, rng)
        reg = sigk.legs.legs[i]
        reg2, sig = cs_qsign(reg, sigk.svk[i], message(s, t, p), rng, offset=split)
        sigk.legs.legs[i] = reg2
        parts.append((t, sig))
    return sigk, DsSignature(tuple(parts))


def ds_sigvrfy(svk, m: int, sig) -> bool:
    svk = tuple(svk)
    if not isinstance(sig, DsSignature) or len(sig.parts) != len(svk):
        return False
    if not svk:
        return True
    p = svk[0].params
    try:
        blocks = _blocks(m, len(svk), p.table_bits)
    except ValueError:
        return False
    for vk, s, (t, cs_sig) in zip(svk, blocks, sig.parts):
        if t not in (0, 1) or not isinstance(cs_sig, CsSignature):
            return False
        if not cs_vrfy(vk, message(s, t, p), cs_sig):
            return False
    return True


def ds_del(sigk: DsLeasedKey, rng: Rng) -> DeletionCertificate:
    return DeletionCertificate(tuple(sigk.legs.delete(rng)))


def ds_check(dvk: DsDeletionKey, cert) -> Verdict:
    if not _well_formed(cert, dvk.n, dvk.length):
        return Verdict.MALFORMED
    mask = (1 << dvk.split) - 1
    for i, (dt, dc) in dvk.deltas.items():
        o = cert.pairs[i]
        d, c = o.d & mask, o.d >> dvk.split
        if o.e != dvk.x_had[i] ^ _bits.dot(d, dt) ^ _bits.dot(c, dc):
            return Verdict.REJECT
    return Verdict.ACCEPT


def ds_delvrfy(dvk: DsDeletionKey, cert) -> bool:
    return bool(ds_check(dvk, cert))


def ds_recover_x(dvk: DsDeletionKey, cert) -> dict:
    """x[i] candidates e XOR d . dT XOR c . dC on Hadamard positions."""
    mask = (1 << dvk.split) - 1
    out = {}
    for i, (dt, dc) in dvk.deltas.items():
        o = cert.pairs[i]
        out[i] = o.e ^ _bits.dot(o.d & mask, dt) ^ _bits.dot(o.d >> dvk.split, dc)
    return out
