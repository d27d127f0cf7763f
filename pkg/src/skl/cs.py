"""Constrained signatures from lattices, signable through a branched key register.

Keys and messages:

* A function is a truth table on ``iota - 1`` input bits; its description is
  ``<f> = 1 || table`` (``ell = 2**(iota-1) + 1`` bits, bit 0 forced to 1).
* A message is ``s || t`` (``iota`` bits, ``s`` in the low bits). The
  constrained key for ``f`` may sign it iff ``table[s] == t``; the circuit
  ``U_msg`` computing this from ``<f>`` has depth at most 1.

Scheme: ``vk = (A, B, C)`` with ``A`` from :func:`trapgen`. The key for ``f``
is ``R = SamPre(B - <f> (x) G)`` and ``R' = SamPre(C)``. To sign ``msg`` the
signer evaluates ``U_msg`` to get ``B H`` and ``T = R Hhat + R'``, which
satisfies ``A T + G = B H + C`` whenever ``f(msg) = 1``; ``T`` is then a
trapdoor for ``M = [A | B H + C]`` and the signature is a short Gaussian
``x`` with ``M x = 0``. Verification recomputes ``B H`` and checks
membership, ``|x|_inf <= beta_ver`` and ``x != 0``.

Coherent signing (:func:`cs_qsign`) takes a register whose branches hold
constrained keys for one ``vk``. Each branch must accept the message. The
signature is drawn with one branch's trapdoor and the register is returned
unchanged; this is the zero-disturbance idealization of signing inside a
superposition, where the output distribution does not depend on the trapdoor.

Key payloads (for registers) are ``<f>`` (``ell`` bits) followed by ``R``
and ``R'`` as little-endian int16, row-major.
"""
from __future__ import annotations

import hashlib
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .encoding import DecodeError, decode_matrix, enc_int, encode_matrix, pack, unpack
from .lattice.evaluation import Circuit, eval_f_out, eval_trapdoor, table_check
from .lattice.gadget import GadgetParams, gadget
from .lattice.gaussian import _trapdoor_for, dgauss_coset
from .lattice.params import InvalidParams, LatticeParams, quality_width, validate_params
from .lattice.trapdoor import Trapdoor, sampre, trapgen
from .lattice.zq import inf_norm, mul_mod, uniform, zq
from .qsim import BranchedRegister, Collapsed, Superposed

__all__ = [
    "CsVerificationKey",
    "CsMasterKey",
    "ConstrainedKey",
    "CsSignature",
    "TrapdoorQualityError",
    "ConstraintError",
    "CoherenceViolation",
    "describe",
    "message",
    "universal",
    "accepts",
    "cs_setup",
    "cs_constrain",
    "cs_sign",
    "cs_vrfy",
    "cs_qsign",
    "key_payload_len",
    "signing_trapdoor",
]

_I16 = np.dtype("<i2")


class TrapdoorQualityError(ValueError):
    """The derived trapdoor is too long for the Gaussian width."""


class ConstraintError(ValueError):
    """The key's function rejects the message."""


class CoherenceViolation(ValueError):
    """A branch of the key register rejects the message."""


def describe(table: int, params: LatticeParams) -> int:
    """``<f> = 1 || table`` as an ``ell``-bit integer."""
    tb = params.table_bits
    if params.ell != (1 << tb) + 1:
        raise InvalidParams("ell must equal 2**(iota-1) + 1 for table constraints")
    if table < 0 or table >> (1 << tb):
        raise ValueError(f"table must have {1 << tb} bits")
    return 1 | (table << 1)


def message(s: int, t: int, params: LatticeParams) -> int:
    tb = params.table_bits
    if s < 0 or s >> tb or t not in (0, 1):
        raise ValueError("message is s (iota-1 bits) and a bit t")
    return s | (t << tb)


def universal(msg: int, params: LatticeParams) -> Circuit:
    """U_msg: evaluates to f(msg) on input <f>."""
    tb = params.table_bits
    if msg < 0 or msg >> params.iota:
        raise ValueError(f"message must have {params.iota} bits")
    return table_check(tb, msg & ((1 << tb) - 1), msg >> tb)


def _fbits(f: int, ell: int) -> list:
    return [(f >> i) & 1 for i in range(ell)]


def accepts(f: int, msg: int, params: LatticeParams) -> bool:
    return bool(universal(msg, params).evaluate(_fbits(f, params.ell)))


@dataclass(frozen=True, eq=False)
class CsVerificationKey:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    params: LatticeParams
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def to_bytes(self) -> bytes:
        q = self.params.q
        return pack("cs_vk", [encode_matrix(self.A, q), encode_matrix(self.B, q), encode_matrix(self.C, q)])

    @classmethod
    def from_bytes(cls, data: bytes, params: LatticeParams) -> "CsVerificationKey":
        _, f = unpack(data, "cs_vk")
        if len(f) != 3:
            raise DecodeError("bad verification key")
        mats = [zq(decode_matrix(x)[0], params.q) for x in f]
        return cls(*mats, params)

    @property
    def fingerprint(self) -> bytes:
        fp = self._cache.get("fp")
        if fp is None:
            fp = hashlib.sha256(self.to_bytes()).digest()
            self._cache["fp"] = fp
        return fp

    def matrix_for(self, msg: int) -> np.ndarray:
        """[A | B H + C] for message ``msg`` (cached)."""
        M = self._cache.get(msg)
        if M is None:
            p = self.params
            BH = eval_f_out(universal(msg, p), self.B, p.q, p.n, p.m, d=p.d)
            M = np.concatenate([self.A, zq(BH + self.C, p.q)], axis=1)
            self._cache[msg] = M
        return M


@dataclass(frozen=True, eq=False)
class CsMasterKey:
    vk: CsVerificationKey
    td: Trapdoor


@dataclass(frozen=True, eq=False)
class ConstrainedKey:
    vk: CsVerificationKey
    f: int
    R: np.ndarray
    R_prime: np.ndarray
    _ctx: dict = field(default_factory=dict, repr=False, compare=False)

    def payload(self) -> int:
        body = self.R.astype(_I16).tobytes() + self.R_prime.astype(_I16).tobytes()
        return self.f | (int.from_bytes(body, "little") << self.vk.params.ell)

    @classmethod
    def from_payload(cls, vk: CsVerificationKey, payload: int) -> "ConstrainedKey":
        p = vk.params
        m, ell = p.m, p.ell
        f = payload & ((1 << ell) - 1)
        nbytes = 2 * (m * m * ell + m * m)
        body = (payload >> ell).to_bytes(nbytes, "little")
        arr = np.frombuffer(body, dtype=_I16).astype(np.int64)
        R = arr[: m * m * ell].reshape(m, m * ell)
        Rp = arr[m * m * ell:].reshape(m, m)
        return cls(vk, f, R, Rp)

    def to_bytes(self) -> bytes:
        q = self.vk.params.q
        return pack("cs_key", [enc_int(self.f), encode_matrix(self.R, q), encode_matrix(self.R_prime, q)])


def key_payload_len(params: LatticeParams) -> int:
    m = params.m
    return params.ell + 16 * (m * m * params.ell + m * m)


@dataclass(frozen=True)
class CsSignature:
    x: np.ndarray

    def to_bytes(self, q: int) -> bytes:
        return pack("cs_sig", [encode_matrix(self.x.reshape(1, -1), q)])

    @classmethod
    def from_bytes(cls, data: bytes) -> "CsSignature":
        _, f = unpack(data, "cs_sig")
        M, _ = decode_matrix(f[0])
        return cls(M.reshape(-1))


def cs_setup(params: LatticeParams, rng):
    """Return ``(vk, msk)``. Strict parameter sets must pass all conditions."""
    if params.strict:
        rep = validate_params(params)
        if not rep.ok:
            raise InvalidParams(f"conditions {rep.failed()} fail")
    if params.beta_sam >= (1 << 15):
        raise InvalidParams("beta_sam too large for the key payload encoding")
    n, m, q = params.n, params.m, params.q
    td = trapgen(n, m, q, rng)
    B = uniform((n, m * params.ell), q, rng)
    C = uniform((n, m), q, rng)
    vk = CsVerificationKey(td.A, B, C, params)
    return vk, CsMasterKey(vk, td)


def _fG(f: int, params: LatticeParams) -> np.ndarray:
    G = gadget(GadgetParams(params.n, params.m, params.q))
    return np.concatenate([b * G for b in _fbits(f, params.ell)], axis=1)


def cs_constrain(msk: CsMasterKey, f: int, rng) -> ConstrainedKey:
    p = msk.vk.params
    if f & 1 != 1 or f >> p.ell:
        raise ValueError(f"<f> must have {p.ell} bits with the first bit 1")
    R = sampre(msk.td, zq(msk.vk.B - _fG(f, p), p.q), rng)
    Rp = sampre(msk.td, msk.vk.C, rng)
    return ConstrainedKey(msk.vk, f, R, Rp)


def signing_trapdoor(sk: ConstrainedKey, msg: int):
    """(M, T) with M = [A | B H + C] and A T + G = B H + C (asserted)."""
    vk, p = sk.vk, sk.vk.params
    c = universal(msg, p)
    x = _fbits(sk.f, p.ell)
    if not c.evaluate(x):
        raise ConstraintError("the key's function rejects this message")
    BH, W = eval_trapdoor(c, x, vk.B, sk.R, p.q, p.n, p.m, d=p.d)
    T = W + sk.R_prime
    G = gadget(GadgetParams(p.n, p.m, p.q))
    rhs = zq(BH + vk.C, p.q)
    if not np.array_equal(zq(mul_mod(vk.A, T, p.q) + G, p.q), rhs):
        raise AssertionError("derived trapdoor identity violated")
    M = np.concatenate([vk.A, rhs], axis=1)
    return M, T


class _Contexts:
    """LRU of signing contexts keyed by (vk, payload, message)."""

    def __init__(self, size: int = 64):
        self.size = size
        self.d: OrderedDict = OrderedDict()

    def get(self, key, build):
        v = self.d.get(key)
        if v is None:
            v = build()
            self.d[key] = v
            if len(self.d) > self.size:
                self.d.popitem(last=False)
        else:
            self.d.move_to_end(key)
        return v


_CTX = _Contexts()


def _build(sk: ConstrainedKey, msg: int):
    p = sk.vk.params
    M, T = signing_trapdoor(sk, msg)
    tnorm = inf_norm(T)
    need = quality_width(p.n, p.m, p.q, tnorm)
    if p.sigma_float < need:
        raise TrapdoorQualityError(f"width {p.sigma_float:.4g} below the required {need:.4g} (|T| = {tnorm})")
    return M, _trapdoor_for(T)


def _sign(ctx, params: LatticeParams, rng, count):
    M, td = ctx
    zero = np.zeros(params.n, dtype=np.int64)
    out = []
    need = 1 if count is None else count
    while len(out) < need:
        X = dgauss_coset(M, zero, params.q, params.sigma_float, td, rng, count=need - len(out), m=params.m)
        out.extend(CsSignature(x) for x in X if np.any(x))
    return out[0] if count is None else out


def cs_sign(sk: ConstrainedKey, msg: int, rng, *, count: int | None = None):
    """Sign ``msg``; ``count`` returns a list of independent signatures."""
    ctx = sk._ctx.get(msg)
    if ctx is None:
        ctx = sk._ctx[msg] = _build(sk, msg)
    return _sign(ctx, sk.vk.params, rng, count)


def cs_vrfy(vk: CsVerificationKey, msg: int, sig) -> bool:
    p = vk.params
    try:
        x = np.asarray(sig.x)
        if x.shape != (2 * p.m,):
            return False
        M = vk.matrix_for(msg)
    except (AttributeError, ValueError):
        return False
    if not np.any(x != 0):
        return False
    if inf_norm(x) > p.beta_ver:
        return False
    return bool(np.all(mul_mod(M, x.reshape(-1, 1), p.q) == 0))


def _branch_key(vk, payload: int, offset: int) -> ConstrainedKey:
    L = key_payload_len(vk.params)
    return ConstrainedKey.from_payload(vk, (payload >> offset) & ((1 << L) - 1))


def cs_qsign(reg: BranchedRegister, vk: CsVerificationKey, msg: int, rng, *, offset: int = 0,
             force_branch: int | None = None, count: int | None = None):
    """Sign with the key held in ``reg`` (payload bits from ``offset``).

    Returns ``(reg, sig)`` with ``reg`` unchanged. Every branch must accept
    ``msg``. Branch 0 signs unless ``force_branch`` picks the other; on a
    collapsed register the result equals :func:`cs_sign` with the same rng.
    """
    p = vk.params
    if isinstance(reg, Collapsed):
        branches = {reg.bit: reg.payload}
    elif isinstance(reg, Superposed):
        branches = {0: reg.payload0, 1: reg.payload1}
    else:
        raise TypeError("expected a branched register")
    mask = (1 << p.ell) - 1
    for b, pl in branches.items():
        if not accepts((pl >> offset) & mask, msg, p):
            raise CoherenceViolation(f"branch {b} rejects the message")
    b = force_branch if force_branch is not None else min(branches)
    if b not in branches:
        raise ValueError(f"branch {b} is not present")
    pl = branches[b]
    key = (vk.fingerprint, offset, pl, msg)
    ctx = _CTX.get(key, lambda: _build(_branch_key(vk, pl, offset), msg))
    return reg, _sign(ctx, p, rng, count)
