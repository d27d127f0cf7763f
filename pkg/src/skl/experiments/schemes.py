"""Uniform adapters over the leasing schemes, as the games and adversaries see them.

``keygen`` returns :class:`Keys`: ``pub`` is what the adversary receives next
to the quantum key (``ek`` or ``svk``; ``None`` for the PRF schemes),
``secret`` is what only the challenger keeps (``msk``; ``None`` otherwise).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import ds_skl, pke_skl, prf_skl
from ..cs import CsSignature
from ..encoding import digest
from ..lattice.params import LatticeParams, preset
from ..pke_base import REFERENCE, ZERO_NOISE, RegevParams
from ..rng import Rng

__all__ = ["Keys", "PkeScheme", "UpfScheme", "PrfScheme", "DsScheme", "make_scheme", "SCHEMES"]


@dataclass
class Keys:
    pub: object
    key: object
    dvk: object
    secret: object = None
    digest: str = ""


def _key_shape(key) -> tuple:
    legs = key.legs.legs
    return len(legs), legs[0].length


class _Base:
    name = ""

    def key_shape(self, key) -> tuple:
        """(legs, payload bits) of a leased key, as visible to its holder."""
        return _key_shape(key)

    def collapse(self, key, rng: Rng) -> None:
        """Measure every leg of ``key`` in the computational basis."""
        for i in range(len(key.legs)):
            key.legs.read(i, rng)

    def describe(self) -> dict:
        raise NotImplementedError


class PkeScheme(_Base):
    """PKE-SKL with n-bit messages."""

    name = "pke"

    def __init__(self, n: int = 16, params: RegevParams = REFERENCE):
        self.n, self.params = n, params

    @property
    def msg_bits(self) -> int:
        return self.n

    def keygen(self, rng: Rng) -> Keys:
        pk, dk, dvk = pke_skl.skl_keygen(self.n, self.params, rng)
        return Keys(pk, dk, dvk, None, digest(pk.to_bytes() + dvk.to_bytes()))

    def enc(self, pub, m: int, rng: Rng):
        return pke_skl.skl_enc(pub, m, rng)

    def dec(self, key, ct, rng: Rng) -> int:
        return pke_skl.skl_dec(key, ct, rng)

    def delete(self, key, rng: Rng):
        return pke_skl.skl_del(key, rng)

    def delvrfy(self, dvk, cert) -> bool:
        return pke_skl.skl_delvrfy(dvk, cert)

    def describe(self) -> dict:
        return {"scheme": self.name, "n": self.n, "noise": self.params.noise}


class UpfScheme(_Base):
    """Unpredictable functions with n-bit outputs on n*ell-bit inputs."""

    name = "upf"

    def __init__(self, n: int = 16, ell: int = 16):
        self.n, self.ell = n, ell

    @property
    def domain_bits(self) -> int:
        return self.n * self.ell

    @property
    def range_bits(self) -> int:
        return self.n

    def keygen(self, rng: Rng) -> Keys:
        msk, sk, dvk = prf_skl.upf_keygen(self.n, self.ell, rng)
        return Keys(None, sk, dvk, msk, digest(msk.to_bytes() + dvk.to_bytes()))

    def sample_input(self, rng: Rng):
        return rng.bits(self.domain_bits)

    def eval(self, msk, s) -> int:
        return prf_skl.upf_eval(msk, s)

    def leval(self, key, s, rng: Rng) -> int:
        return prf_skl.upf_leval(key, s, rng)

    def delete(self, key, rng: Rng):
        return prf_skl.upf_del(key, rng)

    def delvrfy(self, dvk, cert) -> bool:
        return prf_skl.upf_delvrfy(dvk, cert)

    def describe(self) -> dict:
        return {"scheme": self.name, "n": self.n, "ell": self.ell}


class PrfScheme(UpfScheme):
    """The one-bit PRF obtained from :class:`UpfScheme` by an inner product."""

    name = "prf"

    @property
    def range_bits(self) -> int:
        return 1

    def sample_input(self, rng: Rng):
        return prf_skl.PrfInput(rng.bits(self.domain_bits), rng.bits(self.n))

    def eval(self, msk, s) -> int:
        return prf_skl.prf_eval(msk, s)

    def leval(self, key, s, rng: Rng) -> int:
        return prf_skl.prf_leval(key, s, rng)


class DsScheme(_Base):
    """DS-SKL over a lattice preset; messages are n blocks of table_bits bits."""

    name = "ds"

    def __init__(self, n: int = 2, params: LatticeParams | str = "toy"):
        self.n = n
        self.params = preset(params) if isinstance(params, str) else params

    @property
    def msg_bits(self) -> int:
        return self.n * self.params.table_bits

    def keygen(self, rng: Rng) -> Keys:
        sk, vks = ds_skl.ds_keygen(self.n, self.params, rng)
        return Keys(vks.svk, sk, vks.dvk, None, digest(vks.svk_bytes() + vks.dvk.to_bytes()))

    def sign(self, key, m: int, rng: Rng):
        return ds_skl.ds_sign(key, m, rng)[1]

    def sigvrfy(self, pub, m: int, sig) -> bool:
        return ds_skl.ds_sigvrfy(pub, m, sig)

    def blank_signature(self, rng: Rng):
        """All-zero signature vectors with guessed evaluation bits."""
        zero = np.zeros(2 * self.params.m, dtype=np.int64)
        return ds_skl.DsSignature(tuple((rng.bit(), CsSignature(zero)) for _ in range(self.n)))

    def delete(self, key, rng: Rng):
        return ds_skl.ds_del(key, rng)

    def delvrfy(self, dvk, cert) -> bool:
        return ds_skl.ds_delvrfy(dvk, cert)

    def describe(self) -> dict:
        return {"scheme": self.name, "n": self.n, "preset": self.params.name}


SCHEMES = {"pke": PkeScheme, "upf": UpfScheme, "prf": PrfScheme, "ds": DsScheme}


def make_scheme(name: str, *, n: int | None = None, ell: int | None = None,
                preset_name: str | None = None, noise: str = "reference"):
    """Build an adapter from plain configuration values."""
    if name == "pke":
        params = {"reference": REFERENCE, "ternary": REFERENCE, "zero": ZERO_NOISE}.get(noise)
        if params is None:
            raise ValueError(f"unknown noise {noise!r}")
        return PkeScheme(n or 16, params)
    if name in ("upf", "prf"):
        return SCHEMES[name](n or 16, ell or 16)
    if name == "ds":
        return DsScheme(n or 2, preset_name or "toy")
    raise ValueError(f"unknown scheme {name!r}")
