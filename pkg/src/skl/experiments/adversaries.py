"""Reference two-stage adversaries for the leasing games.

Every adversary has ``stage1(game, scheme, pub, key, rng) -> (cert, query,
state)`` and ``stage2(game, scheme, state, reveal, rng) -> answer``. ``query``
is the message pair in the IND game and ``None`` elsewhere; ``reveal`` holds
``dvk`` and the challenge.

* ``honest-deleter`` deletes honestly, then guesses blindly. Its certificate
  always verifies.
* ``basis-hoarder`` measures every leg in the computational basis, keeps the
  collapsed key and submits a uniformly random certificate.
* ``cert-forger`` keeps the key untouched and submits a uniformly random
  certificate.

The last two answer with whatever key they kept, so their win rate is about
``2**-h`` (``h`` Hadamard legs) times the success of an honest key holder.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..deletion import random_certificate
from ..rng import Rng

__all__ = ["VraAdversary", "HonestDeleter", "BasisHoarder", "CertForger", "ADVERSARIES", "get_adversary"]


@dataclass
class _Kept:
    key: object
    query: object = None


class VraAdversary:
    name = "adversary"

    def stage1(self, game: str, scheme, pub, key, rng: Rng):
        raise NotImplementedError

    def stage2(self, game: str, scheme, state, reveal: dict, rng: Rng):
        raise NotImplementedError


def _pair(scheme):
    return (0, (1 << scheme.msg_bits) - 1)


def _use_key(game, scheme, kept: _Kept, pub, reveal, rng):
    """Answer the challenge honestly with a kept key."""
    key = kept.key
    if game == "ind":
        m = scheme.dec(key, reveal["ct"], rng)
        return 0 if m == kept.query[0] else 1
    if game == "ow":
        return scheme.dec(key, reveal["ct"], rng)
    if game == "pr":
        return 0 if scheme.leval(key, reveal["s"], rng) == reveal["t"] else 1
    if game == "up":
        return scheme.leval(key, reveal["s"], rng)
    if game == "ruf":
        return scheme.sign(key, reveal["m"], rng)
    raise ValueError(f"unknown game {game!r}")


class HonestDeleter(VraAdversary):
    name = "honest-deleter"

    def stage1(self, game, scheme, pub, key, rng):
        cert = scheme.delete(key, rng)
        return cert, (_pair(scheme) if game == "ind" else None), None

    def stage2(self, game, scheme, state, reveal, rng):
        if game in ("ind", "pr"):
            return rng.bit()
        if game == "ow":
            return rng.bits(scheme.msg_bits)
        if game == "up":
            return rng.bits(scheme.range_bits)
        if game == "ruf":
            return scheme.blank_signature(rng)
        raise ValueError(f"unknown game {game!r}")


class _KeyKeeper(VraAdversary):
    collapse = False

    def stage1(self, game, scheme, pub, key, rng):
        n, length = scheme.key_shape(key)
        if self.collapse:
            scheme.collapse(key, rng)
        query = _pair(scheme) if game == "ind" else None
        return random_certificate(n, length, rng), query, (_Kept(key, query), pub)

    def stage2(self, game, scheme, state, reveal, rng):
        kept, pub = state
        return _use_key(game, scheme, kept, pub, reveal, rng)


class BasisHoarder(_KeyKeeper):
    name = "basis-hoarder"
    collapse = True


class CertForger(_KeyKeeper):
    name = "cert-forger"


ADVERSARIES = {cls.name: cls for cls in (HonestDeleter, BasisHoarder, CertForger)}


def get_adversary(name: str) -> VraAdversary:
    try:
        return ADVERSARIES[name]()
    except KeyError:
        raise ValueError(f"unknown adversary {name!r}; choose from {sorted(ADVERSARIES)}") from None
