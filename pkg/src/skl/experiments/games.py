"""The five leasing security games, run exactly as defined.

Each game: key generation; the adversary's first stage gets the public part
and the leased key and returns a certificate (plus, for IND, a message pair);
if deletion verification rejects, the experiment outputs 0 at once;
otherwise the challenger samples the challenge and reveals ``dvk`` with it;
the adversary's second stage answers and the challenger scores the answer.

Outcomes:

* ``ind``: the adversary's guess ``coin'`` (0 on reject);
* ``ow``: 1 iff the returned message equals the encrypted one;
* ``pr``: the guess ``coin'`` (0 on reject);
* ``up``: 1 iff the returned value equals ``Eval(msk, s*)``;
* ``ruf``: 1 iff the returned signature verifies on ``m*``.

An adversary that raises, or answers with the wrong type, aborts its trial;
the trial is recorded with outcome 0 and the error message.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..encoding import digest
from ..rng import Rng

__all__ = [
    "GAMES",
    "Trial",
    "ContractViolation",
    "run_ind_vra",
    "run_ow_vra",
    "run_pr_vra",
    "run_up_vra",
    "run_ruf_vra",
    "run_game",
]

GAMES = ("ind", "ow", "pr", "up", "ruf")


class ContractViolation(ValueError):
    """The adversary returned something the game cannot accept."""


@dataclass
class Trial:
    game: str
    adversary: str
    keys_digest: str = ""
    theta_digest: str = ""
    cert_digest: str = ""
    verdict: bool = False
    challenge: object = None
    answer: object = None
    coin: int | None = None
    outcome: int = 0
    aborted: bool = False
    error: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def won(self) -> bool:
        """Outcome equals the coin in the guessing games; outcome is 1 otherwise."""
        return self.outcome == (1 if self.coin is None else self.coin)


def _render(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (tuple, list)):
        return [_render(x) for x in v]
    if hasattr(v, "s_prime"):
        return {"s": str(v.s_prime), "r": str(v.r)}
    to_bytes = getattr(v, "to_bytes", None)
    if to_bytes is not None:
        try:
            return "sha256:" + digest(to_bytes())
        except TypeError:  # encoders that need extra arguments
            pass
    return type(v).__name__


def _cert_digest(cert) -> str:
    try:
        return digest(cert.to_bytes())
    except (AttributeError, TypeError, ValueError):  # malformed certificates are still recorded
        return "unencodable"


def _bit(v, what="answer"):
    if v not in (0, 1) or isinstance(v, bool):
        raise ContractViolation(f"{what} must be a bit")
    return int(v)


def _int(v, bits, what="answer"):
    if not isinstance(v, int) or isinstance(v, bool) or v < 0 or v >> bits:
        raise ContractViolation(f"{what} must be a {bits}-bit integer")
    return v


def _start(game, scheme, adversary, rng: Rng, coin):
    chal, adv = rng.spawn(2)
    keys = scheme.keygen(chal)
    theta = getattr(keys.dvk, "theta", 0)
    t = Trial(game, adversary.name, keys.digest, digest(str(theta).encode()), coin=coin)
    return chal, adv, keys, t


def _first_stage(t: Trial, scheme, adversary, keys, adv, with_pair=False):
    out = _call(adversary.stage1, t.game, scheme, keys.pub, keys.key, adv)
    if not (isinstance(out, tuple) and len(out) == 3):
        raise ContractViolation("stage 1 must return (cert, query, state)")
    cert, query, state = out
    t.cert_digest = _cert_digest(cert)
    if with_pair:
        if not (isinstance(query, tuple) and len(query) == 2):
            raise ContractViolation("IND needs a message pair")
        query = tuple(_int(m, scheme.msg_bits, "message") for m in query)
        t.extra["pair"] = _render(query)
    t.verdict = bool(scheme.delvrfy(keys.dvk, cert))
    return query, state


def _call(stage, *args):
    """Invoke an adversary stage; any exception it raises aborts the trial."""
    try:
        return stage(*args)
    except Exception as exc:
        raise ContractViolation(f"adversary raised {type(exc).__name__}: {exc}") from exc


def _abort(t: Trial, exc: ContractViolation) -> Trial:
    t.aborted, t.outcome, t.error = True, 0, str(exc)
    return t


def run_ind_vra(scheme, adversary, coin: int, rng: Rng) -> Trial:
    """Indistinguishability game; outcome is ``coin'`` or 0 on reject."""
    chal, adv, keys, t = _start("ind", scheme, adversary, rng, _bit(coin, "coin"))
    try:
        pair, state = _first_stage(t, scheme, adversary, keys, adv, with_pair=True)
        if not t.verdict:
            return t
        ct = scheme.enc(keys.pub, pair[coin], chal)
        t.challenge = _render(ct)
        ans = _call(adversary.stage2, "ind", scheme, state, {"dvk": keys.dvk, "ct": ct}, adv)
        t.answer = _bit(ans)
        t.outcome = t.answer
    except ContractViolation as exc:
        return _abort(t, exc)
    return t


def run_ow_vra(scheme, adversary, rng: Rng) -> Trial:
    """One-wayness game; a uniform message is encrypted after deletion."""
    chal, adv, keys, t = _start("ow", scheme, adversary, rng, None)
    try:
        _, state = _first_stage(t, scheme, adversary, keys, adv)
        if not t.verdict:
            return t
        m = chal.bits(scheme.msg_bits)
        ct = scheme.enc(keys.pub, m, chal)
        t.challenge = _render(ct)
        ans = _call(adversary.stage2, "ow", scheme, state, {"dvk": keys.dvk, "ct": ct}, adv)
        t.answer = _render(_int(ans, scheme.msg_bits))
        t.outcome = int(ans == m)
    except ContractViolation as exc:
        return _abort(t, exc)
    return t


def run_pr_vra(scheme, adversary, coin: int, rng: Rng) -> Trial:
    """Pseudorandomness game: ``s*`` with either ``Eval(msk, s*)`` or a random value."""
    chal, adv, keys, t = _start("pr", scheme, adversary, rng, _bit(coin, "coin"))
    try:
        _, state = _first_stage(t, scheme, adversary, keys, adv)
        if not t.verdict:
            return t
        s = scheme.sample_input(chal)
        t0 = scheme.eval(keys.secret, s)
        t1 = chal.bits(scheme.range_bits)
        tc = (t0, t1)[coin]
        t.challenge = _render((s, tc))
        ans = _call(adversary.stage2, "pr", scheme, state, {"dvk": keys.dvk, "s": s, "t": tc}, adv)
        t.answer = _bit(ans)
        t.outcome = t.answer
    except ContractViolation as exc:
        return _abort(t, exc)
    return t


def run_up_vra(scheme, adversary, rng: Rng) -> Trial:
    """Unpredictability game: predict ``Eval(msk, s*)`` for a fresh ``s*``."""
    chal, adv, keys, t = _start("up", scheme, adversary, rng, None)
    try:
        _, state = _first_stage(t, scheme, adversary, keys, adv)
        if not t.verdict:
            return t
        s = scheme.sample_input(chal)
        t.challenge = _render(s)
        ans = _call(adversary.stage2, "up", scheme, state, {"dvk": keys.dvk, "s": s}, adv)
        t.answer = _render(_int(ans, scheme.range_bits))
        t.outcome = int(ans == scheme.eval(keys.secret, s))
    except ContractViolation as exc:
        return _abort(t, exc)
    return t


def run_ruf_vra(scheme, adversary, rng: Rng) -> Trial:
    """Random-message unforgeability game: sign a fresh uniform ``m*``."""
    chal, adv, keys, t = _start("ruf", scheme, adversary, rng, None)
    try:
        _, state = _first_stage(t, scheme, adversary, keys, adv)
        if not t.verdict:
            return t
        m = chal.bits(scheme.msg_bits)
        t.challenge = _render(m)
        sig = _call(adversary.stage2, "ruf", scheme, state, {"dvk": keys.dvk, "m": m}, adv)
        try:
            t.answer = "sha256:" + digest(sig.to_bytes(scheme.params.q))
        except (AttributeError, TypeError, ValueError):
            t.answer = type(sig).__name__
        t.outcome = int(scheme.sigvrfy(keys.pub, m, sig))
    except ContractViolation as exc:
        return _abort(t, exc)
    return t


def run_game(game: str, scheme, adversary, rng: Rng) -> Trial:
    """Run one trial; the guessing games draw their coin from ``rng`` first."""
    if game == "ind":
        coin_rng, rest = rng.spawn(2)
        return run_ind_vra(scheme, adversary, coin_rng.bit(), rest)
    if game == "pr":
        coin_rng, rest = rng.spawn(2)
        return run_pr_vra(scheme, adversary, coin_rng.bit(), rest)
    if game == "ow":
        return run_ow_vra(scheme, adversary, rng)
    if game == "up":
        return run_up_vra(scheme, adversary, rng)
    if game == "ruf":
        return run_ruf_vra(scheme, adversary, rng)
    raise ValueError(f"unknown game {game!r}")
