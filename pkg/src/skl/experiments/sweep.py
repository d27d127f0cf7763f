"""Seeded sweeps over games and adversaries with CSV and JSON output.

Trial ``t`` of adversary number ``a`` runs on ``trial_rng(seed, t, a)``, so
results do not depend on scheduling. Trials run on a thread pool whose size
is capped by the ``SKL_THREADS`` environment variable (default 1); results
are collected in trial order.
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from scipy.stats import binomtest

from ..bb84 import STRATEGIES as CD_STRATEGIES, run_cdbb84
from ..rng import trial_rng
from .adversaries import ADVERSARIES, get_adversary
from .games import GAMES, run_game
from .schemes import make_scheme

__all__ = ["ExperimentSpec", "SweepRow", "SweepResult", "sweep", "max_threads", "DEFAULT_SCHEME", "ALL_GAMES"]

ALL_GAMES = GAMES + ("cdbb84",)

#: scheme each game runs on unless the ExperimentSpec names one
DEFAULT_SCHEME = {"ind": "pke", "ow": "pke", "pr": "prf", "up": "upf", "ruf": "ds", "cdbb84": "bb84"}


@dataclass(frozen=True)
class ExperimentSpec:
    game: str
    trials: int
    seed: int
    scheme: str | None = None
    n: int | None = None
    ell: int | None = None
    preset: str | None = None
    noise: str = "reference"
    adversaries: tuple = tuple(ADVERSARIES)

    def __post_init__(self):
        if self.game not in ALL_GAMES:
            raise ValueError(f"unknown game {self.game!r}; choose from {list(ALL_GAMES)}")
        if int(self.trials) < 1:
            raise ValueError("trials must be at least 1")
        object.__setattr__(self, "adversaries", tuple(self.adversaries))
        if self.scheme is None:
            object.__setattr__(self, "scheme", DEFAULT_SCHEME[self.game])
        if self.game == "cdbb84":
            bad = [a for a in self.adversaries if a not in CD_STRATEGIES]
        else:
            bad = [a for a in self.adversaries if a not in ADVERSARIES]
        if bad:
            raise ValueError(f"unknown adversaries {bad}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["adversaries"] = list(self.adversaries)
        return d


@dataclass(frozen=True)
class SweepRow:
    game: str
    scheme: str
    n: int
    adversary: str
    trials: int
    accepted: int
    aborted: int
    wins: int

    @property
    def rate(self) -> float:
        return self.wins / self.trials

    def interval(self) -> tuple:
        ci = binomtest(self.wins, self.trials).proportion_ci(confidence_level=0.95, method="exact")
        return ci.low, ci.high


@dataclass
class SweepResult:
    spec: ExperimentSpec
    rows: list
    transcripts: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["game", "scheme", "n", "adversary", "trials", "accepted", "aborted", "wins",
                    "win_rate", "ci_low", "ci_high"])
        for r in self.rows:
            lo, hi = r.interval()
            w.writerow([r.game, r.scheme, r.n, r.adversary, r.trials, r.accepted, r.aborted, r.wins,
                        f"{r.rate:.6f}", f"{lo:.6f}", f"{hi:.6f}"])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"spec": self.spec.to_dict(), "trials": self.transcripts}, indent=1, sort_keys=True)


def max_threads() -> int:
    """Worker cap from ``SKL_THREADS`` (default 1)."""
    raw = os.environ.get("SKL_THREADS", "").strip()
    if not raw:
        return 1
    try:
        v = int(raw)
    except ValueError:
        raise ValueError(f"SKL_THREADS must be a positive integer, got {raw!r}") from None
    if v < 1:
        raise ValueError("SKL_THREADS must be a positive integer")
    return v


def _map(fn, items):
    k = min(max_threads(), len(items))
    if k <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))


def _cd_rows(spec: ExperimentSpec):
    n = spec.n or 16
    rows, trans = [], []
    for a, name in enumerate(spec.adversaries):
        adv = CD_STRATEGIES[name]()

        def one(t, adv=adv, a=a):
            return run_cdbb84(n, adv, trial_rng(spec.seed, t, a))

        outs = _map(one, list(range(spec.trials)))
        wins = sum(o.won for o in outs)
        rows.append(SweepRow("cdbb84", "bb84", n, name, spec.trials, spec.trials, 0, wins))
        trans += [{"trial": t, "adversary": name, "y": str(o.y), "z": str(o.z), "outcome": o.won}
                  for t, o in enumerate(outs)]
    return rows, trans


def sweep(spec: ExperimentSpec, adversaries=None) -> SweepResult:
    """Run ``spec.trials`` trials per adversary; deterministic under ``spec.seed``."""
    if adversaries is not None:
        spec = ExperimentSpec(**{**spec.to_dict(), "adversaries": tuple(adversaries)})
    if spec.game == "cdbb84":
        rows, trans = _cd_rows(spec)
        return SweepResult(spec, rows, trans)
    scheme = make_scheme(spec.scheme, n=spec.n, ell=spec.ell, preset_name=spec.preset, noise=spec.noise)
    rows, trans = [], []
    for a, name in enumerate(spec.adversaries):
        adv = get_adversary(name)

        def one(t, adv=adv, a=a):
            return run_game(spec.game, scheme, adv, trial_rng(spec.seed, t, a))

        results = _map(one, list(range(spec.trials)))
        rows.append(SweepRow(spec.game, spec.scheme, scheme.n, name, spec.trials,
                             sum(r.verdict for r in results), sum(r.aborted for r in results),
                             sum(r.won for r in results)))
        for t, r in enumerate(results):
            rec = asdict(r)
            rec["trial"] = t
            trans.append(rec)
    return SweepResult(spec, rows, trans)
