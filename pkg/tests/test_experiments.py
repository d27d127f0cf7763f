"""Security games, reference adversaries and sweeps."""
import json

import pytest

from skl.experiments import (
    ADVERSARIES,
    ContractViolation,
    ExperimentSpec,
    VraAdversary,
    get_adversary,
    make_scheme,
    max_threads,
    run_game,
    run_ind_vra,
    run_ow_vra,
    run_pr_vra,
    run_ruf_vra,
    run_up_vra,
    sweep,
)
from skl.bb84 import mean_win
from skl.rng import Rng, trial_rng

SMALL = {"pke": dict(n=4), "prf": dict(n=4, ell=6), "upf": dict(n=4, ell=6), "ds": dict(n=1, preset_name="small")}


def scheme(name):
    return make_scheme(name, **SMALL[name])


@pytest.mark.parametrize("game,name", [("ind", "pke"), ("ow", "pke"), ("pr", "prf"), ("up", "upf"), ("ruf", "ds")])
def test_honest_deleter_is_always_accepted(game, name):
    s = scheme(name)
    for t in range(5):
        tr = run_game(game, s, get_adversary("honest-deleter"), trial_rng(1, t))
        assert tr.verdict and not tr.aborted
        if game in ("ow", "ruf"):
            assert tr.outcome == 0


@pytest.mark.parametrize("game,name", [("ow", "pke"), ("up", "upf"), ("ruf", "ds")])
def test_kept_key_wins_whenever_forged_certificate_passes(game, name):
    s = scheme(name)
    runs = [run_game(game, s, get_adversary("cert-forger"), trial_rng(2, t)) for t in range(60)]
    assert any(r.verdict for r in runs)
    for r in runs:
        assert r.outcome == int(r.verdict)


def test_reject_forces_zero_output_in_guessing_games():
    s = scheme("pke")
    for t in range(40):
        tr = run_ind_vra(s, get_adversary("cert-forger"), 1, trial_rng(3, t))
        if not tr.verdict:
            assert tr.outcome == 0 and tr.answer is None
        else:
            assert tr.outcome == 1


class Raising(VraAdversary):
    name = "raising"

    def stage1(self, game, scheme, pub, key, rng):
        raise RuntimeError("boom")


class BadAnswer(VraAdversary):
    name = "bad-answer"

    def stage1(self, game, scheme, pub, key, rng):
        cert = scheme.delete(key, rng)
        return cert, ((0, 1) if game == "ind" else None), None

    def stage2(self, game, scheme, state, reveal, rng):
        return "seven"


class BadPair(VraAdversary):
    name = "bad-pair"

    def stage1(self, game, scheme, pub, key, rng):
        return scheme.delete(key, rng), (0, 1 << 40), None


def test_contract_violations_abort_trials():
    s = scheme("pke")
    for adv, runner in ((Raising(), run_ow_vra), (BadAnswer(), run_ow_vra)):
        tr = runner(s, adv, Rng(0))
        assert tr.aborted and tr.outcome == 0 and tr.error
    tr = run_ind_vra(s, BadPair(), 0, Rng(0))
    assert tr.aborted and "message" in tr.error
    tr = run_pr_vra(scheme("prf"), BadAnswer(), 1, Rng(0))
    assert tr.aborted and tr.outcome == 0
    with pytest.raises(ContractViolation):
        run_ind_vra(s, BadAnswer(), 2, Rng(0))


def test_ruf_rejects_garbage_signature_without_abort():
    s = scheme("ds")
    tr = run_ruf_vra(s, BadAnswer(), Rng(1))
    assert not tr.aborted and tr.outcome == 0 and tr.answer == "str"


def test_up_game_scores_exact_value():
    s = scheme("upf")
    tr = run_up_vra(s, get_adversary("honest-deleter"), Rng(5))
    assert tr.verdict and tr.outcome in (0, 1)


def test_unknown_names():
    with pytest.raises(ValueError):
        get_adversary("oracle")
    with pytest.raises(ValueError):
        run_game("cpa", scheme("pke"), get_adversary("honest-deleter"), Rng(0))
    with pytest.raises(ValueError):
        ExperimentSpec("ind", 0, 1)
    with pytest.raises(ValueError):
        ExperimentSpec("ind", 5, 1, adversaries=("oracle",))
    with pytest.raises(ValueError):
        make_scheme("pke", n=4, noise="loud")
    assert set(ADVERSARIES) == {"honest-deleter", "basis-hoarder", "cert-forger"}


def test_sweep_is_deterministic_and_thread_independent(monkeypatch):
    spec = ExperimentSpec("ow", 30, 7, n=4)
    monkeypatch.setenv("SKL_THREADS", "1")
    a = sweep(spec)
    monkeypatch.setenv("SKL_THREADS", "4")
    assert max_threads() == 4
    b = sweep(spec)
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
    rows = a.to_csv().splitlines()
    assert rows[0] == "game,scheme,n,adversary,trials,accepted,aborted,wins,win_rate,ci_low,ci_high"
    assert len(rows) == 1 + len(ADVERSARIES)
    data = json.loads(a.to_json())
    assert data["spec"]["seed"] == 7 and len(data["trials"]) == 30 * len(ADVERSARIES)


def test_sweep_rows_and_intervals():
    res = sweep(ExperimentSpec("up", 40, 3, n=2, ell=6), adversaries=["cert-forger"])
    (row,) = res.rows
    assert row.accepted == row.wins  # a kept key answers correctly off target
    lo, hi = row.interval()
    assert lo <= row.rate <= hi


def test_cdbb84_sweep():
    N, n = 2000, 4
    res = sweep(ExperimentSpec("cdbb84", N, 1, n=n))
    for r in res.rows:
        p = mean_win(r.adversary, n)
        assert abs(r.rate - p) <= 3 * (p * (1 - p) / N) ** 0.5


def test_max_threads_validation(monkeypatch):
    monkeypatch.delenv("SKL_THREADS", raising=False)
    assert max_threads() == 1
    for bad in ("zero", "0", "-2"):
        monkeypatch.setenv("SKL_THREADS", bad)
        with pytest.raises(ValueError):
            max_threads()
