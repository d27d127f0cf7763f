"""Acceptance suite: one group of checks per numbered criterion.

Each test carries ``@pytest.mark.criterion(k)``; the terminal summary prints
one PASS/FAIL line per criterion with the measured quantities.
"""
import io
import math
import subprocess
import sys
import time
from collections import Counter
from contextlib import redirect_stdout
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import chi2_contingency

import statevector as sv
from scripted import enumerate_runs
from skl.bb84 import STRATEGIES, BB84String, run_cdbb84
from skl.cli import main as cli_main
from skl.cs import CsSignature, cs_constrain, cs_qsign, cs_setup, cs_sign, cs_vrfy, describe, key_payload_len, message
from skl.deletion import random_certificate
from skl.ds_skl import ds_del, ds_delvrfy, ds_keygen, ds_payload_len, ds_shadow_targets, ds_sign, ds_sigvrfy
from skl.experiments import ExperimentSpec, sweep
from skl.lattice.evaluation import builtin_circuits, eval_f, eval_fx, table_check
from skl.lattice.gadget import GadgetParams, gadget, gadget_invert, safe_radius
from skl.lattice.gaussian import dgauss_coset, rho
from skl.lattice.params import preset, sigma_lower, validate_params
from skl.lattice.trapdoor import invert_lwe, lwe_error_bound, m_star, sampre, trapgen
from skl.lattice.zq import ceil_log2, inf_norm, mul_mod, zq
from skl.pke_base import REFERENCE, ZERO_NOISE
from skl.pke_skl import skl_dec, skl_del, skl_delvrfy, skl_enc, skl_keygen
from skl.prf_skl import shadow_targets, upf_delvrfy, upf_eval, upf_keygen, upf_leval
from skl.qsim import Collapsed, Superposed, computational_measure, hadamard_measure, oracle_measure
from skl.rng import Rng, trial_rng
from skl.teprf import teprf_eval, teprf_keygen

ROOT = Path(__file__).resolve().parents[1]


def sigma3(p, N):
    return 3 * math.sqrt(p * (1 - p) / N)


# -- 1: simulator against the statevector oracle ---------------------------

def all_shapes(max_len=3):
    for L in range(max_len + 1):
        for b, p in product((0, 1), range(1 << L)):
            yield Collapsed(b, p, L)
        for p0, p1, ph in product(range(1 << L), range(1 << L), (0, 1)):
            yield Superposed(p0, p1, ph, L)


def vec(reg):
    if isinstance(reg, Collapsed):
        return sv.collapsed(reg.bit, reg.payload, reg.length)
    return sv.superposed(reg.payload0, reg.payload1, reg.phase, reg.length)


ORACLES = {"parity": lambda b, p: bin(p).count("1") & 1, "control": lambda b, p: b}


@pytest.mark.criterion(1)
def test_simulator_matches_statevector(detail):
    N = 10 ** 5
    rng = Rng(101)
    worst, cases = 0.0, 0
    t0 = time.perf_counter()
    for reg in all_shapes(3):
        v = vec(reg)
        L = reg.length
        emp = Counter((o.e, o.d) for o in (hadamard_measure(reg, rng) for _ in range(N)))
        tvs = [sv.tv({k: c / N for k, c in emp.items()}, sv.hadamard_dist(v, L))]
        emp = Counter(computational_measure(reg, rng)[0] for _ in range(N))
        tvs.append(sv.tv({k: c / N for k, c in emp.items()}, sv.computational_dist(v)))
        for f in ORACLES.values():
            emp = Counter(oracle_measure(reg, f, rng)[0] for _ in range(N))
            exact = {k: p for k, (p, _) in sv.oracle_dist(v, f).items()}
            tvs.append(sv.tv({k: c / N for k, c in emp.items()}, exact))
        worst = max(worst, *tvs)
        cases += len(tvs)
    elapsed = time.perf_counter() - t0
    detail(f"{cases} cases, max TV {worst:.4f}, {elapsed:.0f}s")
    assert worst < 0.02
    assert elapsed < 300


# -- 2: PKE-SKL pipelines ---------------------------------------------------

@pytest.mark.criterion(2)
@pytest.mark.parametrize("label,params", [("reference", REFERENCE), ("zero-noise", ZERO_NOISE)])
def test_pke_pipelines(label, params, detail):
    N, n = 10 ** 4, 32
    ok = accepted = 0
    t0 = time.perf_counter()
    for t in range(N):
        rng = trial_rng(202, t)
        pk, dk, dvk = skl_keygen(n, params, rng)
        m = rng.bits(n)
        ok += skl_dec(dk, skl_enc(pk, m, rng), rng) == m
        accepted += skl_delvrfy(dvk, skl_del(dk, rng))
    elapsed = time.perf_counter() - t0
    detail(f"{label}: success {ok / N:.4f}, deletion accepted {accepted}/{N}, {elapsed:.0f}s")
    assert accepted == N
    if params is ZERO_NOISE:
        assert ok == N
    else:
        assert ok / N >= 0.999


# -- 3: forged-certificate rate ------------------------------------------------

def _pke_dvk(h, rng):
    dvk = skl_keygen(h, ZERO_NOISE, rng, theta=(1 << h) - 1)[2]
    return dvk.dk_len, lambda c: skl_delvrfy(dvk, c)


def _upf_dvk(h, rng):
    dvk = upf_keygen(h, 16, rng, theta=(1 << h) - 1)[2]
    return dvk.key_len, lambda c: upf_delvrfy(dvk, c)


def _ds_dvk(h, rng):
    p = preset("micro")
    vks = ds_keygen(h, p, rng, theta=(1 << h) - 1)[1]
    return ds_payload_len(p), lambda c: ds_delvrfy(vks.dvk, c)


DVK_MAKERS = {"pke": _pke_dvk, "upf": _upf_dvk, "ds": _ds_dvk}


@pytest.mark.criterion(3)
@pytest.mark.parametrize("h", [4, 8])
@pytest.mark.parametrize("scheme", ["pke", "upf", "ds"])
def test_random_certificate_rate(scheme, h, detail):
    N = 10 ** 5
    rng = Rng(300 + h)
    length, check = DVK_MAKERS[scheme](h, rng)
    acc = sum(check(random_certificate(h, length, rng)) for _ in range(N))
    p = 2.0 ** -h
    detail(f"{scheme} h={h}: {acc / N:.5f} vs {p:.5f} +- {sigma3(p, N):.5f}")
    assert abs(acc / N - p) <= sigma3(p, N)


# -- 4: certified-deletion strategies --------------------------------------------

@pytest.mark.criterion(4)
@pytest.mark.parametrize("name", ["honest-deleter", "basis-hoarder"])
def test_cdbb84_rates_n16(name, detail):
    N, n = 10 ** 5, 16
    theta = 0xFFF0  # 4 computational, 12 Hadamard positions
    comp, had = 4, 12
    p = 2.0 ** -(comp if name == "honest-deleter" else had)
    adv = STRATEGIES[name]()
    rng = Rng(404)
    wins = sum(run_cdbb84(n, adv, rng, state=BB84String(rng.bits(n), theta, n)).won for _ in range(N))
    detail(f"{name}: {wins / N:.6f} vs {p:.6f} +- {sigma3(p, N):.6f}")
    assert abs(wins / N - p) <= sigma3(p, N)


@pytest.mark.criterion(4)
def test_cdbb84_exhaustive_small_n(detail):
    checked = 0
    for n in (1, 2, 3):
        for name, cls in STRATEGIES.items():
            for x, theta in product(range(1 << n), repeat=2):
                bb = BB84String(x, theta, n)
                dist = enumerate_runs(lambda r: run_cdbb84(n, cls(), r, state=bb).won)
                assert dist.get(1, Fraction(0)) == sv.cd_win_probability(name, x, theta, n)
                checked += 1
    detail(f"{checked} (strategy, x, theta) cases exact")


# -- 5: TEPRF ---------------------------------------------------------------------

@pytest.mark.criterion(5)
def test_teprf_exhaustive_and_random(detail):
    t0 = time.perf_counter()
    rng = Rng(505)
    points = 0
    for tab in (False, True):
        for ell in range(1, 13):
            target = rng.bits(ell)
            kp = teprf_keygen(ell, target, rng, tabulated=tab)
            for s in range(1 << ell):
                differ = teprf_eval(kp.sk0, s) != teprf_eval(kp.sk1, s)
                assert differ == (s == target)
            points += 1 << ell
    ell = 32
    target = rng.bits(ell)
    kp = teprf_keygen(ell, target, rng)
    assert teprf_eval(kp.sk0, target) != teprf_eval(kp.sk1, target)
    for _ in range(10 ** 5):
        s = rng.bits(ell)
        assert (teprf_eval(kp.sk0, s) != teprf_eval(kp.sk1, s)) == (s == target)
    elapsed = time.perf_counter() - t0
    detail(f"{points} exhaustive points + 1e5 at l=32, {elapsed:.1f}s")
    assert elapsed < 60


# -- 6: leased evaluation ------------------------------------------------------------

@pytest.mark.criterion(6)
def test_leased_evaluation(detail):
    N, n, ell = 10 ** 4, 16, 16
    rng = Rng(606)
    msk, sk, dvk = upf_keygen(n, ell, rng)
    targets = shadow_targets(msk)
    mask = (1 << ell) - 1
    failures = off_target = 0
    for _ in range(N):
        s = rng.bits(n * ell)
        hit = any((s >> (i * ell)) & mask == t for i, t in enumerate(targets))
        before = sk.to_bytes()
        failures += upf_leval(sk, s, rng) != upf_eval(msk, s)
        if not hit:
            off_target += 1
            assert sk.to_bytes() == before
    mu = N * n * 2.0 ** -ell
    budget = mu + 3 * math.sqrt(mu)
    detail(f"{failures} failures (budget {budget:.2f}), {off_target} off-target evaluations left the key intact")
    assert failures <= budget


# -- 7: lattice identities ----------------------------------------------------------------

def _check_circuit(c, q, n, m, rng):
    B = rng.np.integers(0, q, (n, m * c.ell))
    x = [1] + [rng.bit() for _ in range(c.ell - 1)]
    G = gadget(GadgetParams(n, m, q))
    H = eval_f(c, B, q, n, m)
    Hx = eval_fx(c, x, B, q, n, m)
    bound = (2 * m) ** c.depth
    assert inf_norm(H) <= bound and inf_norm(Hx) <= bound
    xG = np.concatenate([v * G for v in x], axis=1)
    lhs = mul_mod(zq(B - xG, q), Hx, q)
    rhs = zq(mul_mod(B, H, q) - c.evaluate(x) * G, q)
    assert np.array_equal(lhs, rhs)


@pytest.mark.criterion(7)
def test_evaluation_identities(detail):
    rng = Rng(707)
    q, n = 257, 1
    m = n * ceil_log2(q)
    circuits = builtin_circuits(4) + builtin_circuits(17)
    circuits += [table_check(4, s, t) for s in range(16) for t in (0, 1)]
    for c in circuits:
        for _ in range(100):
            _check_circuit(c, q, n, m, rng)
    q2 = int(preset("small").q)
    for c in builtin_circuits(4):
        for _ in range(5):
            _check_circuit(c, q2, 1, ceil_log2(q2), rng)
    detail(f"{len(circuits)} circuits x 100 random B exact")


@pytest.mark.criterion(7)
def test_gadget_invert_exhaustive_tiny(detail):
    total = 0
    for q in range(3, 18):
        K = ceil_log2(q)
        p = GadgetParams(1, K, q)
        g = gadget(p)[0]
        B = safe_radius(q)
        for s in range(q):
            for e in product(range(-B, B + 1), repeat=K):
                y = np.mod(s * g + np.array(e, dtype=np.int64), q)
                assert gadget_invert(p, y) == ([s], list(e))
                total += 1
    detail(f"gadget_invert exact on {total} tiny cases")


@pytest.mark.criterion(7)
def test_invert_lwe_in_bound(detail):
    rng = Rng(708)
    n, m, q = 2, 8, int(preset("small").q)
    k = n * ceil_log2(q)
    A = rng.np.integers(0, q, (n, m))
    R = rng.np.integers(-1, 2, (m, k))
    M = np.concatenate([A, zq(mul_mod(A, R, q) + gadget(GadgetParams(n, k, q)), q)], axis=1)
    bound = lwe_error_bound(q, k, m, inf_norm(R))
    for _ in range(1000):
        s = rng.np.integers(0, q, n)
        e = rng.np.integers(-bound, bound + 1, m + k)
        y = zq(mul_mod(s.reshape(1, -1), M, q).ravel() + e, q)
        s2, e2 = invert_lwe(A, R, y, q)
        assert np.array_equal(s2, s) and np.array_equal(e2, e)
    detail(f"invert_lwe exact on 1000 samples with |e| <= {bound}")


@pytest.mark.criterion(7)
def test_sampler_outputs_membership_and_norm(detail):
    rng = Rng(709)
    count = 0
    for q in (257, int(preset("small").q), int(preset("toy").q)):
        n = 1
        td = trapgen(n, m_star(n, q) + 2, q, rng)
        V = zq(np.array([[rng.below(q) for _ in range(50)]], dtype=object), q)
        X = sampre(td, V, rng)
        assert inf_norm(X) <= td.beta_sam
        assert np.array_equal(mul_mod(td.A, X, q), V)
        count += X.shape[1]
    q, sigma, m = 3329, 20.0, 16
    A = rng.np.integers(0, q, (1, m))
    X = dgauss_coset(A, [17], q, sigma, rng=rng, count=2000)
    assert np.all(np.mod(X @ A.T, q) == 17)
    assert inf_norm(X) <= math.ceil(math.log2(m) ** 2) * sigma
    td = trapgen(1, 80, int(preset("small").q), rng)
    Y = dgauss_coset(td.A, [5], td.q, 1e6, td.R, rng, count=500)
    assert np.all(mul_mod(td.A, Y.T, td.q) == 5)
    assert inf_norm(Y) <= math.ceil(math.log2(80) ** 2) * 1e6
    detail(f"{count} SamPre columns and 2500 coset samples in range")


# -- 8: Gaussian tails and the tiny-coset oracle ---------------------------------------------

@pytest.mark.criterion(8)
def test_gaussian_tails(detail):
    q, sigma, m, N = 3329, 20.0, 16, 10 ** 5
    rng = Rng(808)
    A = rng.np.integers(0, q, (1, m))
    X = dgauss_coset(A, [rng.below(q)], q, sigma, rng=rng, count=N)
    norms = np.abs(X).max(axis=1)
    parts = []
    for r in (1, 2, 3):
        emp = float(np.mean(norms > r * sigma))
        bound = 2 * m * math.exp(-math.pi * r * r)
        p = min(bound, 1.0)
        parts.append(f"r={r}: {emp:.5f} <= {bound:.5f}")
        assert emp <= bound + sigma3(p, N)
    detail("; ".join(parts))


@pytest.mark.criterion(8)
def test_tiny_coset_matches_enumeration(detail):
    q, sigma, m, N = 53, 6.0, 3, 10 ** 5
    rng = Rng(809)
    A = rng.np.integers(1, q, (1, m))
    y = 11
    lo, hi = -((q - 1) // 2), q // 2
    pts = [x for x in product(range(lo, hi + 1), repeat=m) if (np.dot(A[0], x) - y) % q == 0]
    w = np.array([float(np.prod(rho(np.array(x), sigma))) for x in pts])
    exact = dict(zip(pts, w / w.sum()))
    X = dgauss_coset(A, [y], q, sigma, rng=rng, count=N)
    emp = Counter(map(tuple, X.tolist()))
    dist = sv.tv({k: c / N for k, c in emp.items()}, exact)
    detail(f"TV {dist:.4f} over {len(pts)} coset points")
    assert dist < 0.05


# -- 9: constrained signatures at toy parameters ---------------------------------------------

TABLE = 0b1100_1010_0111_0001


@pytest.fixture(scope="module")
def toy_keys():
    p = preset("toy")
    rng = Rng(909)
    vk, msk = cs_setup(p, rng)
    return p, vk, msk, cs_constrain(msk, describe(TABLE, p), rng), rng


@pytest.mark.criterion(9)
def test_cs_roundtrips_and_rejections(toy_keys, detail):
    p, vk, msk, sk, rng = toy_keys
    t0 = time.perf_counter()
    for _ in range(100):
        s = rng.below(1 << p.table_bits)
        msg = message(s, (TABLE >> s) & 1, p)
        sig = cs_sign(sk, msg, rng)
        assert cs_vrfy(vk, msg, sig)
        assert not cs_vrfy(vk, msg, CsSignature(np.zeros(2 * p.m, dtype=object)))
        long = sig.x.astype(object).copy()
        long[rng.below(2 * p.m)] += p.q  # still in the kernel, far too long
        assert not cs_vrfy(vk, msg, CsSignature(long))
    detail(f"100 roundtrips accepted; zero and long signatures rejected ({time.perf_counter() - t0:.1f}s)")


@pytest.mark.criterion(9)
def test_cs_qsign_register_unchanged_and_branch_indistinguishable(toy_keys, detail):
    p, vk, msk, sk, rng = toy_keys
    other = cs_constrain(msk, describe(TABLE ^ 0b100, p), rng)  # differs at s = 2 only
    L = key_payload_len(p)
    reg = Superposed(sk.payload(), other.payload(), 0, L)
    before = reg.to_bytes()
    msg = message(9, (TABLE >> 9) & 1, p)
    for _ in range(20):
        out, sig = cs_qsign(reg, vk, msg, rng)
        assert out.to_bytes() == before and cs_vrfy(vk, msg, sig)
    N = 10 ** 4
    norms = []
    for b in (0, 1):
        _, sigs = cs_qsign(reg, vk, msg, rng, force_branch=b, count=N)
        assert reg.to_bytes() == before
        norms.append(np.array([math.sqrt(float(sum(int(v) ** 2 for v in s.x))) for s in sigs]))
    edges = np.quantile(np.concatenate(norms), np.linspace(0, 1, 11))
    edges[0], edges[-1] = -np.inf, np.inf
    table = np.array([np.histogram(x, bins=edges)[0] for x in norms])
    pval = chi2_contingency(table)[1]
    detail(f"register bytes unchanged; branch norm histograms chi-square p = {pval:.3f}")
    assert pval > 0.01


# -- 10: DS-SKL static keys ---------------------------------------------------------------------

@pytest.mark.criterion(10)
def test_ds_static_keys(detail):
    p = preset("small")
    tb = p.table_bits
    reps, msgs, n = 100, 50, 4
    for rep in range(reps):
        rng = trial_rng(1010, rep)
        sk, vks = ds_keygen(n, p, rng)
        targets = ds_shadow_targets(sk)
        before = sk.to_bytes()
        for _ in range(msgs):
            m = 0
            for i in range(n):
                s = rng.below((1 << tb) - 1)
                m |= (s + (s >= targets[i])) << (i * tb)
            _, sig = ds_sign(sk, m, rng)
            assert ds_sigvrfy(vks.svk, m, sig)
            assert sk.to_bytes() == before
        assert ds_delvrfy(vks.dvk, ds_del(sk, rng))
    detail(f"{reps} keys x {msgs} off-target signatures, key bytes fixed, all deletions accepted")


# -- 11: parameter validator ---------------------------------------------------------------------

def _fixtures():
    toy = preset("toy")
    lower = sigma_lower(toy.n, toy.m, toy.q, toy.ell, toy.beta_sam, toy.d)
    import sympy as sp

    need_ver = int(sp.ceiling(sp.log(toy.m, 2) ** 2)) * toy.sigma
    need_sis = 4 * toy.m ** 2 * toy.ell * toy.beta_sam * (2 * toy.m) ** toy.d * toy.beta_ver
    return {
        1: toy.with_(beta_sam=toy.beta_sam - 1),
        2: toy.with_(m=toy.m - 1),
        3: toy.with_(sigma=int(sp.ceiling(lower)) - 1),
        4: toy.with_(sigma=sp.sqrt(8 * toy.m)),
        5: toy.with_(beta_ver=need_ver - 1),
        6: toy.with_(beta_sis=need_sis - 1),
        7: toy.with_(beta_sis=toy.q),
    }


@pytest.mark.criterion(11)
def test_toy_preset_passes_all(detail):
    rep = validate_params(preset("toy"))
    for line in rep.lines():
        print(line)
    assert rep.ok
    detail(f"toy q={rep.params.q} sigma={rep.params.sigma}: 7/7 pass")


@pytest.mark.criterion(11)
@pytest.mark.parametrize("k", range(1, 8))
def test_targeted_failures(k, detail):
    failed = validate_params(_fixtures()[k]).failed()
    detail(f"fixture {k} flags {failed}")
    assert k in failed


# -- 12: determinism ---------------------------------------------------------------------------------

def _cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(argv)
    return code, buf.getvalue()


DEMOS = [
    ["demo", "pke", "--seed", "12", "--n", "8"],
    ["demo", "prf", "--seed", "12", "--n", "4", "--ell", "8"],
    ["demo", "upf", "--seed", "12", "--n", "4", "--ell", "8"],
    ["demo", "ds", "--seed", "12", "--n", "2", "--preset", "small"],
    ["demo", "cs", "--seed", "12", "--preset", "toy"],
    ["demo", "bb84", "--seed", "12", "--n", "8"],
]


@pytest.mark.criterion(12)
def test_cli_demos_reproducible(tmp_path, detail):
    for argv in DEMOS:
        runs = []
        for k in range(2):
            out_dir = tmp_path / f"{argv[1]}{k}"
            code, text = _cli(argv + ["--out", str(out_dir)])
            assert code == 0
            files = {f.name: f.read_bytes() for f in sorted(out_dir.iterdir())}
            runs.append((text, files))
        assert runs[0] == runs[1]
    detail(f"{len(DEMOS)} CLI demos byte-identical with artifacts")


@pytest.mark.criterion(12)
def test_demo_scripts_reproducible(detail):
    scripts = sorted((ROOT / "demos").glob("*.py"))
    assert scripts
    for path in scripts:
        outs = [subprocess.run([sys.executable, str(path)], capture_output=True, text=True, check=True).stdout
                for _ in range(2)]
        assert outs[0] == outs[1] and outs[0]
    detail(f"{len(scripts)} demo scripts reproducible")


@pytest.mark.criterion(12)
def test_sweeps_reproducible(detail):
    specs = [ExperimentSpec("ind", 20, 5, n=4), ExperimentSpec("pr", 20, 5, n=4, ell=6),
             ExperimentSpec("ruf", 4, 5, n=1, preset="small"), ExperimentSpec("cdbb84", 50, 5, n=6)]
    for spec in specs:
        a, b = sweep(spec), sweep(spec)
        assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
    code1, csv1 = _cli(["experiment", "--game", "up", "--n", "4", "--ell", "6", "--trials", "10", "--seed", "3"])
    code2, csv2 = _cli(["experiment", "--game", "up", "--n", "4", "--ell", "6", "--trials", "10", "--seed", "3"])
    assert code1 == code2 == 0 and csv1 == csv2
    detail(f"{len(specs)} sweeps identical in CSV and JSON")


@pytest.mark.criterion(12)
def test_keygen_fixtures_reproducible(detail):
    def fixtures(seed):
        out = []
        pk, dk, dvk = skl_keygen(8, REFERENCE, Rng(seed))
        out += [pk.to_bytes(), dk.to_bytes(), dvk.to_bytes()]
        msk, sk, udvk = upf_keygen(4, 8, Rng(seed))
        out += [msk.to_bytes(), sk.to_bytes(), udvk.to_bytes()]
        dsk, vks = ds_keygen(2, preset("small"), Rng(seed))
        out += [dsk.to_bytes(), vks.svk_bytes(), vks.dvk.to_bytes()]
        vk, _ = cs_setup(preset("toy"), Rng(seed))
        out.append(vk.to_bytes())
        return out

    a, b = fixtures(77), fixtures(77)
    assert a == b
    assert a != fixtures(78)
    detail(f"{len(a)} key encodings identical across runs")
