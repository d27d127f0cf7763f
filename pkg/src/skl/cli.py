"""Command-line front end: ``demo``, ``params`` and ``experiment``.

Exit codes: 0 success, 1 correctness failure, 2 usage error. Flags are long
form only. ``--config FILE`` reads a JSON object whose keys are flag names
with dashes replaced by underscores (``{"seed": 7, "n": 16}``); flags given on
the command line override the file. ``demo`` and ``experiment`` require a
seed. ``SKL_THREADS`` caps the number of worker threads of a sweep.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import sympy as sp

from . import __version__
from .encoding import digest

__all__ = ["main", "build_parser", "CONFIG_KEYS"]

SCHEMES = ("pke", "prf", "upf", "ds", "cs", "bb84")

#: accepted --config keys per command
CONFIG_KEYS = {
    "demo": {"scheme", "n", "ell", "preset", "seed", "noise", "messages", "out"},
    "params": {"preset", "n", "m", "q", "sigma", "beta_sam", "beta_ver", "beta_sis", "d", "ell", "iota",
               "format", "require_valid"},
    "experiment": {"game", "scheme", "n", "ell", "preset", "noise", "trials", "seed", "adversary",
                   "format", "output"},
}


class UsageError(Exception):
    pass


def _emit(msg: str = "") -> None:
    print(msg)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skl", description="Secure key leasing toolkit.", allow_abbrev=False)
    p.add_argument("--version", action="version", version=f"skl {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("demo", help="run keygen, use, delete and verify for one scheme", allow_abbrev=False)
    d.add_argument("scheme", nargs="?", choices=SCHEMES)
    d.add_argument("--config")
    d.add_argument("--seed", type=int)
    d.add_argument("--n", type=int)
    d.add_argument("--ell", type=int)
    d.add_argument("--preset")
    d.add_argument("--noise", choices=("reference", "zero"))
    d.add_argument("--messages", type=int, help="messages to process before deletion")
    d.add_argument("--out", help="directory for the binary artifacts")

    q = sub.add_parser("params", help="check the seven lattice parameter conditions", allow_abbrev=False)
    q.add_argument("--config")
    q.add_argument("--preset")
    for name in ("n", "m", "d", "ell", "iota", "beta-sam"):
        q.add_argument(f"--{name}", type=int)
    for name in ("q", "sigma", "beta-ver", "beta-sis"):
        q.add_argument(f"--{name}", help="integer or exact expression such as sqrt(8*202)")
    q.add_argument("--format", choices=("text", "json"))
    q.add_argument("--require-valid", action="store_true", default=None,
                   help="exit 1 when a condition fails")

    e = sub.add_parser("experiment", help="sweep a security game over the reference adversaries",
                       allow_abbrev=False)
    e.add_argument("--config")
    e.add_argument("--game")
    e.add_argument("--scheme")
    e.add_argument("--trials", type=int)
    e.add_argument("--seed", type=int)
    e.add_argument("--n", type=int)
    e.add_argument("--ell", type=int)
    e.add_argument("--preset")
    e.add_argument("--noise", choices=("reference", "zero"))
    e.add_argument("--adversary", action="append", help="repeat to select several (default: all)")
    e.add_argument("--format", choices=("csv", "json"))
    e.add_argument("--output")
    return p


def _merge(args: argparse.Namespace) -> dict:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(cfg) - CONFIG_KEYS[args.command]
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    out = dict(cfg)
    for k, v in vars(args).items():
        if k in ("command", "config"):
            continue
        if v is not None:
            out[k] = v
    return out


def _need_seed(cfg: dict) -> int:
    seed = cfg.get("seed")
    if seed is None:
        raise UsageError("--seed is required")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise UsageError("seed must be a non-negative integer")
    return seed


def _int_opt(cfg, key, default, lo=1):
    v = cfg.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool) or v < lo:
        raise UsageError(f"{key} must be an integer >= {lo}")
    return v


# -- demo -----------------------------------------------------------------

class _Trace:
    def __init__(self, out_dir):
        self.ok = True
        self.out = Path(out_dir) if out_dir else None
        if self.out:
            self.out.mkdir(parents=True, exist_ok=True)

    def artifact(self, label: str, data: bytes):
        _emit(f"  {label:<22} {len(data):>9} bytes  sha256:{digest(data)}")
        if self.out:
            (self.out / f"{label}.skl").write_bytes(data)

    def check(self, label: str, ok: bool, accept="ACCEPT", reject="REJECT"):
        _emit(f"  {label:<22} {accept if ok else reject}")
        self.ok &= bool(ok)


def _demo_pke(cfg, rng, tr):
    from .pke_base import REFERENCE, ZERO_NOISE
    from .pke_skl import skl_check, skl_dec, skl_del, skl_enc, skl_keygen

    n = _int_opt(cfg, "n", 16)
    params = ZERO_NOISE if cfg.get("noise") == "zero" else REFERENCE
    pk, dk, dvk = skl_keygen(n, params, rng)
    tr.artifact("pk", pk.to_bytes())
    tr.artifact("dvk", dvk.to_bytes())
    before = dk.to_bytes()
    tr.artifact("dk", before)
    for j in range(_int_opt(cfg, "messages", 3)):
        m = rng.bits(n)
        ct = skl_enc(pk, m, rng)
        tr.artifact(f"ct{j}", ct.to_bytes())
        tr.check(f"dec{j}", skl_dec(dk, ct, rng) == m, "OK", "WRONG")
    tr.check("key unchanged", dk.to_bytes() == before, "YES", "NO")
    cert = skl_del(dk, rng)
    tr.artifact("cert", cert.to_bytes())
    tr.check("verdict", skl_check(dvk, cert).name == "ACCEPT")


def _demo_prf(cfg, rng, tr, one_bit: bool):
    from .prf_skl import PrfInput, prf_eval, prf_leval, upf_del, upf_delvrfy, upf_eval, upf_keygen, upf_leval

    n, ell = _int_opt(cfg, "n", 16), _int_opt(cfg, "ell", 16)
    msk, sk, dvk = upf_keygen(n, ell, rng)
    tr.artifact("msk", msk.to_bytes())
    tr.artifact("dvk", dvk.to_bytes())
    before = sk.to_bytes()
    tr.artifact("sk", before)
    for j in range(_int_opt(cfg, "messages", 3)):
        s = rng.bits(n * ell)
        if one_bit:
            inp = PrfInput(s, rng.bits(n))
            ok = prf_leval(sk, inp, rng) == prf_eval(msk, inp)
        else:
            ok = upf_leval(sk, s, rng) == upf_eval(msk, s)
        tr.check(f"leval{j}", ok, "OK", "WRONG")
    tr.check("key unchanged", sk.to_bytes() == before, "YES", "NO")
    cert = upf_del(sk, rng)
    tr.artifact("cert", cert.to_bytes("upf_cert"))
    tr.check("verdict", upf_delvrfy(dvk, cert))


def _demo_ds(cfg, rng, tr):
    from .ds_skl import ds_del, ds_delvrfy, ds_keygen, ds_shadow_targets, ds_sign, ds_sigvrfy
    from .lattice.params import preset

    n = _int_opt(cfg, "n", 4)
    p = preset(cfg.get("preset", "toy"))
    sk, vks = ds_keygen(n, p, rng)
    tr.artifact("svk", vks.svk_bytes())
    tr.artifact("dvk", vks.dvk.to_bytes())
    before = sk.to_bytes()
    tr.artifact("sigk", before)
    tb = p.table_bits
    targets = ds_shadow_targets(sk)
    _emit("  (messages avoid each leg's hidden target; an on-target block would disturb that leg)")
    for j in range(_int_opt(cfg, "messages", 3)):
        m = 0
        for i in range(n):
            s = rng.below((1 << tb) - 1)
            m |= (s + (s >= targets[i])) << (i * tb)
        _, sig = ds_sign(sk, m, rng)
        tr.artifact(f"sig{j}", sig.to_bytes(p.q))
        tr.check(f"sigvrfy{j}", ds_sigvrfy(vks.svk, m, sig))
    tr.check("key unchanged", sk.to_bytes() == before, "YES", "NO")
    cert = ds_del(sk, rng)
    tr.artifact("cert", cert.to_bytes("ds_cert"))
    tr.check("verdict", ds_delvrfy(vks.dvk, cert))


def _demo_cs(cfg, rng, tr):
    from .cs import cs_constrain, cs_setup, cs_sign, cs_vrfy, describe, message
    from .lattice.params import preset

    p = preset(cfg.get("preset", "toy"))
    vk, msk = cs_setup(p, rng)
    tr.artifact("vk", vk.to_bytes())
    tb = p.table_bits
    table = rng.bits(1 << tb)
    sk = cs_constrain(msk, describe(table, p), rng)
    tr.artifact("constrained key", sk.to_bytes())
    for j in range(_int_opt(cfg, "messages", 3)):
        s = rng.below(1 << tb)
        msg = message(s, (table >> s) & 1, p)
        sig = cs_sign(sk, msg, rng)
        tr.artifact(f"sig{j}", sig.to_bytes(p.q))
        tr.check(f"vrfy{j}", cs_vrfy(vk, msg, sig))


def _demo_bb84(cfg, rng, tr):
    from .bb84 import STRATEGIES, expected_win, run_cdbb84, sample_bb84

    n = _int_opt(cfg, "n", 8)
    bb = sample_bb84(n, rng)
    _emit(f"  x={bb.x:0{n}b}  theta={bb.theta:0{n}b}  (bit i is column n-1-i)")
    for name, cls in STRATEGIES.items():
        out = run_cdbb84(n, cls(), rng, state=bb)
        _emit(f"  {name:<16} won={out.won}  exact win probability {expected_win(name, bb.theta, n):.6g}")


def cmd_demo(cfg: dict) -> int:
    from .rng import Rng

    scheme = cfg.get("scheme")
    if scheme not in SCHEMES:
        raise UsageError(f"choose a scheme from {list(SCHEMES)}")
    seed = _need_seed(cfg)
    rng = Rng(seed)
    tr = _Trace(cfg.get("out"))
    _emit(f"demo {scheme} seed={seed}")
    if scheme == "pke":
        _demo_pke(cfg, rng, tr)
    elif scheme in ("prf", "upf"):
        _demo_prf(cfg, rng, tr, one_bit=scheme == "prf")
    elif scheme == "ds":
        _demo_ds(cfg, rng, tr)
    elif scheme == "cs":
        _demo_cs(cfg, rng, tr)
    else:
        _demo_bb84(cfg, rng, tr)
    _emit("result: " + ("OK" if tr.ok else "FAILED"))
    return 0 if tr.ok else 1


# -- params ---------------------------------------------------------------

_EXPR = re.compile(r"^[0-9a-z_+\-*/^(). ]+$")


def _exact(text, key):
    if isinstance(text, int) and not isinstance(text, bool):
        return sp.Integer(text)
    if not isinstance(text, str) or not _EXPR.match(text):
        raise UsageError(f"{key}: expected an integer or arithmetic expression")
    try:
        v = sp.sympify(text.replace("^", "**"), locals={"sqrt": sp.sqrt, "log": sp.log, "pi": sp.pi})
    except (sp.SympifyError, TypeError, SyntaxError):
        raise UsageError(f"{key}: cannot parse {text!r}") from None
    if not v.is_number or not v.is_real:
        raise UsageError(f"{key}: not a real number")
    return v


def cmd_params(cfg: dict) -> int:
    from .lattice.params import preset, validate_params

    try:
        base = preset(cfg.get("preset", "toy"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    kw = {}
    for key in ("n", "m", "d", "ell", "iota", "beta_sam"):
        if key in cfg:
            kw[key] = _int_opt(cfg, key, None)
    for key in ("q", "sigma", "beta_ver", "beta_sis"):
        if key in cfg:
            v = _exact(cfg[key], key)
            if key == "q":
                if not v.is_Integer or v < 2:
                    raise UsageError("q must be an integer >= 2")
                v = int(v)
            kw[key] = v
    p = base.with_(name=base.name if not kw else "custom", **kw) if kw else base
    report = validate_params(p)
    if cfg.get("format", "text") == "json":
        _emit(report.to_json())
    else:
        _emit(f"parameters {p.name}: n={p.n} m={p.m} q={p.q} d={p.d} ell={p.ell} iota={p.iota}")
        for line in report.lines():
            _emit(line)
        _emit("all conditions PASS" if report.ok else f"failed conditions: {report.failed()}")
    return 1 if cfg.get("require_valid") and not report.ok else 0


# -- experiment -----------------------------------------------------------

def cmd_experiment(cfg: dict) -> int:
    from .experiments import ExperimentSpec, sweep

    seed = _need_seed(cfg)
    game = cfg.get("game")
    if game is None:
        raise UsageError("--game is required")
    advs = cfg.get("adversary")
    if isinstance(advs, str):
        advs = [advs]
    try:
        spec = ExperimentSpec(
            game=str(game).lower().replace("-vra", ""),
            trials=_int_opt(cfg, "trials", 100),
            seed=seed,
            scheme=cfg.get("scheme"),
            n=cfg.get("n"),
            ell=cfg.get("ell"),
            preset=cfg.get("preset"),
            noise=cfg.get("noise", "reference"),
            **({"adversaries": tuple(advs)} if advs else {}),
        )
        result = sweep(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = result.to_json() + "\n" if cfg.get("format", "csv") == "json" else result.to_csv()
    if cfg.get("output"):
        Path(cfg["output"]).write_text(text, encoding="utf-8")
        _emit(f"wrote {cfg['output']}")
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {"demo": cmd_demo, "params": cmd_params, "experiment": cmd_experiment}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _merge(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"skl {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
