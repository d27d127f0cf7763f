"""The command-line front end."""
import json
import subprocess
import sys

import pytest

from skl.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("scheme", ["pke", "prf", "upf", "cs", "bb84"])
def test_demo_runs_and_is_deterministic(scheme, capsys):
    argv = ["demo", scheme, "--seed", "3", "--n", "4"]
    if scheme in ("prf", "upf"):
        argv += ["--ell", "8"]
    if scheme == "cs":
        argv = ["demo", "cs", "--seed", "3", "--preset", "small"]
    code, out, _ = run(argv, capsys)
    assert code == 0 and out.rstrip().endswith("result: OK")
    assert run(argv, capsys)[1] == out


def test_demo_ds_writes_artifacts(tmp_path, capsys):
    code, out, _ = run(["demo", "ds", "--seed", "1", "--n", "2", "--preset", "small",
                        "--messages", "2", "--out", str(tmp_path)], capsys)
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "cert.skl" in names and "sig0.skl" in names
    assert all((tmp_path / f).read_bytes()[:4] == b"SKL1" for f in names)


def test_seed_is_required(capsys):
    code, _, err = run(["demo", "pke"], capsys)
    assert code == 2 and "--seed" in err
    code, _, err = run(["experiment", "--game", "ow", "--trials", "2"], capsys)
    assert code == 2


def test_usage_errors_exit_two(capsys):
    assert run([], capsys)[0] == 2
    assert run(["demo", "pke", "--seed", "x"], capsys)[0] == 2
    assert run(["demo", "--seed", "1"], capsys)[0] == 2
    assert run(["experiment", "--seed", "1", "--game", "nope"], capsys)[0] == 2
    assert run(["params", "--preset", "nope"], capsys)[0] == 2
    assert run(["params", "--sigma", "__import__('os')"], capsys)[0] == 2
    assert run(["demo", "pke", "--se", "1"], capsys)[0] == 2  # no abbreviations


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 5, "n": 4, "messages": 1}))
    code, out, _ = run(["demo", "pke", "--config", str(cfg)], capsys)
    assert code == 0 and "seed=5" in out
    code, out, _ = run(["demo", "pke", "--config", str(cfg), "--seed", "6"], capsys)
    assert code == 0 and "seed=6" in out
    cfg.write_text(json.dumps({"seed": 5, "colour": 1}))
    assert run(["demo", "pke", "--config", str(cfg)], capsys)[0] == 2
    cfg.write_text("[1]")
    assert run(["demo", "pke", "--config", str(cfg)], capsys)[0] == 2
    assert run(["demo", "pke", "--config", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_params_text_json_and_require_valid(capsys):
    code, out, _ = run(["params", "--preset", "toy"], capsys)
    assert code == 0 and "all conditions PASS" in out and out.count("PASS") >= 7
    code, out, _ = run(["params", "--preset", "toy", "--format", "json"], capsys)
    assert json.loads(out)["ok"] is True
    code, out, _ = run(["params", "--preset", "toy", "--sigma", "sqrt(8*202)"], capsys)
    assert code == 0 and "failed conditions" in out
    assert run(["params", "--preset", "toy", "--sigma", "sqrt(8*202)", "--require-valid"], capsys)[0] == 1


def test_experiment_csv_json_and_output(tmp_path, capsys):
    argv = ["experiment", "--game", "ow", "--n", "4", "--trials", "10", "--seed", "2"]
    code, out, _ = run(argv, capsys)
    assert code == 0 and out.startswith("game,scheme,n,adversary")
    assert run(argv, capsys)[1] == out
    code, out, _ = run(argv + ["--format", "json", "--adversary", "cert-forger"], capsys)
    data = json.loads(out)
    assert data["spec"]["adversaries"] == ["cert-forger"] and len(data["trials"]) == 10
    dest = tmp_path / "o.csv"
    assert run(argv + ["--output", str(dest)], capsys)[0] == 0
    assert dest.read_text().startswith("game,")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "skl", "params", "--preset", "micro"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "condition 7" in r.stdout
