from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from dtmoments.cli import CSV_COLUMNS, main, resolve_seed


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sniady_prints_value(capsys):
    code, out, _ = run(capsys, "sniady", "--k", "2", "--n", "2")
    assert code == 0
    body = json.loads(out)
    assert body["reports"][0]["details"][0]["value"] == "2/15"
    code, out, _ = run(capsys, "sniady", "--k", "2", "--n", "2", "--format", "pretty")
    assert "2/15" in out and out.rstrip().endswith("PASS")


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dtmoments.cli", "sniady", "--k", "2", "--n", "2", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "2/15" in proc.stdout


def test_mc_word_is_byte_identical(capsys):
    args = ("mc-word", "--word", "T*,T", "--n", "200", "--trials", "100", "--seed", "42")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    assert json.loads(first)["config"]["seed"] == 42


def test_mc_word_with_target(capsys):
    code, out, _ = run(capsys, "mc-word", "--word", "T*,T", "--n", "100", "--trials", "200", "--seed", "3", "--target", "0.5")
    assert code == 0
    code, _, _ = run(capsys, "mc-word", "--word", "T*,T", "--n", "100", "--trials", "200", "--seed", "3", "--target", "0.9")
    assert code == 1


def test_seed_resolution(monkeypatch):
    monkeypatch.delenv("DTMOMENTS_SEED", raising=False)
    assert resolve_seed(7) == (7, "flag")
    seed, source = resolve_seed(None)
    assert source == "entropy" and seed > 0
    monkeypatch.setenv("DTMOMENTS_SEED", "99")
    assert resolve_seed(None) == (99, "env")


def test_entropy_seed_is_echoed(capsys, monkeypatch):
    monkeypatch.delenv("DTMOMENTS_SEED", raising=False)
    _, out, _ = run(capsys, "hankel", "--which", "a", "--n", "3", "--trials", "3")
    cfg = json.loads(out)["config"]
    assert cfg["seed_source"] == "entropy"
    _, again, _ = run(capsys, "hankel", "--which", "a", "--n", "3", "--trials", "3", "--seed", str(cfg["seed"]))
    assert json.loads(again)["reports"] == json.loads(out)["reports"]


def test_injected_perturbation_fails(capsys):
    code, out, err = run(capsys, "suite", "--level", "smoke", "--inject")
    assert code == 1
    assert "q_consistency" in err
    assert json.loads(out)["pass"] is False


def test_smoke_suite_passes(capsys):
    code, out, _ = run(capsys, "suite", "--level", "smoke")
    assert code == 0
    assert all(r["pass"] for r in json.loads(out)["reports"])


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["sniady", "--k", "2", "--n", "2", "--nope"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["genfun", "--k", "2", "--s", "a,b"])
    assert exc.value.code == 2


def test_domain_errors_exit_2(capsys):
    code, _, err = run(capsys, "sniady", "--k", "0", "--n", "2")
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "genfun", "--k", "2", "--s", "0.5")
    assert code == 2
    code, _, _ = run(capsys, "mc-word", "--word", "Q", "--n", "10", "--trials", "2", "--seed", "1")
    assert code == 2


def test_csv_roundtrip(capsys):
    code, out, _ = run(capsys, "moments", "--kind", "q", "--lambda-sq", "1/2", "--nmax", "4", "--format", "csv")
    assert code == 0
    assert "\r" not in out
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_COLUMNS
    seed = str(json.loads(rows[0]["config"])["seed"])
    _, js, _ = run(capsys, "moments", "--kind", "q", "--lambda-sq", "1/2", "--nmax", "4", "--seed", seed)
    body = json.loads(js)["reports"][0]
    details = json.loads(rows[0]["details"])
    assert details == body["details"]
    assert details[2]["tau"] == body["details"][2]["tau"]
    assert "/" in details[2]["tau"]
    assert rows[0]["pass"] == "true" and rows[0]["max_residual"] == ""


def test_csv_numeric_values_roundtrip(capsys):
    _, out, _ = run(capsys, "genfun", "--k", "2", "--s", "0.05", "--x", "0.5", "--format", "csv", "--seed", "1")
    row = next(csv.DictReader(io.StringIO(out)))
    _, js, _ = run(capsys, "genfun", "--k", "2", "--s", "0.05", "--x", "0.5", "--seed", "1")
    rep = json.loads(js)["reports"][0]
    assert float(row["max_residual"]) == rep["max_residual"]
    assert json.loads(row["params"]) == rep["params"]


@pytest.mark.parametrize(
    "argv",
    [
        ["moments", "--kind", "p", "--k", "3", "--nmax", "5"],
        ["moments", "--kind", "f", "--a", "2", "--b", "1", "--nmax", "3"],
        ["cumulants", "--lambda-sq", "1/2", "--order", "8"],
        ["genfun", "--k", "3", "--s", "0.02,0.01", "--x", "1"],
        ["resolvent-k1", "--sigma", "-0.1", "--lambda-sq", "1", "--x", "0"],
        ["fixedpoint", "--k", "2", "--mu", "0,10", "--grid", "11"],
        ["s-fixedpoint", "--a", "2", "--b", "1", "--lambda", "0.3", "--sigma", "-0.3"],
        ["hankel", "--which", "b", "--n", "4", "--trials", "20", "--seed", "5"],
        ["lemma57", "--j", "2", "--deg", "6", "--trials", "3", "--seed", "5", "--random-degree"],
        ["brown", "--epsilon", "1", "--n", "128", "--trials", "2", "--seed", "4", "--tol", "0.15"],
        ["log-energy", "--r", "1", "--pairs", "200000", "--seed", "3"],
        ["entropy", "--epsilon", "1"],
        ["resolvent", "--model", "t", "--params", "a=2", "--n", "64", "--trials", "20", "--seed", "2"],
    ],
)
def test_subcommands_pass(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err + out
    body = json.loads(out)
    assert body["pass"] and body["config"]["subcommand"] == argv[0]


def test_brown_eigenvalue_csv_and_grid(capsys, tmp_path):
    path = tmp_path / "eigs.csv"
    code, out, err = run(
        capsys, "brown", "--epsilon", "1", "--n", "96", "--trials", "1", "--seed", "4",
        "--tol", "0.2", "--grid", "15", "--eig-csv", str(path),
    )
    rows = list(csv.reader(path.open(newline="")))
    assert rows[0] == ["re", "im"] and len(rows) == 97
    body = json.loads(out)
    assert [r["name"] for r in body["reports"]] == ["brown_radial", "brown_grid_density"]


def test_timing_flag(capsys):
    _, out, _ = run(capsys, "entropy", "--epsilon", "1")
    assert "elapsed_ms" not in out
    _, out, _ = run(capsys, "entropy", "--epsilon", "1", "--timing")
    assert "elapsed_ms" in out
