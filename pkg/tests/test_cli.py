import json
import subprocess
import sys

import pytest

from ubacheck import generators
from ubacheck.automata import Alphabet, Nba, with_initial
from ubacheck.cli import main
from ubacheck.hoa import parse_hoa, to_hoa


@pytest.fixture
def files(tmp_path):
    out = {}
    fr = generators.fig1_right()
    for name, nba in {
        "fig1right": fr,
        "fig1right_qa": with_initial(fr, [0]),
        "fig1left": generators.fig1_left(1),
        "ambiguous": Nba.build(
            Alphabet.from_aps(["a"]), 2,
            [(0, frozenset({"a"}), 0), (1, frozenset({"a"}), 1)], [0, 1], [0, 1],
        ),
    }.items():
        p = tmp_path / f"{name}.hoa"
        p.write_text(to_hoa(nba))
        out[name] = str(p)
    assert main(["gen", "blw13", "-o", str(tmp_path / "blw13")]) == 0
    out["blw13"] = str(tmp_path / "blw13.hoa")
    out["blw13_dtmc"] = str(tmp_path / "blw13.dtmc")
    bad = tmp_path / "bad.hoa"
    bad.write_text("HOA: v1\nStates: 1\n--BODY--\nState: 0\n[t & ] 0\n--END--\n")
    out["bad"] = str(bad)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_measure_uniform(files, capsys):
    code, out, _ = run(capsys, "measure", files["fig1right"], "--uniform")
    assert code == 0 and out == "1.000000000000\n"


def test_measure_blw13(files, capsys):
    code, out, _ = run(capsys, "measure", files["blw13"], files["blw13_dtmc"])
    assert code == 0 and out == "1.000000000000\n"


def test_measure_ambiguous(files, capsys):
    code, out, err = run(capsys, "measure", files["ambiguous"], "--uniform")
    assert code == 2 and out == "" and "cycle" in err
    code, out, _ = run(capsys, "measure", files["ambiguous"], "--uniform", "--trust-unambiguous")
    assert code == 0


def test_parse_error(files, capsys):
    code, _, err = run(capsys, "measure", files["bad"], "--uniform")
    assert code == 3 and "parse error" in err


def test_usage_errors(files, capsys):
    assert run(capsys, "measure", files["fig1right"])[0] == 1
    assert run(capsys, "measure", files["fig1right"], "--uniform", "--epsilon", "0.5")[0] == 1
    assert run(capsys, "measure", "/nonexistent.hoa", "--uniform")[0] == 1


def test_numeric_failure_exit_code(files, capsys, monkeypatch):
    from ubacheck import engine

    def boom(*a, **k):
        raise engine.NumericError("forced")

    monkeypatch.setattr("ubacheck.cli.measure", boom)
    assert run(capsys, "measure", files["fig1right"], "--uniform")[0] == 4


def test_json_output(files, capsys):
    code, out, _ = run(capsys, "measure", files["fig1right"], "--uniform", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["probability"] == pytest.approx(1.0)
    assert doc["sccs"][0]["cut_size"] == 2


def test_emit_cut_and_dot(files, capsys, tmp_path):
    dot = tmp_path / "p.dot"
    code, out, err = run(
        capsys, "measure", files["fig1right"], "--uniform", "--emit-cut",
        "--product-dot", str(dot), "--method", "rank",
    )
    assert code == 0 and out == "1.000000000000\n"
    assert "members (2)" in err and "anchor" in err
    assert dot.read_text().startswith("digraph")


def test_gen(capsys):
    code, out, _ = run(capsys, "gen", "complete", "5")
    assert code == 0 and parse_hoa(out).n_states == 193
    code, out, _ = run(capsys, "gen", "complete", "6")
    assert parse_hoa(out).n_states == 449
    code, out, _ = run(capsys, "gen", "fig1-right")
    nba = parse_hoa(out)
    assert nba.n_states == 2 and nba.transition_count() == 4
    code, out, _ = run(capsys, "gen", "blw13")
    assert "--END--" in out and "dtmc 4 4" in out
    assert run(capsys, "gen", "complete")[0] == 1
    assert run(capsys, "gen", "complete", "0")[0] == 1


def test_oracle(files, capsys):
    code, out, _ = run(capsys, "oracle", files["fig1right"], "--uniform")
    assert code == 0 and out == "1 (= 1.000000000000)\n"
    code, out, _ = run(capsys, "oracle", files["fig1right_qa"], "--uniform")
    assert out.startswith("1/2 ")
    code, _, err = run(capsys, "oracle", files["fig1left"], "--uniform")
    assert code == 1 and "strongly connected" in err


def test_check_and_almost_universal(files, capsys):
    assert run(capsys, "check", files["fig1right"])[:2] == (0, "unambiguous\n")
    assert run(capsys, "check", files["ambiguous"])[:2] == (2, "ambiguous\n")
    assert run(capsys, "almost-universal", files["fig1right"])[1] == "true\n"
    assert run(capsys, "almost-universal", files["fig1left"])[1] == "false\n"


def test_simulate(files, capsys):
    code, out, _ = run(capsys, "simulate", files["fig1left"], "--uniform", "--samples", "500")
    lines = out.split()
    assert code == 0 and lines[0] == "lower" and lines[2] == "upper"


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "ubacheck", "measure", files["fig1right"], "--uniform"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "1.000000000000\n"


def test_log_env(files, monkeypatch):
    env = {"UBA_CHECK_LOG": "INFO", "PATH": "/usr/bin:/bin"}
    proc = subprocess.run(
        [sys.executable, "-m", "ubacheck", "measure", files["fig1right"], "--uniform"],
        capture_output=True, text=True, check=False, env=env,
    )
    assert proc.returncode == 0 and "product" in proc.stderr
