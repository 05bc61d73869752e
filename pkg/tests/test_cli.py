import csv
import io
import json
import subprocess
import sys

import pytest

from conformal_flow.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestVerify:
    def test_default(self, capsys):
        code, out, _ = run(["verify"], capsys)
        table = rows(out)
        assert code == 0 and len(table) == 13
        assert all(r["pass"] == "true" and r["N"] == "64" for r in table)
        assert {"family", "p", "residual", "Q", "E", "H", "newton_tol", "zero_tol"} <= set(table[0])

    def test_tail_warning(self, capsys):
        code, _, err = run(["verify", "--family", "ground", "--p", "0.9", "--N", "32"], capsys)
        assert "tail" in err and code == 1
        code, out, _ = run(["verify", "--family", "ground", "--p", "0.9", "--N", "256"], capsys)
        assert code == 0 and rows(out)[0]["pass"] == "true"

    def test_pair_domain(self, capsys):
        code, _, err = run(["verify", "--family", "pair", "--p", "0.3"], capsys)
        assert code == 1 and "DomainError" in err

    def test_json(self, capsys):
        code, out, _ = run(["verify", "--format", "json"], capsys)
        doc = json.loads(out)
        assert code == 0 and doc["config"]["N"] == 64 and len(doc["rows"]) == 13


class TestScan:
    def test_lowest(self, capsys):
        code, out, _ = run(["scan", "--mode", "lowest", "--range", "0:0.2", "--N", "16"], capsys)
        table = rows(out)
        assert code == 0
        exact = [r["omega_exact"] for r in table]
        assert {"0", "3/20", "2/15", "1/6"} <= set(exact) and len(exact) == 14
        double = [r for r in table if r["omega_exact"] == "1/6"][0]
        assert double["double"] == "true" and double["multiplicity"] == "2"

    def test_bad_range(self, capsys):
        code, _, _ = run(["scan", "--range", "zero:one"], capsys)
        assert code == 2


class TestSpectrum:
    def test_pair_upper(self, capsys):
        code, out, _ = run(["spectrum", "--branch", "pair+", "--param-sweep", "0.05:0.25:5", "--zero-tol", "1e-11"], capsys)
        table = rows(out)
        assert code == 0 and len(table) == 5
        assert all(r["n_plus"] == "1" and r["n_minus"] == "0" for r in table)
        assert {"param", "eig_plus_min1", "eig_plus_min2", "eig_minus_min1", "n_constrained"} <= set(table[0])

    def test_second_mode(self, capsys):
        code, out, _ = run(
            ["spectrum", "--mode", "second", "--m", "2", "--param-sweep", "0.01:0.05:3", "--N", "32"], capsys
        )
        assert code == 0 and all(r["classification"] == "constrained-minimizer" for r in rows(out))


class TestContinue:
    def test_branch_iii(self, capsys):
        code, out, _ = run(["continue", "--branch", "iii", "--eps=-0.002:-0.01:3"], capsys)
        table = rows(out)
        assert code == 0
        mu, eps = float(table[-1]["mu"]), float(table[-1]["eps"])
        assert abs(mu) == pytest.approx(2 * abs(eps) ** 1.5, rel=0.1)

    def test_unknown_branch(self, capsys):
        code, _, err = run(["continue", "--mode", "lowest", "--m", "4", "--branch", "ii", "--eps", "0.01"], capsys)
        assert code == 2 and "usage error" in err

    def test_missing_param(self, capsys):
        assert run(["continue", "--branch", "i"], capsys)[0] == 2


class TestEvolve:
    def test_ground(self, capsys):
        code, out, err = run(["evolve", "--family", "ground", "--p", "0.3", "--T", "10"], capsys)
        table = rows(out)
        assert code == 0 and "drift" in err
        H = [float(r["H"]) for r in table]
        assert max(H) - min(H) <= 1e-9

    def test_random_seeded_json(self, capsys):
        argv = ["evolve", "--family", "random", "--seed", "3", "--T", "1", "--format", "json"]
        doc = json.loads(run(argv, capsys)[1])
        assert doc["config"]["seed"] == 3 and "drift" in doc


class TestProbe:
    def test_probe(self, capsys):
        code, out, _ = run(["probe", "--family", "ground", "--p", "0.3", "--T", "5", "--seed", "1"], capsys)
        assert code == 0 and float(rows(out)[0]["max_gauge_distance"]) <= 2e-2

    def test_needs_stationary(self, capsys):
        assert run(["probe", "--family", "random", "--T", "1"], capsys)[0] == 2


def test_argparse_usage():
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["verify"],
        ["scan", "--range", "0:0.2", "--N", "16"],
        ["evolve", "--family", "random", "--seed", "7", "--T", "1"],
    ],
)
def test_byte_identical_runs(argv, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        subprocess.run([sys.executable, "-m", "conformal_flow", *argv, "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and len(outs[0]) > 0
