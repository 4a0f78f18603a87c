import json
import re
import subprocess
import sys
from fractions import Fraction

import pytest

from dsnkit.cli import main
from dsnkit.io import parse_certificate

TRIANGLE = "scss 3 6 3 bidirected\ne 0 1 1\ne 1 0 1\ne 1 2 1\ne 2 1 1\ne 0 2 1\ne 2 0 1\nr 0 1 2\n"


@pytest.fixture
def tri(tmp_path):
    path = tmp_path / "tri.dsn"
    path.write_text(TRIANGLE)
    return path


def _cost(out: str) -> Fraction:
    return Fraction(re.search(r"cost=(\S+)", out).group(1))


def test_solve_oracle(tri, tmp_path, capsys):
    sol = tmp_path / "tri.sol"
    assert main(["solve", str(tri), "oracle", "-o", str(sol)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("oracle cost=3 feasible=true time_ms=")
    assert sol.read_text().startswith("cost 3\n")


def test_solve_scss_2approx_within_bound(tri, capsys):
    assert main(["solve", str(tri), "scss-2approx"]) == 0
    assert _cost(capsys.readouterr().out) <= 6


@pytest.mark.parametrize("alg", ["dw-st", "sf-fpt", "tw", "sf-2approx", "bidsn-4approx",
                                 "bidsn-2approx", "planar-xp", "planar-pas", "biscss-fpt"])
def test_every_algorithm_runs(tri, alg, capsys):
    assert main(["solve", str(tri), alg]) == 0
    out = capsys.readouterr().out
    assert out.startswith(f"{alg} cost=") and "feasible=true" in out


def test_exit_codes(tri, tmp_path, capsys):
    bad = tmp_path / "bad.dsn"
    bad.write_text("dsn 2 1 1\ne 0 1 1\nd 1 0\n")
    assert main(["solve", str(bad), "oracle"]) == 4
    assert main(["solve", str(tri), "no-such-solver"]) == 2
    assert main(["solve", str(tri), "dw-st", "--cap-terminals", "2"]) == 3
    assert main(["solve", str(tri), "oracle", "--cap-vertices", "2"]) == 3
    broken = tmp_path / "broken.dsn"
    broken.write_text("dsn 2 1 1\ne 0 9 1\nd 0 1\n")
    assert main(["solve", str(broken), "oracle"]) == 1
    capsys.readouterr()


def test_generate_hamcycle(tmp_path, capsys):
    out = tmp_path / "c5.dsn"
    assert main(["generate", "hamcycle", "--cycle", "5", "-o", str(out)]) == 0
    assert parse_certificate((tmp_path / "c5.dsn.cert").read_text()).budget == 5
    assert main(["solve", str(out), "oracle"]) == 0
    assert "cost=5 " in capsys.readouterr().out


def test_generate_gadget(tmp_path, capsys):
    out = tmp_path / "g.dsn"
    assert main(["generate", "gadget", "--n", "2", "--M", "1", "-o", str(out)]) == 0
    assert out.read_text().splitlines()[0].startswith("dsn 12 28 0")
    assert parse_certificate((tmp_path / "g.dsn.cert").read_text()).budget == 7
    capsys.readouterr()


def test_generate_unknown(tmp_path, capsys):
    assert main(["generate", "sat", "-o", str(tmp_path / "x.dsn")]) == 2
    capsys.readouterr()


@pytest.fixture
def gridtiling(tmp_path, capsys):
    inst = tmp_path / "gt.dsn"
    assert main(["generate", "gridtiling", "--k", "1", "--n", "2", "--M", "1", "--yes", "-o", str(inst)]) == 0
    capsys.readouterr()
    cert = parse_certificate((tmp_path / "gt.dsn.cert").read_text())
    assert cert.budget == 43
    return inst, tmp_path / "gt.dsn.cert", cert.witness


def test_verify_witness(gridtiling, tmp_path, capsys):
    inst, cert, witness = gridtiling
    sol = tmp_path / "w.sol"
    sol.write_text("".join(f"e {i}\n" for i in sorted(witness)))
    assert main(["verify", str(inst), str(sol), str(cert), "--structure"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("feasible") and "matches-budget" in out and "planar=yes" in out


def test_verify_superset_and_tampered(gridtiling, tmp_path, capsys):
    inst, cert, witness = gridtiling
    extra = next(i for i in range(200) if i not in witness)
    sol = tmp_path / "more.sol"
    sol.write_text("".join(f"e {i}\n" for i in sorted(witness | {extra})))
    assert main(["verify", str(inst), str(sol), str(cert)]) == 0
    assert "feasible, cost=44, cost above budget" in capsys.readouterr().out
    sol.write_text("".join(f"e {i}\n" for i in sorted(witness)[1:]))
    assert main(["verify", str(inst), str(sol), str(cert)]) == 1
    assert capsys.readouterr().out.startswith("infeasible")


def test_bench_outputs(tmp_path, capsys):
    assert main(["bench", "gadget-dichotomy"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split("\t")[:3] == ["instance", "check", "value"]
    assert all(line.endswith("ok") for line in lines[1:])
    assert main(["bench", "savings", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {r["status"] for r in rows} == {"ok"}
    assert main(["bench", "nope"]) == 2
    capsys.readouterr()


def test_bench_small_sweeps(capsys):
    assert main(["bench", "ratios", "--seed", "1", "--count", "40"]) == 0
    assert main(["bench", "equivalence", "--seed", "7", "--count", "40"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out


def test_decomp(tri, capsys):
    assert main(["decomp", str(tri), "--epsilon", "1", "--r-cap", "2"]) == 0
    out = capsys.readouterr().out
    assert "feasible=true" in out and "max_part_terminals=2" in out


def test_module_entry_point(tri):
    proc = subprocess.run([sys.executable, "-m", "dsnkit", "solve", str(tri), "oracle"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "cost=3 feasible=true" in proc.stdout
