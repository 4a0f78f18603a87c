"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run standalone with ``python3 tests/test_acceptance.py`` or through pytest.
"""

import time
from collections import Counter
from fractions import Fraction

from dsnkit.cli import main
from dsnkit.sweep import SUITES, render, run_suite, run_sweep, summary

SEED = 1
SWEEP_COUNT = 500


def _failures(rows):
    return [r for r in rows if not r.ok]


def _report(acceptance_line, number, title, rows, extra=""):
    bad = _failures(rows)
    detail = f"{len(rows)} rows, {len(bad)} failures{extra}"
    if bad:
        detail += "; first: " + render(bad[:3]).splitlines()[1]
    acceptance_line(number, title, not bad, detail)
    return bad


def test_criterion_01_gadget_dichotomy(acceptance_line):
    start = time.perf_counter()
    rows = run_suite("gadget-dichotomy")
    elapsed = time.perf_counter() - start
    bad = _report(acceptance_line, 1, "gadget dichotomy", rows, f", {elapsed:.2f}s")
    assert {r.instance for r in rows} == {"U1", "U2"}
    assert not bad
    assert elapsed < 10


def test_criterion_02_reduction_certificates(acceptance_line):
    start = time.perf_counter()
    rows = run_suite("certificates")
    elapsed = time.perf_counter() - start
    bad = _report(acceptance_line, 2, "reduction certificates", rows, f", {elapsed:.2f}s total")
    values = {(r.instance, r.check): r.value for r in rows}
    assert values[("hamcycle-C5", "oracle")] == 5
    assert values[("hamcycle-K1,3", "oracle")] > 4
    assert values[("gridtiling-k1n2", "witness")] == 43
    assert values[("mcsi-dsn-l2", "witness")] == 1
    assert values[("mcsi-scss-l2", "witness")] == 2 * (1 + Fraction(1, 32))
    assert not bad
    assert elapsed < 60


def test_criterion_03_oracle_equivalence(acceptance_line):
    rows = run_sweep("equivalence", SEED, SWEEP_COUNT)
    per_check = Counter(r.check.split(":")[0] for r in rows)
    bad = _report(acceptance_line, 3, "oracle equivalence", rows, f" over {SWEEP_COUNT} instances")
    for solver in ("dw-st", "dw-dst", "sf-fpt", "tw", "biscss-fpt", "planar-xp"):
        assert per_check[solver] > 0, solver
    assert not bad


def test_criterion_04_approximation_ratios(acceptance_line):
    rows = run_sweep("ratios", SEED, SWEEP_COUNT)
    checks = {r.check for r in rows}
    bad = _report(acceptance_line, 4, "approximation ratios", rows)
    assert {"bidsn-4approx", "bidsn-2approx", "scss-2approx", "sf-2approx", "planar-pas"} <= checks
    assert not bad


def test_criterion_05_planar_treewidth(acceptance_line):
    rows = run_sweep("planar-treewidth", SEED, SWEEP_COUNT)
    bad = _report(acceptance_line, 5, "planar treewidth bound", rows)
    assert rows and not bad


def test_criterion_06_tau_chop_division(acceptance_line):
    rows = run_suite("division", SEED)
    bad = _report(acceptance_line, 6, "tau-chop division", rows, " over 100 graphs")
    assert len({r.instance for r in rows}) == 100
    assert not bad


def test_criterion_07_decomposition(acceptance_line):
    rows = run_sweep("decomposition", SEED, SWEEP_COUNT) + run_sweep("decomposition", SEED + 1, SWEEP_COUNT, 8)
    ratios = [r.value for r in rows if r.check.endswith("-ratio") and r.value is not None]
    worst = max(ratios, default=Fraction(1))
    bad = _report(acceptance_line, 7, "decomposition", rows, f", worst ratio {float(worst):.3f}")
    assert any(r.check.endswith("-ratio-full") for r in rows)
    assert not bad


def test_criterion_08_polytree_decomposition(acceptance_line):
    rows = run_sweep("polytree", SEED, SWEEP_COUNT)
    bad = _report(acceptance_line, 8, "poly-tree decomposition", rows)
    assert rows and not bad


def test_criterion_09_savings(acceptance_line):
    rows = run_suite("savings")
    bad = _report(acceptance_line, 9, "savings on bidirected cycles", rows)
    values = {(r.instance, r.check): r.value for r in rows}
    for n in (4, 5, 6):
        assert values[(f"C{n}", "biscss-fpt")] == n
        assert values[(f"C{n}", "doubled-steiner-tree")] == 2 * (n - 1)
    assert not bad


def test_criterion_10_bench_determinism(acceptance_line, tmp_path, capsys):
    mismatched = []
    for suite in SUITES:
        outputs = []
        for attempt in range(2):
            out = tmp_path / f"{suite}-{attempt}.tsv"
            main(["bench", suite, "--seed", "3", "--count", "60", "-o", str(out)])
            outputs.append(out.read_bytes())
        if outputs[0] != outputs[1] or not outputs[0]:
            mismatched.append(suite)
    capsys.readouterr()
    acceptance_line(10, "bench determinism", not mismatched,
                    f"{len(SUITES)} suites run twice, mismatched: {mismatched or 'none'}")
    assert not mismatched


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
