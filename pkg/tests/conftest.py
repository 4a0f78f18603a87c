from __future__ import annotations

import pytest

from dsnkit.graph import Graph

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    """Record one pass/fail line per criterion; printed in the terminal summary."""

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def bi(n: int, edges, labels=None) -> Graph:
    """Bidirected graph from undirected (u, v, w) triples."""
    arcs = []
    for u, v, w in edges:
        arcs += [(u, v, w), (v, u, w)]
    return Graph.build(n, arcs, labels)


def directed(n: int, arcs) -> Graph:
    return Graph.build(n, arcs)


def undirected(n: int, edges) -> Graph:
    return Graph.build(n, edges, directed=False)
