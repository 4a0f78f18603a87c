"""Approximation algorithms for Steiner forest, bidirected DSN and SCSS."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .errors import ContractViolation, NoFeasibleNetwork
from .exact import dreyfus_wagner_dst, steiner_forest_fpt
from .graph import (
    Graph,
    Instance,
    Pattern,
    Solution,
    check_feasible,
    is_bidirected,
    make_solution,
    reachable,
    tie_break_key,
    underlying_undirected,
    undirected_edge_groups,
)
from .structure import prune_minimal


def _forest_pattern(pairs: Iterable[tuple[int, int]]) -> Pattern:
    return Pattern.from_demands((min(a, b), max(a, b)) for a, b in pairs if a != b)


def steiner_forest_2approx(ug: Graph, pairs: Iterable[tuple[int, int]]) -> Solution:
    """Primal-dual moat growing followed by reverse delete; at most twice the optimum forest."""
    if ug.directed:
        raise ContractViolation("steiner_forest_2approx expects an undirected graph")
    p = _forest_pattern(pairs)
    if not p.demands:
        return make_solution(ug, ())
    for s, t in p.demands:
        if t not in reachable(ug, s):
            raise NoFeasibleNetwork(f"pair ({s},{t}) is disconnected")
    n = ug.vertex_count
    comp = list(range(n))
    members: dict[int, set[int]] = {v: {v} for v in range(n)}
    load = [Fraction(0)] * n  # total moat growth around each vertex

    def active(c: int) -> bool:
        ms = members[c]
        return any((s in ms) != (t in ms) for s, t in p.demands)

    forest: list[int] = []
    while True:
        live = {c for c in members if active(c)}
        if not live:
            break
        best = None
        for e in ug.edges:
            cu, cv = comp[e.tail], comp[e.head]
            if cu == cv:
                continue
            rate = (cu in live) + (cv in live)
            if rate == 0:
                continue
            slack = e.weight - load[e.tail] - load[e.head]
            key = (slack / rate, tie_break_key(ug, e.id))
            if best is None or key < best[0]:
                best = (key, e)
        assert best is not None
        (step, _), e = best
        for c in live:
            for v in members[c]:
                load[v] += step
        keep, gone = comp[e.tail], comp[e.head]
        for v in members[gone]:
            comp[v] = keep
        members[keep] |= members.pop(gone)
        forest.append(e.id)
    chosen = set(forest)
    for eid in reversed(forest):
        chosen.discard(eid)
        if not check_feasible(ug, chosen, p):
            chosen.add(eid)
    return make_solution(ug, chosen, p)


def _bidirect_forest(inst: Instance, solver, prune: bool) -> Solution:
    g = inst.graph
    if not is_bidirected(g):
        raise ContractViolation("instance graph is not bidirected")
    ug = underlying_undirected(g)
    groups = undirected_edge_groups(g)
    forest = solver(ug, inst.pattern.demands)
    arcs = {a for i in forest.edge_ids for a in groups[i]}
    sol = make_solution(g, arcs, inst.pattern)
    assert sol.feasible
    return prune_minimal(g, sol, inst.pattern) if prune else sol


def bidsn_4approx(inst: Instance, prune: bool = False) -> Solution:
    """Both directions of a 2-approximate Steiner forest on the underlying graph."""
    return _bidirect_forest(inst, steiner_forest_2approx, prune)


def bidsn_2approx_fpt(inst: Instance, prune: bool = False) -> Solution:
    """Both directions of an optimal Steiner forest on the underlying graph."""
    return _bidirect_forest(inst, steiner_forest_fpt, prune)


def scss_2approx(g: Graph, R: Iterable[int]) -> Solution:
    """Cheapest union of an out- and an in-arborescence over every root in R."""
    terms = sorted(set(R))
    p = Pattern.strongly_connect(terms)
    if len(terms) <= 1:
        return make_solution(g, (), p)
    back = g.reversed()
    best: Solution | None = None
    for r in terms:
        try:
            out_tree = dreyfus_wagner_dst(g, r, terms)
            in_tree = dreyfus_wagner_dst(back, r, terms)
        except NoFeasibleNetwork:
            raise NoFeasibleNetwork("terminals are not mutually reachable") from None
        sol = make_solution(g, out_tree.edge_ids | in_tree.edge_ids, p)
        if best is None or sol.cost < best.cost:
            best = sol
    assert best is not None and best.feasible
    return best
