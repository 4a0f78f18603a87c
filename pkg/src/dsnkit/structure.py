"""Structural transformations on bidirected graphs and their solutions.

* :func:`reduce_degrees` rewrites a bidirected graph so terminals are pendant
  and Steiner vertices have three neighbours, keeping a trace that maps
  solutions back.
* :func:`replace_polycycle` / :func:`canonicalize_components` turn mixed
  orientations on 2-connected pieces into directed cycles.
* :func:`prune_minimal` deletes edges until every remaining one is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

from .errors import ContractViolation
from .graph import (
    Edge,
    Graph,
    Pattern,
    Solution,
    check_feasible,
    is_bidirected,
    make_solution,
    reach_relation,
    scc_condensation,
    tie_break_key,
    to_networkx,
    undirected_edge_groups,
)

SPLIT_TERMINAL = "SplitTerminal"
SPLIT_STEINER = "SplitSteiner"
CONTRACT_DEGREE2 = "ContractDegree2"
PRUNE_DANGLING = "PruneDangling"
TIE_BREAK = "TieBreak"


@dataclass(frozen=True)
class TransformTrace:
    """Operation log plus, per edge of the new graph, the original edges it stands for."""

    ops: tuple[tuple[str, tuple[int, ...], tuple[int, ...]], ...]
    expansion: tuple[tuple[int, ...], ...]
    original_vertex_count: int
    splitters: frozenset[int]

    def lift(self, edge_ids: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for i in edge_ids:
            out.update(self.expansion[i])
        return frozenset(out)

    def push(self, original_ids: Iterable[int]) -> frozenset[int]:
        """New-graph edges whose whole expansion lies inside ``original_ids`` (zero edges included)."""
        have = set(original_ids)
        return frozenset(i for i, exp in enumerate(self.expansion) if set(exp) <= have)


@dataclass
class _Unit:
    a: int
    b: int
    weight: Fraction
    fwd: tuple[int, ...]  # original arcs behind a->b
    bwd: tuple[int, ...]  # original arcs behind b->a
    alive: bool = True

    def other(self, v: int) -> int:
        return self.b if self.a == v else self.a

    def toward(self, v: int) -> tuple[int, ...]:
        """Expansion of the arc ending at v."""
        return self.fwd if self.b == v else self.bwd

    def away(self, v: int) -> tuple[int, ...]:
        return self.fwd if self.a == v else self.bwd

    def move(self, old: int, new: int) -> None:
        if self.a == old:
            self.a = new
        else:
            self.b = new


class _Work:
    def __init__(self, g: Graph) -> None:
        self.n = g.vertex_count
        self.labels: list[str | None] = list(g.labels)
        self.units: list[_Unit] = []
        for grp in undirected_edge_groups(g):
            e = g.edges[grp[0]]
            self.units.append(_Unit(e.tail, e.head, e.weight, (grp[0],), (grp[1],)))

    def at(self, v: int) -> list[_Unit]:
        return [u for u in self.units if u.alive and (u.a == v or u.b == v)]

    def neighbours(self, v: int) -> list[int]:
        return sorted({u.other(v) for u in self.at(v)})

    def new_vertex(self, label: str) -> int:
        self.labels.append(label)
        self.n += 1
        return self.n - 1

    def add_zero(self, a: int, b: int) -> None:
        self.units.append(_Unit(a, b, Fraction(0), (), ()))


def tie_break_order(g: Graph) -> list[int]:
    """Edge ids by (weight, min endpoint, max endpoint, id); reverse pairs end up adjacent."""
    return sorted(range(g.m), key=lambda i: tie_break_key(g, i))


def reduce_degrees(g: Graph, R: Iterable[int]) -> tuple[Graph, TransformTrace]:
    if not is_bidirected(g):
        raise ContractViolation("reduce_degrees needs a bidirected graph")
    terms = sorted(set(R))
    if any(not 0 <= t < g.vertex_count for t in terms):
        raise ContractViolation("terminal outside the graph")
    tset = set(terms)
    w = _Work(g)
    ops: list[tuple[str, tuple[int, ...], tuple[int, ...]]] = []
    splitters: set[int] = set()

    # every terminal hangs off its own Steiner splitter
    for t in terms:
        units = w.at(t)
        if not units:
            continue
        s = w.new_vertex(f"split({w.labels[t] or t})")
        for u in units:
            u.move(t, s)
        w.add_zero(t, s)
        splitters.add(s)
        ops.append((SPLIT_TERMINAL, (t,), (s,)))

    # Steiner vertices of degree > 3 shed two face-consecutive neighbours at a time
    rot = _rotation(w)
    for v in range(w.n):
        if v in tset:
            continue
        while len(w.neighbours(v)) > 3:
            order = rot[v]
            n1, n2 = order[0], order[1]
            u = w.new_vertex(f"split({w.labels[v] or v})")
            for unit in w.at(v):
                if unit.other(v) in (n1, n2):
                    unit.move(v, u)
            w.add_zero(v, u)
            rot[v] = [u] + order[2:]
            rot[u] = [n1, n2, v]
            for x in (n1, n2):
                rot[x] = [u if y == v else y for y in rot[x]]
            ops.append((SPLIT_STEINER, (v,), (u,)))

    # contract degree-2 Steiner vertices, drop dangling ones, until stable
    changed = True
    while changed:
        changed = False
        for v in range(w.n):
            if v in tset or v in splitters:
                continue
            units = w.at(v)
            if not units:
                continue
            nbrs = sorted({u.other(v) for u in units})
            if len(nbrs) == 1:
                for u in units:
                    u.alive = False
                ops.append((PRUNE_DANGLING, (v,), ()))
                changed = True
            elif len(nbrs) == 2:
                a, b = nbrs
                ua = min((u for u in units if u.other(v) == a), key=lambda u: (u.weight, u.fwd + u.bwd))
                ub = min((u for u in units if u.other(v) == b), key=lambda u: (u.weight, u.fwd + u.bwd))
                for u in units:
                    u.alive = False
                w.units.append(_Unit(a, b, ua.weight + ub.weight,
                                     ua.toward(v) + ub.away(v), ub.toward(v) + ua.away(v)))
                ops.append((CONTRACT_DEGREE2, (v,), (a, b)))
                changed = True
    ops.append((TIE_BREAK, (), ()))

    edges: list[Edge] = []
    expansion: list[tuple[int, ...]] = []
    for u in w.units:
        if not u.alive:
            continue
        edges.append(Edge(u.a, u.b, u.weight, len(edges)))
        expansion.append(u.fwd)
        edges.append(Edge(u.b, u.a, u.weight, len(edges)))
        expansion.append(u.bwd)
    out = Graph(w.n, tuple(edges), tuple(w.labels))
    return out, TransformTrace(tuple(ops), tuple(expansion), g.vertex_count, frozenset(splitters))


def _rotation(w: _Work) -> dict[int, list[int]]:
    """Cyclic neighbour order per vertex: a planar rotation system when one exists."""
    h = nx.Graph()
    for u in w.units:
        if u.alive:
            h.add_edge(u.a, u.b)
    planar, emb = nx.check_planarity(h)
    rot: dict[int, list[int]] = {}
    for v in range(w.n):
        if v not in h:
            rot[v] = []
        elif planar:
            rot[v] = list(emb.neighbors_cw_order(v))
        else:
            rot[v] = sorted(h.neighbors(v))
    return rot


# ---------------------------------------------------------------------------
# cycles


def _cycle_vertices(g: Graph, cycle: Sequence[int]) -> list[int]:
    if len(cycle) < 3:
        raise ContractViolation("a poly-cycle needs at least three edges")
    ends = [frozenset((g.edges[i].tail, g.edges[i].head)) for i in cycle]
    first = ends[0] - ends[1]
    if len(first) != 1:
        raise ContractViolation("consecutive cycle edges must share exactly one vertex")
    seq = [next(iter(first))]
    cur = next(iter(ends[0] - first))
    for e in ends[1:]:
        if cur not in e:
            raise ContractViolation("cycle edges do not form a closed walk")
        seq.append(cur)
        cur = next(iter(e - {cur}))
    if cur != seq[0] or len(set(seq)) != len(seq):
        raise ContractViolation("cycle is not closed or repeats a vertex")
    return seq


def replace_polycycle(g: Graph, N: Solution | Iterable[int], cycle: Sequence[int]) -> Solution:
    """Swap a poly-cycle of N for the cheaper directed cycle on the same vertices."""
    ids = set(N.edge_ids if isinstance(N, Solution) else N)
    if not set(cycle) <= ids:
        raise ContractViolation("cycle edges are not all in N")
    if len(set(cycle)) != len(cycle):
        raise ContractViolation("cycle repeats an edge")
    seq = _cycle_vertices(g, cycle)
    arcs_between: dict[tuple[int, int], list[int]] = {}
    for e in g.edges:
        arcs_between.setdefault((e.tail, e.head), []).append(e.id)
    rest = ids - set(cycle)

    def orient(forward: bool) -> list[int] | None:
        chosen = []
        L = len(seq)
        for i in range(L):
            a, b = seq[i], seq[(i + 1) % L]
            if not forward:
                a, b = b, a
            options = arcs_between.get((a, b))
            if not options:
                return None
            chosen.append(min(options, key=lambda x: (g.edges[x].weight, x not in ids, tie_break_key(g, x))))
        return chosen

    candidates = []
    for forward in (True, False):
        arcs = orient(forward)
        if arcs is None:
            continue
        new = rest | set(arcs)
        candidates.append((g.cost(new), sorted(tie_break_key(g, x) for x in arcs), new))
    if not candidates:
        raise ContractViolation("graph lacks the arcs for a directed cycle")
    cost, _, new = min(candidates, key=lambda c: (c[0], c[1]))
    if cost > g.cost(ids):
        raise ContractViolation("directed cycle is costlier; graph is not bidirected around the cycle")
    span = g.spanned_vertices(ids)
    before = reach_relation(g, ids, span)
    after = reach_relation(g, new, span)
    assert before <= after, "cycle replacement lost a reachable pair"
    return make_solution(g, new)


def _blocks(g: Graph, ids: set[int]) -> list[set[int]]:
    h = to_networkx(g, ids)
    return [set(b) for b in nx.biconnected_components(h) if len(b) >= 3]


def canonicalize_components(g: Graph, N: Solution | Iterable[int]) -> Solution:
    """Make every 2-connected piece of N strongly connected so the condensation is a poly-forest."""
    ids = set(N.edge_ids if isinstance(N, Solution) else N)
    start_cost = g.cost(ids)
    while True:
        fixed = True
        for block in sorted(_blocks(g, ids), key=min):
            inside = {i for i in ids if g.edges[i].tail in block and g.edges[i].head in block}
            rel = reach_relation(g, inside, block)
            missing = [(u, v) for u in sorted(block) for v in sorted(block) if u != v and (u, v) not in rel]
            if not missing:
                continue
            u, v = missing[0]
            h = to_networkx(g, inside)
            p1, p2 = list(nx.node_disjoint_paths(h, u, v))[:2]
            loop = p1 + list(reversed(p2))[1:-1]
            cycle = []
            for i in range(len(loop)):
                a, b = loop[i], loop[(i + 1) % len(loop)]
                cycle.append(min((x for x in inside if {g.edges[x].tail, g.edges[x].head} == {a, b}),
                                 key=lambda x: tie_break_key(g, x)))
            ids = set(replace_polycycle(g, ids, cycle).edge_ids)
            fixed = False
            break
        if fixed:
            break
    assert g.cost(ids) <= start_cost
    assert condensation_is_polyforest(g, ids)
    return make_solution(g, ids)


def condensation_is_polyforest(g: Graph, ids: Iterable[int]) -> bool:
    ids = set(ids)
    assign, cond = scc_condensation(g, ids)
    used = {assign[v] for v in g.spanned_vertices(ids)}
    parent = {c: c for c in used}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    seen_pairs = set()
    for i in ids:
        a, b = assign[g.edges[i].tail], assign[g.edges[i].head]
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if key in seen_pairs:
            return False
        seen_pairs.add(key)
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def prune_minimal(g: Graph, N: Solution | Iterable[int], p: Pattern) -> Solution:
    """Drop edges in descending tie-break order while the demands stay satisfied."""
    ids = set(N.edge_ids if isinstance(N, Solution) else N)
    if not check_feasible(g, ids, p):
        raise ContractViolation("prune_minimal needs a feasible network")
    for e in sorted(ids, key=lambda i: tie_break_key(g, i), reverse=True):
        ids.discard(e)
        if not check_feasible(g, ids, p):
            ids.add(e)
    return make_solution(g, ids, p)


def normalize_solution(g: Graph, N: Solution | Iterable[int], p: Pattern) -> Solution:
    """Alternate pruning and canonicalization until neither changes the network."""
    sol = prune_minimal(g, N, p)
    # each productive round changes the edge set; the cap only guards against a cycle
    for _ in range(2 * g.m + 2):
        canon = canonicalize_components(g, sol)
        nxt = prune_minimal(g, canon, p)
        if nxt.edge_ids == sol.edge_ids:
            return nxt
        sol = nxt
    raise ContractViolation("normalization did not settle")
