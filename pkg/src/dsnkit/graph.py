"""Core graph types: exact-weight multigraphs, demand patterns, instances, solutions.

Weights are :class:`fractions.Fraction` values, so every cost comparison in
the library is exact.  Vertices and edges are dense integer ids; labels are
decorative and never influence an algorithm.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .errors import ContractViolation

Weight = Fraction


def as_weight(value: int | str | Fraction) -> Fraction:
    w = Fraction(value)
    if w < 0:
        raise ContractViolation(f"negative weight {w}")
    return w


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    weight: Fraction
    id: int


@dataclass(frozen=True, eq=False)
class Graph:
    """Directed multigraph (or undirected when ``directed`` is false).

    An undirected graph stores each edge once; ``tail``/``head`` are then just
    its two endpoints and traversal goes both ways.
    """

    vertex_count: int
    edges: tuple[Edge, ...]
    labels: tuple[str | None, ...] = ()
    directed: bool = True
    loops_allowed: bool = False

    def __post_init__(self) -> None:
        if not self.labels:
            object.__setattr__(self, "labels", (None,) * self.vertex_count)
        if len(self.labels) != self.vertex_count:
            raise ContractViolation("label count differs from vertex count")
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise ContractViolation(f"edge ids must be dense; position {i} holds id {e.id}")
            if not (0 <= e.tail < self.vertex_count and 0 <= e.head < self.vertex_count):
                raise ContractViolation(f"edge {i} references a missing vertex")
            if e.tail == e.head and not self.loops_allowed:
                raise ContractViolation(f"edge {i} is a self-loop")
            if e.weight < 0:
                raise ContractViolation(f"edge {i} has negative weight")

    @classmethod
    def build(
        cls,
        n: int,
        arcs: Iterable[tuple[int, int, int | str | Fraction]],
        labels: Sequence[str | None] | None = None,
        directed: bool = True,
    ) -> "Graph":
        edges = tuple(Edge(u, v, as_weight(w), i) for i, (u, v, w) in enumerate(arcs))
        return cls(n, edges, tuple(labels) if labels else (), directed)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and self.edges == other.edges
            and self.labels == other.labels
            and self.directed == other.directed
        )

    def __hash__(self) -> int:
        return hash((self.vertex_count, self.edges, self.directed))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids leaving each vertex (both directions for undirected graphs)."""
        out: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for e in self.edges:
            out[e.tail].append(e.id)
            if not self.directed and e.head != e.tail:
                out[e.head].append(e.id)
        return tuple(tuple(x) for x in out)

    @cached_property
    def in_edges(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for e in self.edges:
            inc[e.head].append(e.id)
            if not self.directed and e.head != e.tail:
                inc[e.tail].append(e.id)
        return tuple(tuple(x) for x in inc)

    def other_end(self, eid: int, v: int) -> int:
        e = self.edges[eid]
        return e.head if e.tail == v else e.tail

    def cost(self, edge_ids: Iterable[int]) -> Fraction:
        return sum((self.edges[i].weight for i in set(edge_ids)), Fraction(0))

    def spanned_vertices(self, edge_ids: Iterable[int]) -> set[int]:
        vs: set[int] = set()
        for i in edge_ids:
            vs.add(self.edges[i].tail)
            vs.add(self.edges[i].head)
        return vs

    def label(self, v: int) -> str:
        lab = self.labels[v]
        return lab if lab is not None else str(v)

    def reversed(self) -> "Graph":
        """Same ids, every arc flipped."""
        edges = tuple(Edge(e.head, e.tail, e.weight, e.id) for e in self.edges)
        return Graph(self.vertex_count, edges, self.labels, self.directed, self.loops_allowed)

    @cached_property
    def reverse_partner(self) -> tuple[int | None, ...]:
        """For each edge, an edge of equal weight in the opposite direction (paired one-to-one)."""
        return tuple(_pair_reverses(self))


def _pair_reverses(g: Graph) -> list[int | None]:
    partner: list[int | None] = [None] * g.m
    waiting: dict[tuple[int, int, Fraction], deque[int]] = {}
    for e in g.edges:
        key = (e.head, e.tail, e.weight)
        q = waiting.get(key)
        if q:
            f = q.popleft()
            partner[e.id] = f
            partner[f] = e.id
        else:
            waiting.setdefault((e.tail, e.head, e.weight), deque()).append(e.id)
    return partner


def is_bidirected(g: Graph) -> bool:
    """Every arc has a distinct reverse arc of the same weight."""
    if not g.directed:
        return False
    return all(p is not None for p in g.reverse_partner)


def undirected_edge_groups(g: Graph) -> list[tuple[int, ...]]:
    """Directed edge ids behind each edge of ``underlying_undirected(g)``, in the same order."""
    partner = g.reverse_partner if g.directed else (None,) * g.m
    groups: list[tuple[int, ...]] = []
    for e in g.edges:
        p = partner[e.id]
        if p is None:
            groups.append((e.id,))
        elif p > e.id:
            groups.append((e.id, p))
    return groups


def underlying_undirected(g: Graph) -> Graph:
    """Collapse reverse pairs of equal weight; keep every other arc as its own edge."""
    arcs = []
    for grp in undirected_edge_groups(g):
        e = g.edges[grp[0]]
        arcs.append((min(e.tail, e.head), max(e.tail, e.head), e.weight))
    return Graph.build(g.vertex_count, arcs, g.labels, directed=False)


def bidirect(ug: Graph) -> tuple[Graph, list[tuple[int, int]]]:
    """Turn an undirected graph into a bidirected one; returns the arc pair per edge."""
    arcs = []
    pairs = []
    for e in ug.edges:
        pairs.append((len(arcs), len(arcs) + 1))
        arcs.append((e.tail, e.head, e.weight))
        arcs.append((e.head, e.tail, e.weight))
    return Graph.build(ug.vertex_count, arcs, ug.labels), pairs


# ---------------------------------------------------------------------------
# patterns, classes, instances, solutions


@dataclass(frozen=True)
class Pattern:
    terminals: tuple[int, ...]
    demands: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        ts = set(self.terminals)
        if len(ts) != len(self.terminals):
            raise ContractViolation("duplicate terminal")
        for s, t in self.demands:
            if s == t:
                raise ContractViolation(f"demand ({s},{t}) has equal endpoints")
            if s not in ts or t not in ts:
                raise ContractViolation(f"demand ({s},{t}) uses a non-terminal")

    @classmethod
    def from_demands(cls, demands: Iterable[tuple[int, int]]) -> "Pattern":
        ds = tuple(sorted(set(demands)))
        ts = tuple(sorted({v for d in ds for v in d}))
        return cls(ts, ds)

    @classmethod
    def strongly_connect(cls, terminals: Iterable[int]) -> "Pattern":
        """Directed cycle over the sorted terminals: feasible iff they are strongly connected."""
        ts = tuple(sorted(set(terminals)))
        if len(ts) < 2:
            return cls(ts, ())
        ds = tuple(sorted((ts[i], ts[(i + 1) % len(ts)]) for i in range(len(ts))))
        return cls(ts, ds)

    @property
    def k(self) -> int:
        return len(self.demands)


@dataclass(frozen=True)
class SolutionClass:
    kind: str = "any"  # any | planar | tw | polytree | cycle
    omega: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("any", "planar", "tw", "polytree", "cycle"):
            raise ContractViolation(f"unknown solution class {self.kind!r}")
        if (self.kind == "tw") != (self.omega is not None):
            raise ContractViolation("treewidth class needs omega, other classes must not have one")
        if self.omega is not None and self.omega < 1:
            raise ContractViolation("omega must be at least 1")

    @classmethod
    def treewidth(cls, omega: int) -> "SolutionClass":
        return cls("tw", omega)

    def token(self) -> str:
        return f"tw:{self.omega}" if self.kind == "tw" else self.kind

    @classmethod
    def from_token(cls, text: str) -> "SolutionClass":
        if text.startswith("tw:"):
            return cls("tw", int(text[3:]))
        return cls(text)

    @property
    def subgraph_closed(self) -> bool:
        return self.kind != "cycle"


ANY = SolutionClass("any")
PLANAR = SolutionClass("planar")
POLYTREE = SolutionClass("polytree")
CYCLE = SolutionClass("cycle")


@dataclass(frozen=True)
class Instance:
    graph: Graph
    pattern: Pattern
    variant: str = "dsn"  # dsn | scss
    bidirected_required: bool = False
    solution_class: SolutionClass = field(default_factory=SolutionClass)

    def __post_init__(self) -> None:
        if self.variant not in ("dsn", "scss"):
            raise ContractViolation(f"unknown variant {self.variant!r}")
        for v in self.pattern.terminals:
            if not 0 <= v < self.graph.vertex_count:
                raise ContractViolation(f"terminal {v} is not a vertex")
        if self.bidirected_required and not is_bidirected(self.graph):
            raise ContractViolation("instance is flagged bidirected but the graph is not")

    @classmethod
    def scss(cls, g: Graph, terminals: Iterable[int], **kw) -> "Instance":
        return cls(g, Pattern.strongly_connect(terminals), "scss", **kw)

    @classmethod
    def dsn(cls, g: Graph, demands: Iterable[tuple[int, int]], **kw) -> "Instance":
        return cls(g, Pattern.from_demands(demands), "dsn", **kw)


@dataclass(frozen=True)
class Solution:
    edge_ids: frozenset[int]
    cost: Fraction
    feasible: bool

    def __len__(self) -> int:
        return len(self.edge_ids)

    def sorted_ids(self) -> list[int]:
        return sorted(self.edge_ids)


def make_solution(g: Graph, edge_ids: Iterable[int], p: Pattern | None = None) -> Solution:
    ids = frozenset(edge_ids)
    for i in ids:
        if not 0 <= i < g.m:
            raise ContractViolation(f"edge id {i} does not exist")
    feas = check_feasible(g, ids, p) if p is not None else True
    return Solution(ids, g.cost(ids), feas)


# ---------------------------------------------------------------------------
# reachability


def reachable(g: Graph, src: int, edge_ids: Iterable[int] | None = None) -> set[int]:
    allowed = None if edge_ids is None else set(edge_ids)
    seen = {src}
    stack = [src]
    while stack:
        v = stack.pop()
        for eid in g.out_edges[v]:
            if allowed is not None and eid not in allowed:
                continue
            w = g.other_end(eid, v)
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def check_feasible(g: Graph, sol: Solution | Iterable[int], p: Pattern) -> bool:
    ids = sol.edge_ids if isinstance(sol, Solution) else frozenset(sol)
    cache: dict[int, set[int]] = {}
    for s, t in p.demands:
        if s not in cache:
            cache[s] = reachable(g, s, ids)
        if t not in cache[s]:
            return False
    return True


def reach_relation(g: Graph, edge_ids: Iterable[int], vertices: Iterable[int]) -> set[tuple[int, int]]:
    """All ordered pairs (s, t), s != t, of ``vertices`` with an s->t path inside ``edge_ids``."""
    ids = frozenset(edge_ids)
    vs = sorted(set(vertices))
    vset = set(vs)
    out = set()
    for s in vs:
        for t in reachable(g, s, ids) & vset:
            if t != s:
                out.add((s, t))
    return out


def scc_condensation(g: Graph, edge_ids: Iterable[int] | None = None) -> tuple[list[int], Graph]:
    """Strongly connected components (iterative Tarjan) and the condensation DAG.

    Component ids follow a topological order of the condensation.
    """
    n = g.vertex_count
    allowed = None if edge_ids is None else set(edge_ids)
    succ: list[list[int]] = [[] for _ in range(n)]
    for e in g.edges:
        if allowed is None or e.id in allowed:
            succ[e.tail].append(e.head)
            if not g.directed:
                succ[e.head].append(e.tail)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(comp)
    # Tarjan emits sinks first; flip to a topological order.
    comps.reverse()
    assign = [0] * n
    for cid, comp in enumerate(comps):
        for v in comp:
            assign[v] = cid
    arcs = set()
    for e in g.edges:
        if allowed is not None and e.id not in allowed:
            continue
        a, b = assign[e.tail], assign[e.head]
        if a != b:
            arcs.add((a, b))
    cond = Graph.build(len(comps), [(a, b, 1) for a, b in sorted(arcs)])
    return assign, cond


def simple_adjacency(g: Graph, edge_ids: Iterable[int] | None = None) -> dict[int, set[int]]:
    """Underlying simple undirected adjacency of the spanned vertices."""
    ids = range(g.m) if edge_ids is None else edge_ids
    adj: dict[int, set[int]] = {}
    for i in ids:
        e = g.edges[i]
        adj.setdefault(e.tail, set())
        adj.setdefault(e.head, set())
        if e.tail != e.head:
            adj[e.tail].add(e.head)
            adj[e.head].add(e.tail)
    return adj


def to_networkx(g: Graph, edge_ids: Iterable[int] | None = None) -> nx.Graph:
    h = nx.Graph()
    for v, nbrs in simple_adjacency(g, edge_ids).items():
        h.add_node(v)
        for w in nbrs:
            h.add_edge(v, w)
    return h


def is_planar(g: Graph, edge_ids: Iterable[int] | None = None) -> bool:
    planar, _ = nx.check_planarity(to_networkx(g, edge_ids))
    return planar


def is_polyforest(g: Graph, edge_ids: Iterable[int]) -> bool:
    """Underlying multigraph is a forest, so no reverse pairs and no parallel arcs."""
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in edge_ids:
        e = g.edges[i]
        a, b = find(e.tail), find(e.head)
        if a == b:
            return False
        parent[a] = b
    return True


def is_directed_cycle_through(g: Graph, edge_ids: Iterable[int], terminals: Iterable[int]) -> bool:
    ids = list(edge_ids)
    if not ids:
        return False
    outd: dict[int, int] = {}
    ind: dict[int, int] = {}
    for i in ids:
        e = g.edges[i]
        outd[e.tail] = outd.get(e.tail, 0) + 1
        ind[e.head] = ind.get(e.head, 0) + 1
    vs = set(outd) | set(ind)
    if any(outd.get(v, 0) != 1 or ind.get(v, 0) != 1 for v in vs):
        return False
    start = next(iter(vs))
    if reachable(g, start, ids) != vs:
        return False
    return set(terminals) <= vs


def multigraph_treewidth(g: Graph, edge_ids: Iterable[int]) -> int:
    """Treewidth of the underlying multigraph: a reverse pair or parallel arcs count as a cycle."""
    from .treewidth import treewidth_exact

    ids = list(edge_ids)
    seen: set[tuple[int, int]] = set()
    parallel = False
    for i in ids:
        e = g.edges[i]
        key = (min(e.tail, e.head), max(e.tail, e.head))
        if key in seen:
            parallel = True
        seen.add(key)
    tw = treewidth_exact(simple_adjacency(g, ids))
    return max(tw, 2) if parallel else tw


def in_class(g: Graph, edge_ids: Iterable[int], cls: SolutionClass, terminals: Iterable[int] = ()) -> bool:
    ids = list(edge_ids)
    if cls.kind == "any":
        return True
    if cls.kind == "planar":
        return is_planar(g, ids)
    if cls.kind == "polytree":
        return is_polyforest(g, ids)
    if cls.kind == "tw":
        if cls.omega == 1:
            return is_polyforest(g, ids)
        return multigraph_treewidth(g, ids) <= cls.omega
    return is_directed_cycle_through(g, ids, terminals)


def tie_break_key(g: Graph, eid: int) -> tuple[Fraction, int, int, int]:
    e = g.edges[eid]
    return (e.weight, min(e.tail, e.head), max(e.tail, e.head), eid)


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
