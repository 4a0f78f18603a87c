"""Exact solvers: the branch-and-bound oracle, Dreyfus-Wagner DPs, Steiner forest
by partition enumeration, and the class-constrained path-union search."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from ._kernel import Kernel
from .errors import CapacityError, ContractViolation, NoFeasibleNetwork
from .graph import (
    Graph,
    Instance,
    Pattern,
    Solution,
    SolutionClass,
    in_class,
    is_polyforest,
    iter_bits,
    make_solution,
    simple_adjacency,
    tie_break_key,
)
from .treewidth import tree_decomposition

DEFAULT_TERMINAL_CAP = 14
DEFAULT_FOREST_TERMINAL_CAP = 10
DEFAULT_VERTEX_CAP = 24


@dataclass(frozen=True)
class OracleBudget:
    max_edges_enumerated: int = 5_000_000
    time_cap_ms: int = 120_000

    def __post_init__(self) -> None:
        if self.max_edges_enumerated <= 0 or self.time_cap_ms <= 0:
            raise ContractViolation("oracle caps must be positive")


class _Meter:
    def __init__(self, budget: OracleBudget) -> None:
        self.budget = budget
        self.count = 0
        self.deadline = time.monotonic() + budget.time_cap_ms / 1000

    def tick(self) -> None:
        self.count += 1
        if self.count > self.budget.max_edges_enumerated:
            raise CapacityError(f"search exceeded {self.budget.max_edges_enumerated} nodes")
        if self.count & 1023 == 0 and time.monotonic() > self.deadline:
            raise CapacityError(f"search exceeded {self.budget.time_cap_ms} ms")


class _ClassCache:
    """Memoized solution-class predicate keyed by edge mask."""

    def __init__(self, g: Graph, cls: SolutionClass, terminals: Sequence[int]) -> None:
        self.g = g
        self.cls = cls
        self.terminals = tuple(terminals)
        self.memo: dict[int, bool] = {}

    def __call__(self, mask: int) -> bool:
        if self.cls.kind == "any":
            return True
        hit = self.memo.get(mask)
        if hit is None:
            hit = self.memo[mask] = in_class(self.g, list(iter_bits(mask)), self.cls, self.terminals)
        return hit


def _empty(g: Graph, p: Pattern) -> Solution:
    return make_solution(g, (), p)


# ---------------------------------------------------------------------------
# oracle


def brute_force_dsn(inst: Instance, budget: OracleBudget = OracleBudget()) -> Solution:
    """Minimum-cost feasible edge subset inside the instance's solution class.

    Include/exclude branch and bound over edges in tie-break order (cheapest
    first), pruned by infeasibility of the remaining edges and by a shortest
    completion lower bound.  Among equal-cost optima the first one met in
    that order wins.
    """
    g, p, cls = inst.graph, inst.pattern, inst.solution_class
    if cls.kind == "cycle":
        return _oracle_cycle(inst, budget)
    if not p.demands:
        return _empty(g, p)
    k = Kernel(g)
    demands = list(p.demands)
    if not k.satisfied(k.full, demands):
        raise NoFeasibleNetwork("demands not satisfiable in the full graph")
    order = sorted(range(g.m), key=lambda i: tie_break_key(g, i))
    meter = _Meter(budget)
    ok = _ClassCache(g, cls, p.terminals)
    cheap_check = cls.kind == "polytree" or (cls.kind == "tw" and cls.omega == 1)
    best_cost = math.inf
    best_mask: int | None = None

    def rec(i: int, inc: int, cost: int, avail: int) -> None:
        nonlocal best_cost, best_mask
        meter.tick()
        if cost >= best_cost:
            return
        unsat = k.unsatisfied(inc, demands)
        if not unsat:
            if ok(inc):
                best_cost, best_mask = cost, inc
            return
        if i == len(order):
            return
        if not k.satisfied(avail, unsat):
            return
        if cost + k.lower_bound(inc, avail, unsat) >= best_cost:
            return
        e = order[i]
        bit = 1 << e
        if cheap_check:
            if is_polyforest(g, iter_bits(inc | bit)):
                rec(i + 1, inc | bit, cost + k.w[e], avail)
        else:
            rec(i + 1, inc | bit, cost + k.w[e], avail)
        rec(i + 1, inc, cost, avail & ~bit)

    rec(0, 0, 0, k.full)
    if best_mask is None:
        raise NoFeasibleNetwork(f"no feasible network in class {cls.token()}")
    return make_solution(g, iter_bits(best_mask), p)


def _oracle_cycle(inst: Instance, budget: OracleBudget) -> Solution:
    g, p = inst.graph, inst.pattern
    terms = set(p.terminals)
    if not terms:
        return _empty(g, p)
    k = Kernel(g)
    meter = _Meter(budget)
    root = min(terms)
    best_cost = math.inf
    best_mask = None
    out_sorted = [sorted(g.out_edges[v], key=lambda i: tie_break_key(g, i)) for v in range(g.vertex_count)]

    def rec(v: int, vis: int, mask: int, cost: int) -> None:
        nonlocal best_cost, best_mask
        meter.tick()
        if cost >= best_cost:
            return
        for i in out_sorted[v]:
            u = g.edges[i].head
            if u == root:
                if all((vis >> t) & 1 for t in terms) and cost + k.w[i] < best_cost:
                    best_cost, best_mask = cost + k.w[i], mask | (1 << i)
            elif not (vis >> u) & 1:
                rec(u, vis | (1 << u), mask | (1 << i), cost + k.w[i])

    rec(root, 1 << root, 0, 0)
    if best_mask is None:
        raise NoFeasibleNetwork("no directed cycle through all terminals")
    return make_solution(g, iter_bits(best_mask), p)


# ---------------------------------------------------------------------------
# Dreyfus-Wagner


class _ShortestPaths:
    """All-pairs shortest paths (Floyd-Warshall on scaled ints) with edge reconstruction."""

    def __init__(self, k: Kernel) -> None:
        n = k.n
        INF = math.inf
        dist = [[INF] * n for _ in range(n)]
        via = [[-1] * n for _ in range(n)]  # first edge on a shortest path
        for v in range(n):
            dist[v][v] = 0
        g = k.g
        for e in sorted(g.edges, key=lambda e: tie_break_key(g, e.id)):
            arcs = [(e.tail, e.head)]
            if k.undirected:
                arcs.append((e.head, e.tail))
            for a, b in arcs:
                if k.w[e.id] < dist[a][b]:
                    dist[a][b] = k.w[e.id]
                    via[a][b] = e.id
        for m in range(n):
            dm = dist[m]
            for a in range(n):
                dam = dist[a][m]
                if dam == INF:
                    continue
                da = dist[a]
                va = via[a]
                vam = va[m]
                for b in range(n):
                    nd = dam + dm[b]
                    if nd < da[b]:
                        da[b] = nd
                        va[b] = vam
        self.k = k
        self.dist = dist
        self.via = via

    def path(self, a: int, b: int) -> set[int]:
        out = set()
        while a != b:
            e = self.via[a][b]
            if e < 0:
                raise NoFeasibleNetwork(f"{b} unreachable from {a}")
            out.add(e)
            a = self.k.head[e] if self.k.tail[e] == a else self.k.tail[e]
        return out


class SteinerTable:
    """Dreyfus-Wagner table: ``cost[S][v]`` is the cheapest subgraph in which v reaches every terminal of S."""

    def __init__(self, g: Graph, terminals: Sequence[int], cap: int = DEFAULT_TERMINAL_CAP) -> None:
        if len(terminals) > cap:
            raise CapacityError(f"{len(terminals)} terminals exceed the cap of {cap}")
        self.g = g
        self.k = Kernel(g)
        self.sp = _ShortestPaths(self.k)
        self.terminals = list(terminals)
        t = len(self.terminals)
        n = g.vertex_count
        INF = math.inf
        full = 1 << t
        cost: list[list[float]] = [[INF] * n for _ in range(full)]
        hub: list[list[int]] = [[-1] * n for _ in range(full)]
        split: list[list[int]] = [[0] * n for _ in range(full)]
        dist = self.sp.dist
        for j, term in enumerate(self.terminals):
            row = cost[1 << j]
            for v in range(n):
                row[v] = dist[v][term]
        for S in range(1, full):
            if S & (S - 1) == 0:
                continue
            low = S & -S
            merge = [INF] * n
            msplit = [0] * n
            rest = S ^ low
            sub = rest
            # every proper split, enumerated once by keeping `low` on the left
            while True:
                left = low | sub
                if left != S:
                    a, b = cost[left], cost[S ^ left]
                    for u in range(n):
                        val = a[u] + b[u]
                        if val < merge[u]:
                            merge[u] = val
                            msplit[u] = left
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            row, hrow, srow = cost[S], hub[S], split[S]
            for v in range(n):
                dv = dist[v]
                best, bu = INF, -1
                for u in range(n):
                    val = dv[u] + merge[u]
                    if val < best:
                        best, bu = val, u
                row[v] = best
                hrow[v] = bu
                srow[v] = msplit[bu] if bu >= 0 else 0
        self.cost = cost
        self.hub = hub
        self.split = split

    def edges(self, S: int, v: int) -> set[int]:
        if self.cost[S][v] == math.inf:
            raise NoFeasibleNetwork("terminal set not reachable")
        if S & (S - 1) == 0:
            return self.sp.path(v, self.terminals[S.bit_length() - 1])
        u = self.hub[S][v]
        left = self.split[S][v]
        return self.sp.path(v, u) | self.edges(left, u) | self.edges(S ^ left, u)

    def mask(self, members: Iterable[int]) -> int:
        pos = {t: j for j, t in enumerate(self.terminals)}
        out = 0
        for t in members:
            out |= 1 << pos[t]
        return out


def dreyfus_wagner_st(ug: Graph, R: Iterable[int], cap: int = DEFAULT_TERMINAL_CAP) -> Solution:
    """Minimum Steiner tree of an undirected graph."""
    if ug.directed:
        raise ContractViolation("dreyfus_wagner_st expects an undirected graph")
    terms = sorted(set(R))
    if len(terms) > cap:
        raise CapacityError(f"{len(terms)} terminals exceed the cap of {cap}")
    if len(terms) <= 1:
        return make_solution(ug, ())
    root, rest = terms[0], terms[1:]
    table = SteinerTable(ug, rest, cap)
    full = (1 << len(rest)) - 1
    if table.cost[full][root] == math.inf:
        raise NoFeasibleNetwork("terminals are not connected")
    ids = table.edges(full, root)
    sol = make_solution(ug, ids, Pattern.from_demands((root, t) for t in rest))
    assert sol.cost == table.k.to_weight(table.cost[full][root])
    return sol


def dreyfus_wagner_dst(g: Graph, root: int, R: Iterable[int], cap: int = DEFAULT_TERMINAL_CAP) -> Solution:
    """Cheapest subgraph containing a root->t path for every terminal t."""
    terms = sorted(set(R) - {root})
    if not terms:
        return make_solution(g, ())
    table = SteinerTable(g, terms, cap)
    full = (1 << len(terms)) - 1
    if table.cost[full][root] == math.inf:
        raise NoFeasibleNetwork("some terminal is unreachable from the root")
    ids = table.edges(full, root)
    sol = make_solution(g, ids, Pattern.from_demands((root, t) for t in terms))
    assert sol.feasible and sol.cost == table.k.to_weight(table.cost[full][root])
    return sol


def _pair_groups(pairs: Sequence[tuple[int, int]]) -> list[frozenset[int]]:
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        parent[find(a)] = find(b)
    groups: dict[int, set[int]] = {}
    for v in list(parent):
        groups.setdefault(find(v), set()).add(v)
    return sorted((frozenset(s) for s in groups.values()), key=lambda s: min(s))


def steiner_forest_fpt(ug: Graph, pairs: Iterable[tuple[int, int]], cap: int = DEFAULT_FOREST_TERMINAL_CAP) -> Solution:
    """Optimal Steiner forest: best partition of the demand groups into jointly connected blocks."""
    if ug.directed:
        raise ContractViolation("steiner_forest_fpt expects an undirected graph")
    plist = sorted({(min(a, b), max(a, b)) for a, b in pairs if a != b})
    if not plist:
        return make_solution(ug, ())
    groups = _pair_groups(plist)
    terms = sorted(set().union(*groups))
    if len(terms) > cap:
        raise CapacityError(f"{len(terms)} forest terminals exceed the cap of {cap}")
    # one table rooted anywhere: tree(X) = cost[X - min X][min X]
    table = SteinerTable(ug, terms, max(cap, len(terms)))
    def tree_cost(block: int) -> float:
        low = block & -block
        return table.cost[block ^ low][terms[low.bit_length() - 1]] if block ^ low else 0

    gmask = [table.mask(gr) for gr in groups]
    c = len(groups)
    INF = math.inf
    best: dict[int, tuple[float, list[int]]] = {0: (0, [])}

    def solve(rem: int) -> tuple[float, list[int]]:
        if rem in best:
            return best[rem]
        first = rem & -rem
        others = rem ^ first
        out: tuple[float, list[int]] = (INF, [])
        sub = others
        while True:
            chosen = first | sub
            block = 0
            for j in iter_bits(chosen):
                block |= gmask[j]
            tc = tree_cost(block)
            if tc < out[0]:
                restc, restb = solve(rem ^ chosen)
                if tc + restc < out[0]:
                    out = (tc + restc, [block] + restb)
            if sub == 0:
                break
            sub = (sub - 1) & others
        best[rem] = out
        return out

    total, blocks = solve((1 << c) - 1)
    if total == INF:
        raise NoFeasibleNetwork("some pair is disconnected")
    ids: set[int] = set()
    for block in blocks:
        low = block & -block
        if block ^ low:
            ids |= table.edges(block ^ low, terms[low.bit_length() - 1])
    sol = make_solution(ug, ids, Pattern.from_demands(plist))
    assert sol.feasible and sol.cost == table.k.to_weight(total)
    return sol


# ---------------------------------------------------------------------------
# class-constrained search


def path_union_search(
    g: Graph,
    demands: Sequence[tuple[int, int]],
    admissible: Callable[[int], bool],
    budget: OracleBudget = OracleBudget(),
    allowed: int | None = None,
) -> int | None:
    """Cheapest edge mask that satisfies ``demands`` and passes ``admissible``.

    Depth-first branch and bound: take the first unsatisfied demand and
    branch over its simple paths ordered by the cost they add.  Any minimal
    solution is a union of one path per demand, so the search is complete
    for subgraph-closed predicates.
    """
    if not demands:
        return 0
    k = Kernel(g)
    allowed = k.full if allowed is None else allowed
    demands = list(demands)
    if not k.satisfied(allowed, demands):
        return None
    meter = _Meter(budget)
    paths: dict[tuple[int, int], list[int]] = {}
    best_cost = math.inf
    best_mask: int | None = None
    seen: set[int] = set()

    def rec(mask: int, cost: int) -> None:
        nonlocal best_cost, best_mask
        meter.tick()
        unsat = k.unsatisfied(mask, demands)
        if not unsat:
            if cost < best_cost:
                best_cost, best_mask = cost, mask
            return
        if cost + k.lower_bound(mask, allowed, unsat) >= best_cost:
            return
        d = unsat[0]
        if d not in paths:
            paths[d] = k.simple_paths(d[0], d[1], allowed)
        options = []
        for pm in paths[d]:
            extra = pm & ~mask
            options.append((k.cost(extra), bin(extra).count("1"), extra))
        options.sort()
        for add, _, extra in options:
            if cost + add >= best_cost:
                break
            nm = mask | extra
            if nm in seen:
                continue
            seen.add(nm)
            if not admissible(nm):
                continue
            rec(nm, cost + add)

    rec(0, 0)
    return best_mask


def dsn_bounded_tw(inst: Instance, omega: int | None = None, budget: OracleBudget = OracleBudget(),
                   vertex_cap: int = DEFAULT_VERTEX_CAP) -> Solution:
    """Cheapest feasible network whose underlying treewidth is at most omega.

    omega defaults to the instance's class bound.  omega = 1 means a
    poly-forest (reverse pairs count as cycles) and uses a union-find check
    instead of the treewidth DP.
    """
    if omega is None:
        if inst.solution_class.kind != "tw":
            raise ContractViolation("instance does not carry a treewidth class")
        omega = inst.solution_class.omega
    g, p = inst.graph, inst.pattern
    if g.vertex_count > vertex_cap:
        raise CapacityError(f"{g.vertex_count} vertices exceed the cap of {vertex_cap}")
    cls = SolutionClass.treewidth(omega)
    admissible = _polyforest_mask_check(g) if omega == 1 else _ClassCache(g, cls, p.terminals)
    mask = path_union_search(g, p.demands, admissible, budget)
    if mask is None:
        raise NoFeasibleNetwork(f"no feasible network of treewidth <= {omega}")
    ids = list(iter_bits(mask))
    if omega == 1:
        assert is_polyforest(g, ids)
    else:
        td = tree_decomposition(simple_adjacency(g, ids))
        assert td.width <= omega
    return make_solution(g, ids, p)


def _polyforest_mask_check(g: Graph) -> Callable[[int], bool]:
    def check(mask: int) -> bool:
        return is_polyforest(g, iter_bits(mask))

    return check


def solve_in_class(inst: Instance, cls: SolutionClass, budget: OracleBudget = OracleBudget()) -> Solution:
    """Path-union search under an arbitrary subgraph-closed class."""
    if not cls.subgraph_closed:
        raise ContractViolation("path-union search needs a subgraph-closed class")
    g, p = inst.graph, inst.pattern
    admissible = _polyforest_mask_check(g) if cls.kind == "polytree" else _ClassCache(g, cls, p.terminals)
    mask = path_union_search(g, p.demands, admissible, budget)
    if mask is None:
        raise NoFeasibleNetwork(f"no feasible network in class {cls.token()}")
    return make_solution(g, iter_bits(mask), p)
