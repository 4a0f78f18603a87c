"""Planar-solution machinery for bidirected DSN.

The exact XP solver bounds the treewidth of the search space by
``ceil(6 * sqrt(k))``.  The approximation scheme solves every small pattern
exactly and combines the pieces.  The decomposition half (terminal paths,
tau-chop r-divisions, :func:`build_decomposition`) rebuilds the
certificate that a planar optimum splits into few-terminal sub-networks
whose union stays feasible.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from ._kernel import Kernel
from ._union import Candidate, cheapest_union
from .errors import CapacityError, ContractViolation, DivisionError, NoFeasibleNetwork
from .exact import OracleBudget, path_union_search
from .graph import (
    Edge,
    Graph,
    Instance,
    Pattern,
    Solution,
    check_feasible,
    in_class,
    is_bidirected,
    is_planar,
    iter_bits,
    make_solution,
    multigraph_treewidth,
    reach_relation,
    reachable,
    scc_condensation,
    simple_adjacency,
    tie_break_key,
    PLANAR,
)
from .structure import condensation_is_polyforest, normalize_solution, reduce_degrees

C_PATHS = 18
DEFAULT_G_CAP = 8
DEFAULT_R_CAP = 64
DEFAULT_PATTERN_CAP = 4096
CHOP_DEPTH = 5


def planar_treewidth_bound(k: int) -> int:
    """ceil(6 * sqrt(k)) computed exactly."""
    if k <= 0:
        return 1
    return math.isqrt(36 * k - 1) + 1


def bidsn_planar_xp(inst: Instance, budget: OracleBudget = OracleBudget()) -> Solution:
    """Optimum planar solution, searched among networks of treewidth at most ceil(6 sqrt k)."""
    g, p = inst.graph, inst.pattern
    if not is_bidirected(g):
        raise ContractViolation("bidsn_planar_xp needs a bidirected graph")
    omega = planar_treewidth_bound(p.k)
    memo: dict[int, bool] = {}

    def admissible(mask: int) -> bool:
        hit = memo.get(mask)
        if hit is None:
            ids = list(iter_bits(mask))
            nverts = len(g.spanned_vertices(ids))
            hit = (nverts < 5 or is_planar(g, ids)) and (nverts <= omega + 1 or multigraph_treewidth(g, ids) <= omega)
            memo[mask] = hit
        return hit

    mask = path_union_search(g, p.demands, admissible, budget)
    if mask is None:
        raise NoFeasibleNetwork("no planar feasible network")
    sol = make_solution(g, iter_bits(mask), p)
    assert in_class(g, sol.edge_ids, PLANAR)
    return sol


# ---------------------------------------------------------------------------
# approximation scheme


def pattern_size_bound(epsilon: Fraction, cap: int = DEFAULT_G_CAP) -> int:
    """2 ** ceil(1/epsilon), capped."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ContractViolation("epsilon must be positive")
    return min(2 ** math.ceil(1 / eps), cap)


def _preorders(elems: Sequence[int]) -> Iterable[frozenset[tuple[int, int]]]:
    """Every transitive relation on ``elems`` (diagonal left out), built one element at a time."""

    def extend(j: int, rel: frozenset[tuple[int, int]]):
        if j == len(elems):
            yield rel
            return
        x = elems[j]
        prev = elems[:j]
        for dn in range(1 << j):
            down = {prev[i] for i in range(j) if (dn >> i) & 1}
            if any((y, d) in rel and y not in down for d in down for y in prev):
                continue
            for up_bits in range(1 << j):
                up = {prev[i] for i in range(j) if (up_bits >> i) & 1}
                if any((u, y) in rel and y not in up for u in up for y in prev):
                    continue
                if any(d != u and (d, u) not in rel for d in down for u in up):
                    continue
                new = set(rel)
                new.update((d, x) for d in down)
                new.update((x, u) for u in up)
                yield from extend(j + 1, frozenset(new))

    yield from extend(0, frozenset())


def candidate_patterns(g: Graph, terminals: Sequence[int], size_bound: int, cap: int = DEFAULT_PATTERN_CAP) -> list[Pattern]:
    """Transitive, realizable patterns on 2..size_bound terminals with no isolated terminal."""
    terms = sorted(terminals)
    realizable = {(s, t) for s in terms for t in reachable(g, s) if t in terms and t != s}
    out: list[Pattern] = []
    for size in range(2, min(size_bound, len(terms)) + 1):
        for subset in combinations(terms, size):
            for rel in _preorders(list(subset)):
                if not rel or not rel <= realizable:
                    continue
                if {v for pair in rel for v in pair} != set(subset):
                    continue
                out.append(Pattern(tuple(subset), tuple(sorted(rel))))
                if len(out) > cap:
                    raise CapacityError(f"more than {cap} candidate patterns")
    return out


def bidsn_planar_pas(
    inst: Instance,
    epsilon: Fraction,
    g_cap: int = DEFAULT_G_CAP,
    pattern_cap: int = DEFAULT_PATTERN_CAP,
    budget: OracleBudget = OracleBudget(),
) -> Solution:
    """Cheapest feasible union of optimum planar solutions to patterns on at most g(epsilon) terminals."""
    g, p = inst.graph, inst.pattern
    if not is_bidirected(g):
        raise ContractViolation("bidsn_planar_pas needs a bidirected graph")
    if not p.demands:
        return make_solution(g, (), p)
    for s, t in p.demands:
        if t not in reachable(g, s):
            raise NoFeasibleNetwork(f"demand ({s},{t}) unreachable")
    bound = pattern_size_bound(epsilon, g_cap)
    patterns = candidate_patterns(g, p.terminals, bound, pattern_cap)
    k = Kernel(g)
    cands: list[Candidate] = []
    seen: set[int] = set()
    for q in patterns:
        try:
            sol = bidsn_planar_xp(Instance(g, q, "dsn", True), budget)
        except NoFeasibleNetwork:
            continue
        mask = k.mask_of(sol.edge_ids)
        if mask not in seen:
            seen.add(mask)
            cands.append(Candidate(mask, q))
    found = cheapest_union(k, cands, p.demands)
    if found is None:
        raise NoFeasibleNetwork("no union of pattern solutions is feasible")
    return make_solution(g, iter_bits(found[0]), p)


# ---------------------------------------------------------------------------
# terminal paths


def _simple_degree(g: Graph, ids: Iterable[int]) -> dict[int, int]:
    return {v: len(ns) for v, ns in simple_adjacency(g, ids).items()}


def _weak_components(g: Graph, ids: set[int]) -> list[set[int]]:
    adj = simple_adjacency(g, ids)
    seen: set[int] = set()
    comps = []
    for s in sorted(adj):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(comp)
    return comps


def _bfs_tree(g: Graph, ids: set[int], root: int, forward: bool) -> dict[int, int]:
    """Parent edge per vertex of a BFS arborescence (out of root if forward, into it otherwise)."""
    parent_edge: dict[int, int] = {}
    seen = {root}
    q = deque([root])
    while q:
        v = q.popleft()
        nbr = g.out_edges[v] if forward else g.in_edges[v]
        for eid in sorted((e for e in nbr if e in ids), key=lambda e: tie_break_key(g, e)):
            e = g.edges[eid]
            u = e.head if forward else e.tail
            if u not in seen:
                seen.add(u)
                parent_edge[u] = eid
                q.append(u)
    return parent_edge


def _prune_tree(g: Graph, parent_edge: dict[int, int], keep: set[int], forward: bool) -> dict[int, list[tuple[int, int]]]:
    """Children lists (child, edge) after stripping leaves outside ``keep``."""
    pe = dict(parent_edge)
    while True:
        parents = {(g.edges[e].tail if forward else g.edges[e].head) for e in pe.values()}
        drop = [v for v in pe if v not in parents and v not in keep]
        if not drop:
            break
        for v in drop:
            del pe[v]
    children: dict[int, list[tuple[int, int]]] = {}
    for v, e in sorted(pe.items(), key=lambda kv: tie_break_key(g, kv[1])):
        par = g.edges[e].tail if forward else g.edges[e].head
        children.setdefault(par, []).append((v, e))
    return children


def terminal_paths(gN: Graph, N: Solution | Iterable[int], R: Iterable[int]) -> dict[int, tuple[int, ...]]:
    """One v->terminal path (edge ids of gN) per Steiner vertex of N."""
    ids = set(N.edge_ids if isinstance(N, Solution) else N)
    if not is_bidirected(gN):
        raise ContractViolation("terminal_paths needs a bidirected host graph")
    terms = set(R)
    deg = _simple_degree(gN, ids)
    for v, d in deg.items():
        if v in terms and d != 1:
            raise ContractViolation(f"degree shape: terminal {v} has {d} neighbours, expected 1")
        if v not in terms and d > 3:
            raise ContractViolation(f"degree shape: Steiner vertex {v} has {d} neighbours, expected at most 3")
    if not condensation_is_polyforest(gN, ids):
        raise ContractViolation("condensation shape: condensation of N is not a poly-forest")
    partner = gN.reverse_partner
    assign, _ = scc_condensation(gN, ids)
    paths: dict[int, tuple[int, ...]] = {}
    total_cost = gN.cost(ids)

    for comp in _weak_components(gN, ids):
        comp_ids = {i for i in ids if gN.edges[i].tail in comp}
        comp_terms = sorted(comp & terms)
        steiner = sorted(comp - terms)
        if not steiner:
            continue
        if not comp_terms:
            raise ContractViolation("component shape: a component of N has no terminal")
        closure = set(comp_ids)
        for i in comp_ids:
            e = gN.edges[i]
            if assign[e.tail] != assign[e.head]:
                closure.add(partner[i])
        root = comp_terms[0]
        keep = set(comp_terms)
        out_children = _prune_tree(gN, _bfs_tree(gN, closure, root, True), keep, True)
        in_children = _prune_tree(gN, _bfs_tree(gN, closure, root, False), keep, False)

        def descend(children: dict[int, list[tuple[int, int]]], v: int, first: int, forward: bool) -> list[int]:
            # start through children[v][first], then keep taking the first child down to a leaf
            route = []
            child, e = children[v][first]
            route.append(e if forward else partner[e])
            while child in children:
                child, e = children[child][0]
                route.append(e if forward else partner[e])
            return route

        branching: dict[int, list[int]] = {}
        for children, forward in ((out_children, True), (in_children, False)):
            for v, kids in sorted(children.items()):
                if len(kids) >= 2 and v not in terms and v not in branching:
                    branching[v] = descend(children, v, 1, forward)
        for v, route in branching.items():
            paths[v] = tuple(route)
        anchors = set(comp_terms) | set(branching)

        und = simple_adjacency(gN, closure)
        for v in steiner:
            if v in paths:
                continue
            hop = _hop_route(gN, closure, und, v, anchors)
            w = gN.edges[hop[-1]].head
            route = list(hop) + ([] if w in terms else list(paths[w]))
            paths[v] = tuple(_shortcut(gN, route, v))

    for v, route in paths.items():
        _check_path(gN, route, v, terms)
    path_cost = sum((gN.cost(r) for r in paths.values()), Fraction(0))
    if path_cost > C_PATHS * total_cost:
        raise ContractViolation(f"path bound: total path cost {path_cost} exceeds {C_PATHS} x {total_cost}")
    usage: dict[frozenset[int], int] = {}
    for route in paths.values():
        for e in route:
            unit = frozenset((e, partner[e]))
            usage[unit] = usage.get(unit, 0) + 1
    if usage and max(usage.values()) > C_PATHS:
        raise ContractViolation(f"path bound: an edge lies on more than {C_PATHS} paths")
    return paths


def _hop_route(g: Graph, closure: set[int], und: Mapping[int, set[int]], v: int, anchors: set[int]) -> list[int]:
    """Arcs of a shortest-hop walk from v to the nearest anchor (normally within two hops)."""
    prev = {v: None}
    q = deque([v])
    target = None
    while q:
        x = q.popleft()
        if x != v and x in anchors:
            target = x
            break
        for y in sorted(und.get(x, ())):
            if y not in prev:
                prev[y] = x
                q.append(y)
    if target is None:
        raise ContractViolation(f"component shape: Steiner vertex {v} reaches no terminal")
    chain = [target]
    while prev[chain[-1]] is not None:
        chain.append(prev[chain[-1]])
    chain.reverse()
    route = []
    for a, b in zip(chain, chain[1:]):
        arcs = [e for e in g.out_edges[a] if g.edges[e].head == b]
        route.append(min(arcs, key=lambda e: (e not in closure, tie_break_key(g, e))))
    return route


def _shortcut(g: Graph, route: list[int], start: int) -> list[int]:
    """Remove loops from a walk so the result is a simple path."""
    out: list[int] = []
    pos = {start: 0}
    cur = start
    for e in route:
        nxt = g.edges[e].head
        if nxt in pos:
            cut = pos[nxt]
            for dropped in out[cut:]:
                pos.pop(g.edges[dropped].head, None)
            out = out[:cut]
            pos[nxt] = cut
        else:
            out.append(e)
            pos[nxt] = len(out)
        cur = nxt
    return out


def _check_path(g: Graph, route: Sequence[int], v: int, terms: set[int]) -> None:
    cur = v
    for e in route:
        if g.edges[e].tail != cur:
            raise AssertionError(f"path from {v} is not a directed walk")
        cur = g.edges[e].head
    if cur not in terms:
        raise AssertionError(f"path from {v} ends at non-terminal {cur}")


# ---------------------------------------------------------------------------
# tau-chop r-divisions


@dataclass(frozen=True)
class RDivision:
    edge_partition: tuple[frozenset[int], ...]
    boundary_vertices: frozenset[int]
    r: int
    offsets: tuple[int, ...]
    tau: int
    boundary_weight: Fraction
    total_weight: Fraction


def _induced_components(adj: Mapping[int, set[int]], part: set[int]) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for s in sorted(part):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in part and y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        out.append(comp)
    return out


def _chop(adj: Mapping[int, set[int]], part: set[int], tau: int, tau0: int) -> list[set[int]]:
    """One tau-chop: BFS annuli from the lowest vertex of each component."""
    pieces = []
    for comp in _induced_components(adj, part):
        cset = set(comp)
        root = min(comp)
        dist = {root: 0}
        q = deque([root])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if y in cset and y not in dist:
                    dist[y] = dist[x] + 1
                    q.append(y)
        rings: dict[int, set[int]] = {}
        for x, d in dist.items():
            idx = 0 if d < tau0 else 1 + (d - tau0) // tau
            rings.setdefault(idx, set()).add(x)
        pieces.extend(rings[i] for i in sorted(rings))
    return pieces


def _regions(units: Sequence[tuple[int, int]], parts: list[set[int]]) -> dict[int, list[int]]:
    owner = {v: i for i, part in enumerate(parts) for v in part}
    regions: dict[int, list[int]] = {}
    for idx, (a, b) in enumerate(units):
        regions.setdefault(owner[min(a, b)], []).append(idx)
    return regions


def _span(units: Sequence[tuple[int, int]], members: Iterable[int]) -> set[int]:
    out: set[int] = set()
    for i in members:
        out.update(units[i])
    return out


def tau_chop_division(
    N: Graph,
    vertex_weights: Mapping[int, Fraction],
    r: int,
    h: int = CHOP_DEPTH,
    tau: int | None = None,
    tau_scale: int = 1,
) -> RDivision:
    if r < 2:
        raise ContractViolation("r must be at least 2")
    adj = simple_adjacency(N)
    for v, ns in adj.items():
        if len(ns) > 3:
            raise ContractViolation(f"degree shape: vertex {v} has {len(ns)} neighbours, expected at most 3")
    verts = set(adj) if adj else set(range(N.vertex_count))
    total = sum((Fraction(vertex_weights.get(v, 0)) for v in verts), Fraction(0))
    tau = tau if tau is not None else max(1, math.ceil(math.log2(r)) * tau_scale)
    # one undirected unit per adjacent pair; arcs follow their unit
    unit_of: dict[tuple[int, int], int] = {}
    units: list[tuple[int, int]] = []
    arcs_of: list[list[int]] = []
    for e in N.edges:
        key = (min(e.tail, e.head), max(e.tail, e.head))
        if key not in unit_of:
            unit_of[key] = len(units)
            units.append(key)
            arcs_of.append([])
        arcs_of[unit_of[key]].append(e.id)

    def finish(groups: list[list[int]], offsets: tuple[int, ...]) -> RDivision:
        seen_in: dict[int, int] = {}
        for gi, grp in enumerate(groups):
            for v in _span(units, grp):
                seen_in[v] = seen_in.get(v, 0) + 1
        boundary = frozenset(v for v, c in seen_in.items() if c >= 2)
        weight = sum((Fraction(vertex_weights.get(v, 0)) for v in boundary), Fraction(0))
        partition = tuple(frozenset(a for u in grp for a in arcs_of[u]) for grp in groups)
        return RDivision(partition if partition else (frozenset(),), boundary, r, offsets, tau, weight, total)

    if len(verts) <= r:
        best = finish([list(range(len(units)))] if units else [], ())
    else:
        best = None
        for tau0 in range(1, tau + 1):
            parts = [set(verts)]
            for _ in range(h - 1):
                parts = [piece for part in parts for piece in _chop(adj, part, tau, tau0)]
            groups = _refine(adj, units, parts, r, tau, tau0)
            cand = finish(groups, (tau0,) * (h - 1))
            if best is None or cand.boundary_weight < best.boundary_weight:
                best = cand
    assert best is not None
    for part in best.edge_partition:
        span = N.spanned_vertices(part)
        if len(span) > r:
            raise DivisionError(f"region spans {len(span)} > r = {r} vertices")
    if best.boundary_weight > Fraction(3 * h, tau) * total:
        raise DivisionError(f"boundary weight {best.boundary_weight} exceeds (3h/tau) x {total}")
    return best


def _refine(adj: Mapping[int, set[int]], units: Sequence[tuple[int, int]], parts: list[set[int]],
            r: int, tau: int, tau0: int) -> list[list[int]]:
    """Split oversized regions: chop again, then peel BFS layers, then cut a lone vertex's star."""
    parts = [set(p) for p in parts]
    while True:
        regions = _regions(units, parts)
        owner_part = {}
        for pi, members in regions.items():
            owner_part[pi] = members
        bad = [pi for pi, members in sorted(regions.items()) if len(_span(units, members)) > r and len(parts[pi]) > 1]
        if not bad:
            break
        new_parts = []
        for pi, part in enumerate(parts):
            if pi not in bad:
                new_parts.append(part)
                continue
            pieces = _chop(adj, part, tau, tau0)
            if len(pieces) == 1:
                pieces = _chop(adj, part, 1, 1)
            new_parts.extend(pieces)
        parts = new_parts
    groups: list[list[int]] = []
    for pi, members in sorted(_regions(units, parts).items()):
        if len(_span(units, members)) <= r:
            groups.append(sorted(members))
            continue
        # a single low vertex with too many higher neighbours: at most r-1 edges per group
        chunk: list[int] = []
        for u in sorted(members):
            chunk.append(u)
            if len(chunk) == r - 1:
                groups.append(chunk)
                chunk = []
        if chunk:
            groups.append(chunk)
    return groups


# ---------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class Decomposition:
    parts: tuple[tuple[Pattern, Solution], ...]
    epsilon: Fraction
    r: int


@dataclass(frozen=True)
class DecompositionReport:
    feasible: bool
    cost_ratio: Fraction
    max_part_terminals: int


def decomposition_r(epsilon: Fraction, cap: int = DEFAULT_R_CAP) -> int:
    return max(2, min(2 ** math.ceil(1 / Fraction(epsilon)), cap))


def _subgraph(g: Graph, ids: Iterable[int]) -> tuple[Graph, list[int]]:
    keep = sorted(set(ids))
    edges = tuple(Edge(g.edges[i].tail, g.edges[i].head, g.edges[i].weight, j) for j, i in enumerate(keep))
    return Graph(g.vertex_count, edges, g.labels), keep


def _part(g: Graph, ids: Iterable[int], terms: set[int]) -> tuple[Pattern, Solution]:
    ids = frozenset(ids)
    present = sorted(g.spanned_vertices(ids) & terms)
    rel = reach_relation(g, ids, present)
    pat = Pattern(tuple(present), tuple(sorted(rel)))
    return pat, make_solution(g, ids, pat)


def _terminal_clusters(g: Graph, expansion: Sequence[tuple[int, ...]], terms: set[int]) -> dict[int, list[int]]:
    """For each vertex glued to a terminal by zero-expansion arcs, the arc route to that terminal."""
    route: dict[int, list[int]] = {}
    for t in sorted(terms):
        route.setdefault(t, [])
        q = deque([t])
        while q:
            x = q.popleft()
            for a in g.in_edges[x]:
                y = g.edges[a].tail
                if not expansion[a] and y not in route:
                    route[y] = [a] + route[x]
                    q.append(y)
    return route


def _stop_at_cluster(g: Graph, route: Sequence[int], start: int, to_terminal: Mapping[int, list[int]]) -> tuple[int, ...]:
    """Cut a path where it first enters a terminal's zero cluster and finish on that terminal.

    Cluster arcs lift onto the terminal itself, so walking on past the
    cluster would drag a second terminal into the part.
    """
    if start in to_terminal:
        return tuple(to_terminal[start])
    out: list[int] = []
    for e in route:
        out.append(e)
        head = g.edges[e].head
        if head in to_terminal:
            return tuple(out + to_terminal[head])
    return tuple(out)


def build_decomposition(inst: Instance, N: Solution, epsilon: Fraction, r_cap: int = DEFAULT_R_CAP) -> Decomposition:
    g, p = inst.graph, inst.pattern
    if not is_bidirected(g):
        raise ContractViolation("build_decomposition needs a bidirected instance")
    if not check_feasible(g, N.edge_ids, p):
        raise ContractViolation("N is not feasible for the instance")
    eps = Fraction(epsilon)
    r = decomposition_r(eps, r_cap)
    terms = set(p.terminals)
    ids = set(N.edge_ids)
    comps = _weak_components(g, ids)
    if all(len(c) <= r for c in comps):
        parts = tuple(_part(g, {i for i in ids if g.edges[i].tail in c}, terms) for c in comps)
        return Decomposition(parts, eps, r)

    # closure of N inside g, then the degree-reduced copy
    partner = g.reverse_partner
    host_ids = sorted(ids | {partner[i] for i in ids})
    host, host_map = _subgraph(g, host_ids)
    local = {j for j, i in enumerate(host_map) if i in ids}
    present_terms = sorted(host.spanned_vertices(local) & terms)
    reduced, trace = reduce_degrees(host, present_terms)
    local_pattern = Pattern(tuple(present_terms), tuple(d for d in p.demands))
    start = trace.push(local)
    M = normalize_solution(reduced, start, local_pattern)
    paths = terminal_paths(reduced, M, present_terms)
    clusters = _terminal_clusters(reduced, trace.expansion, set(present_terms))
    paths = {v: _stop_at_cluster(reduced, route, v, clusters) for v, route in paths.items()}
    weights = {v: reduced.cost(route) for v, route in paths.items()}
    msub, mmap = _subgraph(reduced, M.edge_ids)
    division = tau_chop_division(msub, weights, r)
    rpartner = reduced.reverse_partner

    def to_g(reduced_ids: Iterable[int]) -> frozenset[int]:
        return frozenset(host_map[j] for j in trace.lift(reduced_ids))

    out = []
    for region in division.edge_partition:
        if not region:
            continue
        red = {mmap[i] for i in region}
        span = reduced.spanned_vertices(red)
        for v in sorted(span & division.boundary_vertices):
            if v in paths:
                red.update(paths[v])
                red.update(rpartner[e] for e in paths[v])
        lifted = to_g(red)
        if lifted:
            out.append(_part(g, lifted, terms))
    return Decomposition(tuple(out), eps, r)


def verify_decomposition(inst: Instance, N: Solution, d: Decomposition) -> DecompositionReport:
    g, p = inst.graph, inst.pattern
    union: set[int] = set()
    total = Fraction(0)
    for _, sub in d.parts:
        union |= sub.edge_ids
        total += sub.cost
    feasible = make_solution(g, union, p).feasible
    base = g.cost(N.edge_ids)
    ratio = Fraction(1) if base == 0 and total == 0 else (total / base if base else Fraction(10**9))
    most = max((len(pat.terminals) for pat, _ in d.parts), default=0)
    return DecompositionReport(feasible, ratio, most)
