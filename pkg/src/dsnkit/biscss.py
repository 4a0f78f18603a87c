"""Bidirected SCSS: exact solver through poly-tree patterns, and the poly-tree split of an optimum."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

import networkx as nx

from ._kernel import Kernel
from ._union import Candidate, cheapest_union
from .errors import CapacityError, ContractViolation, NoFeasibleNetwork
from .exact import OracleBudget, dsn_bounded_tw
from .graph import (
    Graph,
    Instance,
    Pattern,
    Solution,
    is_bidirected,
    is_polyforest,
    iter_bits,
    make_solution,
    reach_relation,
    reachable,
    tie_break_key,
    to_networkx,
)
from .planar import _preorders

DEFAULT_PATTERN_CAP = 4096
DEFAULT_TREE_CAP = 200_000


def _partial_orders(terms: Sequence[int], realizable: set[tuple[int, int]]) -> list[Pattern]:
    out = []
    for size in range(2, len(terms) + 1):
        for subset in combinations(terms, size):
            for rel in _preorders(list(subset)):
                if any((b, a) in rel for a, b in rel):
                    continue
                if not rel or not rel <= realizable:
                    continue
                if {v for pair in rel for v in pair} != set(subset):
                    continue
                out.append(Pattern(tuple(subset), tuple(sorted(rel))))
    return out


def _count_partial_order_bound(k: int) -> int:
    return 2 ** (k * k - k)


def _pattern_candidates(g: Graph, terms: Sequence[int], k: Kernel, budget: OracleBudget) -> list[Candidate]:
    realizable = {(s, t) for s in terms for t in reachable(g, s) if t in terms and t != s}
    cands, seen = [], set()
    for q in _partial_orders(terms, realizable):
        try:
            sol = dsn_bounded_tw(Instance(g, q, "dsn", True), 1, budget, vertex_cap=g.vertex_count)
        except NoFeasibleNetwork:
            continue
        mask = k.mask_of(sol.edge_ids)
        if mask and mask not in seen:
            seen.add(mask)
            cands.append(Candidate(mask, q))
    return cands


def _tree_candidates(g: Graph, terms: Sequence[int], k: Kernel, cap: int) -> list[Candidate]:
    """Cheapest poly-tree per terminal reach pattern, among poly-trees whose leaves are terminals."""
    tset = set(terms)
    best: dict[frozenset[tuple[int, int]], tuple[int, int]] = {}
    seen: set[int] = set()
    stack: list[tuple[int, frozenset[int]]] = []
    for e in g.edges:
        if e.tail in tset:
            m = 1 << e.id
            seen.add(m)
            stack.append((m, frozenset((e.tail, e.head))))
    while stack:
        mask, verts = stack.pop()
        if len(seen) > cap:
            raise CapacityError(f"more than {cap} poly-trees enumerated")
        ids = list(iter_bits(mask))
        degree: dict[int, int] = {}
        for i in ids:
            e = g.edges[i]
            degree[e.tail] = degree.get(e.tail, 0) + 1
            degree[e.head] = degree.get(e.head, 0) + 1
        if all(v in tset for v, d in degree.items() if d == 1):
            rel = frozenset(reach_relation(g, ids, sorted(verts & tset)))
            if rel:
                cost = k.cost(mask)
                if rel not in best or (cost, mask) < best[rel]:
                    best[rel] = (cost, mask)
        for v in verts:
            for i in g.out_edges[v] + g.in_edges[v]:
                e = g.edges[i]
                fresh = e.head if e.tail == v else e.tail
                if fresh in verts:
                    continue
                nm = mask | (1 << i)
                if nm not in seen:
                    seen.add(nm)
                    stack.append((nm, verts | {fresh}))
    return [Candidate(mask, rel) for rel, (_, mask) in sorted(best.items(), key=lambda kv: kv[1])]


def biscss_fpt(
    g: Graph,
    R: Iterable[int],
    cap_patterns: int = DEFAULT_PATTERN_CAP,
    tree_cap: int = DEFAULT_TREE_CAP,
    budget: OracleBudget = OracleBudget(),
) -> Solution:
    """Minimum-cost network strongly connecting R, built as a union of poly-tree pattern solutions.

    With few terminals every partial order on a terminal subset is solved
    by the treewidth-1 search.  Past ``cap_patterns`` the candidates are
    instead the cheapest terminal-leaved poly-tree for each reach pattern,
    found by growing trees arc by arc.
    """
    if not is_bidirected(g):
        raise ContractViolation("biscss_fpt needs a bidirected graph")
    terms = sorted(set(R))
    p = Pattern.strongly_connect(terms)
    if len(terms) <= 1:
        return make_solution(g, (), p)
    if not set(terms) <= reachable(g, terms[0]):
        raise NoFeasibleNetwork("terminals are not strongly connectable")
    k = Kernel(g)
    if _count_partial_order_bound(len(terms)) <= cap_patterns:
        cands = _pattern_candidates(g, terms, k, budget)
    else:
        cands = _tree_candidates(g, terms, k, tree_cap)
    found = cheapest_union(k, cands, p.demands)
    if found is None:
        raise NoFeasibleNetwork("terminals are not strongly connectable")
    sol = make_solution(g, iter_bits(found[0]), p)
    assert sol.feasible
    return sol


def polytree_decompose(g: Graph, N: Solution | Iterable[int], R: Iterable[int]) -> list[tuple[Pattern, Solution]]:
    """Split N into edge-disjoint poly-trees, each with its terminal reach pattern.

    Pieces are cut at terminals and articulation points.  Pieces meeting at a
    Steiner articulation point are merged while the result stays a poly-tree,
    so maximal paths do not stop at Steiner vertices.
    """
    ids = set(N.edge_ids if isinstance(N, Solution) else N)
    if not is_bidirected(g):
        raise ContractViolation("polytree_decompose needs a bidirected host graph")
    terms = set(R)
    if not ids:
        return []
    ug = nx.Graph(to_networkx(g, ids))
    cut = set(nx.articulation_points(ug))
    anchors = terms | cut

    pieces: list[set[int]] = []
    for block in nx.biconnected_components(ug):
        block_ids = sorted((i for i in ids if {g.edges[i].tail, g.edges[i].head} <= block),
                           key=lambda i: tie_break_key(g, i))
        pieces.extend(_cut_at_anchors(g, block_ids, anchors))

    # split any piece that is not a poly-tree into greedy maximal poly-trees
    trees: list[set[int]] = []
    for piece in pieces:
        trees.extend(_greedy_polytrees(g, piece))

    for x in sorted(cut - terms):
        at_x = [t for t in trees if any(x in (g.edges[i].tail, g.edges[i].head) for i in t)]
        merged: list[set[int]] = []
        for t in at_x:
            for m in merged:
                trial = m | t
                if is_polyforest(g, trial) and _connected(g, trial):
                    m |= t
                    break
            else:
                merged.append(set(t))
        trees = [t for t in trees if not any(t is a for a in at_x)] + merged

    out = []
    for t in sorted(trees, key=lambda s: min(s)):
        present = sorted(g.spanned_vertices(t) & terms)
        rel = reach_relation(g, t, present)
        pat = Pattern(tuple(present), tuple(sorted(rel)))
        out.append((pat, make_solution(g, t, pat)))
    union = set().union(*(s.edge_ids for _, s in out))
    assert union == ids and sum(len(s) for _, s in out) == len(ids)
    return out


def _cut_at_anchors(g: Graph, block_ids: Sequence[int], anchors: set[int]) -> list[set[int]]:
    """Group arcs that are joined through non-anchor vertices."""
    parent = {i: i for i in block_ids}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_vertex: dict[int, list[int]] = {}
    for i in block_ids:
        e = g.edges[i]
        for v in (e.tail, e.head):
            if v not in anchors:
                by_vertex.setdefault(v, []).append(i)
    for group in by_vertex.values():
        for i in group[1:]:
            parent[find(i)] = find(group[0])
    groups: dict[int, set[int]] = {}
    for i in block_ids:
        groups.setdefault(find(i), set()).add(i)
    return [groups[r] for r in sorted(groups)]


def _connected(g: Graph, ids: set[int]) -> bool:
    ug = to_networkx(g, ids)
    return ug.number_of_nodes() == 0 or nx.is_connected(nx.Graph(ug))


def _greedy_polytrees(g: Graph, piece: set[int]) -> list[set[int]]:
    if is_polyforest(g, piece):
        return [piece]
    rest = sorted(piece, key=lambda i: tie_break_key(g, i))
    out = []
    while rest:
        tree = {rest.pop(0)}
        grew = True
        while grew:
            grew = False
            for i in list(rest):
                e = g.edges[i]
                touch = g.spanned_vertices(tree)
                if (e.tail in touch or e.head in touch) and is_polyforest(g, tree | {i}):
                    tree.add(i)
                    rest.remove(i)
                    grew = True
        out.append(tree)
    return out
