"""Exact treewidth by dynamic programming over eliminated vertex subsets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import CapacityError
from .graph import Graph, simple_adjacency

DEFAULT_CAP = 24


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...]
    width: int

    def is_valid_for(self, adj: Mapping[int, set[int]]) -> bool:
        covered = set().union(*self.bags) if self.bags else set()
        if set(adj) - covered:
            return False
        for v, nbrs in adj.items():
            for w in nbrs:
                if not any(v in b and w in b for b in self.bags):
                    return False
        # running intersection: bags containing v induce a connected subtree
        nb: dict[int, list[int]] = {i: [] for i in range(len(self.bags))}
        for a, b in self.tree_edges:
            nb[a].append(b)
            nb[b].append(a)
        for v in covered:
            holders = {i for i, b in enumerate(self.bags) if v in b}
            start = next(iter(holders))
            seen = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in nb[x]:
                    if y in holders and y not in seen:
                        seen.add(y)
                        stack.append(y)
            if seen != holders:
                return False
        return True


def _as_adjacency(ug: Graph | Mapping[int, set[int]]) -> dict[int, set[int]]:
    if isinstance(ug, Graph):
        adj = simple_adjacency(ug)
        for v in range(ug.vertex_count):
            adj.setdefault(v, set())
        return adj
    return {v: set(ns) for v, ns in ug.items()}


def _components(adj: dict[int, set[int]]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for s in sorted(adj):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def _order_width(adj: dict[int, set[int]], order: list[int]) -> int:
    g = {v: set(ns) for v, ns in adj.items()}
    width = 0
    for v in order:
        nbrs = g.pop(v)
        width = max(width, len(nbrs))
        for a in nbrs:
            g[a].discard(v)
            g[a] |= nbrs - {a}
    return width


def _min_fill_order(adj: dict[int, set[int]]) -> list[int]:
    g = {v: set(ns) for v, ns in adj.items()}
    order = []
    while g:
        def fill(v: int) -> tuple[int, int, int]:
            ns = list(g[v])
            missing = sum(1 for i, a in enumerate(ns) for b in ns[i + 1:] if b not in g[a])
            return (missing, len(ns), v)

        v = min(g, key=fill)
        nbrs = g.pop(v)
        for a in nbrs:
            g[a].discard(v)
            g[a] |= nbrs - {a}
        order.append(v)
    return order


def _degeneracy(adj: dict[int, set[int]]) -> int:
    g = {v: set(ns) for v, ns in adj.items()}
    best = 0
    while g:
        v = min(g, key=lambda x: (len(g[x]), x))
        best = max(best, len(g[v]))
        for a in g.pop(v):
            g[a].discard(v)
    return best


def _exact_component(adj: dict[int, set[int]], verts: list[int]) -> tuple[int, list[int]]:
    n = len(verts)
    if n == 1:
        return 0, list(verts)
    idx = {v: i for i, v in enumerate(verts)}
    nbr = [0] * n
    for v in verts:
        for w in adj[v]:
            nbr[idx[v]] |= 1 << idx[w]
    ub_order = _min_fill_order({v: adj[v] & set(verts) for v in verts})
    ub = _order_width(adj, ub_order)
    lb = _degeneracy({v: adj[v] & set(verts) for v in verts})
    if lb >= ub:
        return ub, ub_order

    def q_size(elim: int, v: int) -> int:
        # vertices outside elim ∪ {v} reachable from v through eliminated vertices
        seen = 1 << v
        frontier = 1 << v
        reach_out = 0
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            x = low.bit_length() - 1
            for_scan = nbr[x] & ~seen
            seen |= for_scan
            inside = for_scan & elim
            reach_out |= for_scan & ~elim
            frontier |= inside
        return bin(reach_out).count("1")

    # layer i holds eliminated sets of size i whose best width is below ub
    layer: dict[int, tuple[int, tuple[int, ...]]] = {0: (0, ())}
    full = (1 << n) - 1
    for _ in range(n):
        nxt: dict[int, tuple[int, tuple[int, ...]]] = {}
        for elim, (tw, order) in layer.items():
            rest = full & ~elim
            while rest:
                low = rest & -rest
                rest ^= low
                v = low.bit_length() - 1
                val = max(tw, q_size(elim, v))
                if val >= ub:
                    continue
                key = elim | low
                cur = nxt.get(key)
                if cur is None or val < cur[0]:
                    nxt[key] = (val, order + (v,))
        layer = nxt
        if not layer:
            break
    if full in layer:
        tw, order = layer[full]
        return tw, [verts[i] for i in order]
    return ub, ub_order


def elimination_order(ug: Graph | Mapping[int, set[int]], cap: int = DEFAULT_CAP) -> tuple[int, list[int]]:
    adj = _as_adjacency(ug)
    width = 0
    order: list[int] = []
    for comp in _components(adj):
        if len(comp) > cap:
            raise CapacityError(f"component with {len(comp)} vertices exceeds treewidth cap {cap}")
        w, o = _exact_component(adj, comp)
        width = max(width, w)
        order.extend(o)
    return width, order


def treewidth_exact(ug: Graph | Mapping[int, set[int]], cap: int = DEFAULT_CAP) -> int:
    """Exact treewidth of the underlying simple graph; an empty graph has width 0."""
    return elimination_order(ug, cap)[0]


def tree_decomposition(ug: Graph | Mapping[int, set[int]], cap: int = DEFAULT_CAP) -> TreeDecomposition:
    """Witness decomposition whose width equals :func:`treewidth_exact`."""
    adj = _as_adjacency(ug)
    width, order = elimination_order(adj, cap)
    pos = {v: i for i, v in enumerate(order)}
    g = {v: set(ns) for v, ns in adj.items()}
    bags: list[frozenset[int]] = []
    later: list[set[int]] = []
    for v in order:
        nbrs = g.pop(v)
        bags.append(frozenset(nbrs | {v}))
        later.append(set(nbrs))
        for a in nbrs:
            g[a].discard(v)
            g[a] |= nbrs - {a}
    edges = []
    for i, v in enumerate(order):
        if later[i]:
            parent = min(later[i], key=lambda x: pos[x])
            edges.append((i, pos[parent]))
        elif i + 1 < len(order):
            # component root: hang it off the next bag so the result is one tree
            edges.append((i, i + 1))
    td = TreeDecomposition(tuple(bags), tuple(edges), max((len(b) - 1 for b in bags), default=0))
    assert td.width == max(width, 0) or not bags
    return td
