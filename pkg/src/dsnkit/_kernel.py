"""Bitmask search kernel: integer-scaled weights, reachability and bounded Dijkstra.

Edges are bits of a Python int, vertices are bits of another.  Weights are
multiplied by the lcm of their denominators so the hot loops stay on ints;
nothing is rounded.
"""

from __future__ import annotations

import heapq
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CapacityError
from .graph import Graph, iter_bits


class Kernel:
    def __init__(self, g: Graph) -> None:
        self.g = g
        self.n = g.vertex_count
        self.m = g.m
        scale = 1
        for e in g.edges:
            scale = math.lcm(scale, e.weight.denominator)
        self.scale = scale
        self.w = [int(e.weight * scale) for e in g.edges]
        self.tail = [e.tail for e in g.edges]
        self.head = [e.head for e in g.edges]
        self.undirected = not g.directed
        self.full = (1 << self.m) - 1

    def to_weight(self, value: int) -> Fraction:
        return Fraction(value, self.scale)

    def mask_of(self, ids: Iterable[int]) -> int:
        mask = 0
        for i in ids:
            mask |= 1 << i
        return mask

    def cost(self, mask: int) -> int:
        return sum(self.w[i] for i in iter_bits(mask))

    def adjacency(self, mask: int) -> list[int]:
        adj = [0] * self.n
        tail, head = self.tail, self.head
        for i in iter_bits(mask):
            adj[tail[i]] |= 1 << head[i]
            if self.undirected:
                adj[head[i]] |= 1 << tail[i]
        return adj

    @staticmethod
    def reach(adj: Sequence[int], src: int) -> int:
        seen = 1 << src
        frontier = seen
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            new = adj[low.bit_length() - 1] & ~seen
            seen |= new
            frontier |= new
        return seen

    def satisfied(self, mask: int, demands: Sequence[tuple[int, int]]) -> bool:
        adj = self.adjacency(mask)
        cache: dict[int, int] = {}
        for s, t in demands:
            r = cache.get(s)
            if r is None:
                r = cache[s] = self.reach(adj, s)
            if not (r >> t) & 1:
                return False
        return True

    def unsatisfied(self, mask: int, demands: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
        adj = self.adjacency(mask)
        cache: dict[int, int] = {}
        out = []
        for s, t in demands:
            r = cache.get(s)
            if r is None:
                r = cache[s] = self.reach(adj, s)
            if not (r >> t) & 1:
                out.append((s, t))
        return out

    def distances(self, src: int, allowed: int, free: int) -> list[float]:
        """Shortest distances from src over ``allowed`` edges, edges in ``free`` cost nothing."""
        INF = math.inf
        dist = [INF] * self.n
        dist[src] = 0
        heap = [(0, src)]
        out_edges = self.g.out_edges
        while heap:
            d, v = heapq.heappop(heap)
            if d > dist[v]:
                continue
            for i in out_edges[v]:
                bit = 1 << i
                if not allowed & bit:
                    continue
                w = 0 if free & bit else self.w[i]
                u = self.head[i] if self.tail[i] == v else self.tail[i]
                nd = d + w
                if nd < dist[u]:
                    dist[u] = nd
                    heapq.heappush(heap, (nd, u))
        return dist

    def lower_bound(self, free: int, allowed: int, demands: Sequence[tuple[int, int]]) -> float:
        """Max over demands of the cheapest completion path; admissible for any superset of ``free``."""
        best = 0
        by_src: dict[int, list[float]] = {}
        for s, t in demands:
            d = by_src.get(s)
            if d is None:
                d = by_src[s] = self.distances(s, allowed, free)
            if d[t] > best:
                best = d[t]
        return best

    def simple_paths(self, s: int, t: int, allowed: int | None = None, limit: int = 500_000) -> list[int]:
        """Edge masks of all simple s->t paths."""
        allowed = self.full if allowed is None else allowed
        out: list[int] = []
        out_edges = self.g.out_edges
        stack = [(s, 1 << s, 0, iter(out_edges[s]))]
        while stack:
            v, vis, mask, it = stack[-1]
            for i in it:
                if not (allowed >> i) & 1:
                    continue
                u = self.head[i] if self.tail[i] == v else self.tail[i]
                if (vis >> u) & 1:
                    continue
                if u == t:
                    out.append(mask | (1 << i))
                    if len(out) > limit:
                        raise CapacityError(f"more than {limit} simple paths between {s} and {t}")
                    continue
                stack.append((u, vis | (1 << u), mask | (1 << i), iter(out_edges[u])))
                break
            else:
                stack.pop()
        return out

    def spanned(self, mask: int) -> int:
        vs = 0
        for i in iter_bits(mask):
            vs |= (1 << self.tail[i]) | (1 << self.head[i])
        return vs
