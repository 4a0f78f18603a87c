"""Cheapest union of precomputed candidate networks that satisfies a demand set.

Shared by the planar approximation scheme and the bi-SCSS solver.  The
search branches on candidates that enlarge the reach of the first
unsatisfied demand's source; an edge leaving that reach set in any feasible
union belongs to a single candidate, so the branching loses no solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ._kernel import Kernel
from .errors import CapacityError


@dataclass(frozen=True)
class Candidate:
    mask: int
    label: object = None


def cheapest_union(
    k: Kernel,
    candidates: Sequence[Candidate],
    demands: Sequence[tuple[int, int]],
    node_cap: int = 2_000_000,
) -> tuple[int, list[int]] | None:
    """Returns (edge mask, chosen candidate indices) of minimum cost, or None."""
    if not demands:
        return 0, []
    allowed = 0
    for c in candidates:
        allowed |= c.mask
    if not k.satisfied(allowed, demands):
        return None
    order = sorted(range(len(candidates)), key=lambda i: (k.cost(candidates[i].mask), i))
    best_cost = math.inf
    best: tuple[int, list[int]] | None = None
    seen: set[int] = set()
    nodes = 0

    def rec(mask: int, cost: int, chosen: list[int]) -> None:
        nonlocal best_cost, best, nodes
        nodes += 1
        if nodes > node_cap:
            raise CapacityError(f"union search exceeded {node_cap} nodes")
        adj = k.adjacency(mask)
        unsat = [(s, t) for s, t in demands if not (k.reach(adj, s) >> t) & 1]
        if not unsat:
            if cost < best_cost:
                best_cost, best = cost, (mask, list(chosen))
            return
        if cost + k.lower_bound(mask, allowed, unsat) >= best_cost:
            return
        s = unsat[0][0]
        here = k.reach(adj, s)
        options = []
        for i in order:
            cm = candidates[i].mask
            extra = cm & ~mask
            if not extra:
                continue
            grown = k.reach(k.adjacency(mask | cm), s)
            if grown == here:
                continue
            options.append((k.cost(extra), i, mask | cm))
        options.sort()
        for add, i, nm in options:
            if cost + add >= best_cost:
                break
            if nm in seen:
                continue
            seen.add(nm)
            chosen.append(i)
            rec(nm, cost + add, chosen)
            chosen.pop()

    rec(0, 0, [])
    return best
