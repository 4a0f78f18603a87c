"""Instance generators for the lower-bound reductions, each with a certified budget.

Every generator returns a :class:`Certified` triple ``(instance, budget,
witness)``.  The witness is the canonical YES-case network when one is known
(supplied by the caller or found by brute force on the source instance).

Vertex labels follow ``<gadget>(<role>)``: ``HS[2,3](0_4)`` is the 0-vertex of
row 4 in the horizontal secondary gadget at (2,3), and ``a[1]`` is a border
vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

import networkx as nx

from .errors import ContractViolation
from .graph import Edge, Graph, Instance, Pattern, Solution, as_weight, make_solution


class Certified(NamedTuple):
    instance: Instance
    budget: Fraction
    witness: Solution | None


class _Builder:
    """Accumulates labelled vertices and arcs; ``edge`` adds both directions."""

    def __init__(self) -> None:
        self.labels: list[str] = []
        self.arcs: list[tuple[int, int, Fraction]] = []
        self.arc_id: dict[tuple[int, int], int] = {}
        self.by_label: dict[str, int] = {}

    def vertex(self, label: str) -> int:
        if label in self.by_label:
            raise ContractViolation(f"duplicate vertex label {label}")
        self.by_label[label] = len(self.labels)
        self.labels.append(label)
        return len(self.labels) - 1

    def arc(self, u: int, v: int, w: Fraction) -> int:
        key = (u, v)
        if key in self.arc_id:
            raise ContractViolation(f"parallel arc {self.labels[u]} -> {self.labels[v]}")
        self.arc_id[key] = len(self.arcs)
        self.arcs.append((u, v, w))
        return self.arc_id[key]

    def edge(self, u: int, v: int, w: Fraction) -> None:
        self.arc(u, v, w)
        self.arc(v, u, w)

    def graph(self) -> Graph:
        edges = tuple(Edge(u, v, w, i) for i, (u, v, w) in enumerate(self.arcs))
        return Graph(len(self.labels), edges, tuple(self.labels))


# ---------------------------------------------------------------------------
# uniqueness gadget


@dataclass(frozen=True)
class GadgetHandle:
    name: str
    rows: tuple[Hashable, ...]
    roles: Mapping[str, int]
    arc_ids: frozenset[int]

    def v(self, role: str) -> int:
        return self.roles[role]

    def row_vertex(self, level: int, row: Hashable) -> int:
        return self.roles[f"{level}_{_row_token(row)}"]


@dataclass(frozen=True)
class UniquenessGadget:
    n: int
    M: Fraction
    handle: GadgetHandle
    graph: Graph | None = field(default=None, compare=False)

    @property
    def boundary(self) -> frozenset[int]:
        h = self.handle
        return frozenset(h.row_vertex(lvl, r) for r in h.rows for lvl in (0, 3))


def _row_token(row: Hashable) -> str:
    if isinstance(row, tuple):
        return ".".join(map(str, row))
    return str(row)


def _add_gadget(b: _Builder, name: str, rows: Sequence[Hashable], M: Fraction) -> GadgetHandle:
    first_arc = len(b.arcs)
    roles: dict[str, int] = {}
    for role in ("s1", "s2", "t1", "t2"):
        roles[role] = b.vertex(f"{name}({role})")
    for row in rows:
        tok = _row_token(row)
        for lvl in range(4):
            roles[f"{lvl}_{tok}"] = b.vertex(f"{name}({lvl}_{tok})")
    for row in rows:
        tok = _row_token(row)
        path = [roles[f"{lvl}_{tok}"] for lvl in range(4)]
        for a, c in zip(path, path[1:]):
            b.edge(a, c, M)
        b.edge(roles["s1"], path[1], M)
        b.edge(roles["t1"], path[1], M)
        b.edge(roles["s2"], path[2], M)
        b.edge(roles["t2"], path[2], M)
    return GadgetHandle(name, tuple(rows), roles, frozenset(range(first_arc, len(b.arcs))))


def gen_uniqueness_gadget(n: int, M: int | str | Fraction = 1) -> tuple[Graph, UniquenessGadget]:
    if n < 1:
        raise ContractViolation("gadget needs n >= 1")
    M = as_weight(M)
    if M <= 0:
        raise ContractViolation("gadget weight must be positive")
    b = _Builder()
    h = _add_gadget(b, "U", list(range(1, n + 1)), M)
    g = b.graph()
    return g, UniquenessGadget(n, M, h, g)


def representation_arcs(g: Graph, gadget: UniquenessGadget, row: Hashable, orientation: str) -> frozenset[int]:
    """The 7 arcs of the right- or left-oriented set representing ``row``."""
    h = gadget.handle
    p = [h.row_vertex(lvl, row) for lvl in range(4)]
    arcs = [(h.v("s1"), p[1]), (h.v("s2"), p[2]), (p[1], h.v("t1")), (p[2], h.v("t2"))]
    if orientation == "right":
        arcs += [(p[0], p[1]), (p[1], p[2]), (p[2], p[3])]
    elif orientation == "left":
        arcs += [(p[1], p[0]), (p[2], p[1]), (p[3], p[2])]
    else:
        raise ContractViolation(f"orientation must be 'right' or 'left', got {orientation!r}")
    lookup = {(e.tail, e.head): e.id for e in g.edges if e.id in h.arc_ids}
    return frozenset(lookup[a] for a in arcs)


@dataclass(frozen=True)
class InOutReport:
    satisfies: bool
    weight: Fraction
    representation: tuple[Hashable, str] | None


def check_inout(gadget: UniquenessGadget, edge_ids: Iterable[int], g: Graph | None = None) -> InOutReport:
    """Evaluate the four in-out conditions on the arcs of ``edge_ids`` inside the gadget."""
    g = g if g is not None else gadget.graph
    if g is None:
        raise ContractViolation("check_inout needs the host graph")
    h = gadget.handle
    ids = frozenset(i for i in edge_ids if i in h.arc_ids)
    weight = g.cost(ids)
    succ: dict[int, list[int]] = {}
    pred: dict[int, list[int]] = {}
    for i in ids:
        e = g.edges[i]
        succ.setdefault(e.tail, []).append(e.head)
        pred.setdefault(e.head, []).append(e.tail)
    boundary = gadget.boundary

    def hits(start: int, nbrs: dict[int, list[int]]) -> bool:
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            if x in boundary:
                return True
            for y in nbrs.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    ok = (hits(h.v("s1"), succ) and hits(h.v("s2"), succ)
          and hits(h.v("t1"), pred) and hits(h.v("t2"), pred))
    rep = None
    if ok and weight == 7 * gadget.M:
        for row in h.rows:
            for side in ("right", "left"):
                if ids == representation_arcs(g, gadget, row, side):
                    rep = (row, side)
    return InOutReport(ok, weight, rep)


@dataclass(frozen=True)
class InOutCensus:
    min_weight: Fraction | None
    minimum_sets: tuple[frozenset[int], ...]
    examined: int


def inout_census(gadget: UniquenessGadget, max_arcs: int | None = None) -> InOutCensus:
    """Every arc subset of size <= max_arcs that satisfies in-out, reduced to the lightest ones.

    Each of s1, s2 needs an out-arc and each of t1, t2 an in-arc; subsets
    that cannot still pick one from every missing group are skipped, which
    keeps the U_2 census at a few hundred thousand leaves.
    """
    g = gadget.graph
    if g is None:
        raise ContractViolation("census needs a standalone gadget")
    h = gadget.handle
    cap = g.m if max_arcs is None else max_arcs
    groups = [
        {i for i in g.out_edges[h.v("s1")]},
        {i for i in g.out_edges[h.v("s2")]},
        {i for i in g.in_edges[h.v("t1")]},
        {i for i in g.in_edges[h.v("t2")]},
    ]
    member = {i: gi for gi, grp in enumerate(groups) for i in grp}
    order = sorted(range(g.m), key=lambda i: (i not in member, member.get(i, 0), i))
    last_of_group = [max(order.index(i) for i in grp) for grp in groups]
    nverts = g.vertex_count
    tails = [g.edges[i].tail for i in order]
    heads = [g.edges[i].head for i in order]
    weights = [g.edges[i].weight for i in order]
    bmask = 0
    for v in gadget.boundary:
        bmask |= 1 << v
    s1, s2, t1, t2 = (h.v(r) for r in ("s1", "s2", "t1", "t2"))

    def closure(start: int, nbrs: list[int]) -> int:
        seen = 1 << start
        frontier = seen
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            x = low.bit_length() - 1
            new = nbrs[x] & ~seen
            seen |= new
            frontier |= new
        return seen

    best: Fraction | None = None
    found: list[frozenset[int]] = []
    examined = 0
    chosen: list[int] = []

    def leaf() -> None:
        nonlocal best, examined
        examined += 1
        out = [0] * nverts
        inn = [0] * nverts
        for j in chosen:
            out[tails[j]] |= 1 << heads[j]
            inn[heads[j]] |= 1 << tails[j]
        if not (closure(s1, out) & bmask and closure(s2, out) & bmask
                and closure(t1, inn) & bmask and closure(t2, inn) & bmask):
            return
        w = sum((weights[j] for j in chosen), Fraction(0))
        ids = frozenset(order[j] for j in chosen)
        if best is None or w < best:
            best, found[:] = w, [ids]
        elif w == best:
            found.append(ids)

    def rec(pos: int, covered: int) -> None:
        for gi in range(4):
            if not (covered >> gi) & 1 and pos > last_of_group[gi]:
                return
        missing = 4 - bin(covered).count("1")
        if missing > cap - len(chosen):
            return
        if pos == len(order):
            leaf()
            return
        j = pos
        i = order[j]
        if len(chosen) < cap:
            chosen.append(j)
            rec(pos + 1, covered | (1 << member[i]) if i in member else covered)
            chosen.pop()
        rec(pos + 1, covered)

    rec(0, 0)
    return InOutCensus(best, tuple(sorted(found, key=sorted)), examined)


# ---------------------------------------------------------------------------
# grid tiling -> planar bidirected DSN


@dataclass(frozen=True)
class GridTilingInput:
    k: int
    n: int
    S: Mapping[tuple[int, int], frozenset[tuple[int, int]]]

    def __post_init__(self) -> None:
        for i in range(1, self.k + 1):
            for j in range(1, self.k + 1):
                cell = self.S.get((i, j))
                if not cell:
                    raise ContractViolation(f"S[{i},{j}] must be non-empty")
                for x, y in cell:
                    if not (1 <= x <= self.n and 1 <= y <= self.n):
                        raise ContractViolation(f"S[{i},{j}] entry {(x, y)} outside [n]x[n]")


def solve_grid_tiling(gt: GridTilingInput) -> dict[tuple[int, int], tuple[int, int]] | None:
    """Row value alpha_i shared along row i, column value beta_j shared along column j."""
    k, n = gt.k, gt.n
    for alphas in product(range(1, n + 1), repeat=k):
        ok_rows = all(any(x == alphas[i - 1] for x, _ in gt.S[(i, j)]) for i in range(1, k + 1) for j in range(1, k + 1))
        if not ok_rows:
            continue
        for betas in product(range(1, n + 1), repeat=k):
            if all((alphas[i - 1], betas[j - 1]) in gt.S[(i, j)] for i in range(1, k + 1) for j in range(1, k + 1)):
                return {(i, j): (alphas[i - 1], betas[j - 1]) for i in range(1, k + 1) for j in range(1, k + 1)}
    return None


def gridtiling_budget(k: int, M: Fraction) -> Fraction:
    B = 7 * M
    return 4 * k + 2 * k * (k + 1) * B + k * k * (B + 4)


def gen_gridtiling_bidsnplanar(
    gt: GridTilingInput,
    M: int | str | Fraction | None = None,
    solution: Mapping[tuple[int, int], tuple[int, int]] | None = None,
) -> Certified:
    k, n = gt.k, gt.n
    M = as_weight(k ** 4 if M is None else M)
    one = Fraction(1)
    b = _Builder()
    main = {(i, j): _add_gadget(b, f"M[{i},{j}]", sorted(gt.S[(i, j)]), M)
            for i in range(1, k + 1) for j in range(1, k + 1)}
    hs = {(i, j): _add_gadget(b, f"HS[{i},{j}]", list(range(1, n + 1)), M)
          for i in range(1, k + 1) for j in range(1, k + 2)}
    vs = {(i, j): _add_gadget(b, f"VS[{i},{j}]", list(range(1, n + 1)), M)
          for i in range(1, k + 2) for j in range(1, k + 1)}
    border = {c: [None] + [b.vertex(f"{c}[{i}]") for i in range(1, k + 1)] for c in "abcd"}

    for (i, j), mg in main.items():
        for x, y in mg.rows:
            zero, three = mg.row_vertex(0, (x, y)), mg.row_vertex(3, (x, y))
            b.edge(hs[(i, j + 1)].row_vertex(3, x), zero, one)
            b.edge(vs[(i, j)].row_vertex(3, y), zero, one)
            b.edge(vs[(i + 1, j)].row_vertex(0, y), three, one)
            b.edge(hs[(i, j)].row_vertex(0, x), three, one)
    for i in range(1, k + 1):
        for r in range(1, n + 1):
            b.edge(border["a"][i], hs[(i, k + 1)].row_vertex(0, r), one)
            b.edge(border["b"][i], hs[(i, 1)].row_vertex(3, r), one)
            b.edge(border["c"][i], vs[(1, i)].row_vertex(0, r), one)
            b.edge(border["d"][i], vs[(k + 1, i)].row_vertex(3, r), one)

    def src(i: int, j: int, role: str) -> int:
        if i == 0:
            return border["c"][j]
        if j == k + 1:
            return border["a"][i]
        return main[(i, j)].v(role)

    def tgt(i: int, j: int, role: str) -> int:
        if i == k + 1:
            return border["d"][j]
        if j == 0:
            return border["b"][i]
        return main[(i, j)].v(role)

    demands: list[tuple[int, int]] = []
    for i in range(1, k + 2):
        for j in range(1, k + 1):
            g_ = vs[(i, j)]
            for a, c in (("s1", "t1"), ("s2", "t2")):
                demands.append((src(i - 1, j, a), g_.v(c)))
                demands.append((g_.v(a), tgt(i, j, c)))
    for i in range(1, k + 1):
        for j in range(1, k + 2):
            g_ = hs[(i, j)]
            for a, c in (("s1", "t1"), ("s2", "t2")):
                demands.append((src(i, j, a), g_.v(c)))
                demands.append((g_.v(a), tgt(i, j - 1, c)))

    g = b.graph()
    inst = Instance(g, Pattern.from_demands(demands), "dsn", True)
    budget = gridtiling_budget(k, M)

    gamma = dict(solution) if solution is not None else solve_grid_tiling(gt)
    witness = None
    if gamma is not None:
        alpha = {i: gamma[(i, 1)][0] for i in range(1, k + 1)}
        beta = {j: gamma[(1, j)][1] for j in range(1, k + 1)}
        arcs: set[tuple[int, int]] = set()
        for j in range(1, k + 1):
            arcs.add((border["c"][j], vs[(1, j)].row_vertex(0, beta[j])))
            arcs.add((vs[(k + 1, j)].row_vertex(3, beta[j]), border["d"][j]))
        for i in range(1, k + 1):
            arcs.add((border["a"][i], hs[(i, k + 1)].row_vertex(0, alpha[i])))
            arcs.add((hs[(i, 1)].row_vertex(3, alpha[i]), border["b"][i]))
        picked: set[int] = set()
        for (i, j), mg in main.items():
            row = (alpha[i], beta[j])
            if row not in gt.S[(i, j)]:
                raise ContractViolation(f"supplied tiling picks {row} outside S[{i},{j}]")
            picked |= _right(g, mg, M, row)
            zero, three = mg.row_vertex(0, row), mg.row_vertex(3, row)
            arcs.add((hs[(i, j + 1)].row_vertex(3, alpha[i]), zero))
            arcs.add((vs[(i, j)].row_vertex(3, beta[j]), zero))
            arcs.add((three, hs[(i, j)].row_vertex(0, alpha[i])))
            arcs.add((three, vs[(i + 1, j)].row_vertex(0, beta[j])))
        for (i, j), sg in hs.items():
            picked |= _right(g, sg, M, alpha[i])
        for (i, j), sg in vs.items():
            picked |= _right(g, sg, M, beta[j])
        picked |= {b.arc_id[a] for a in arcs}
        witness = make_solution(g, picked, inst.pattern)
    return Certified(inst, budget, witness)


def _right(g: Graph, handle: GadgetHandle, M: Fraction, row: Hashable) -> frozenset[int]:
    return representation_arcs(g, UniquenessGadget(len(handle.rows), M, handle), row, "right")


# ---------------------------------------------------------------------------
# colored subgraph isomorphism -> bidirected DSN


@dataclass(frozen=True)
class CSIInput:
    """``parts[i-1]`` is V_i; ``h_edges`` are pairs over 1..len(parts)."""

    g_edges: tuple[tuple[Hashable, Hashable], ...]
    h_edges: tuple[tuple[int, int], ...]
    parts: tuple[tuple[Hashable, ...], ...]

    @property
    def ell(self) -> int:
        return len(self.parts)

    def color(self) -> dict[Hashable, int]:
        out = {}
        for i, part in enumerate(self.parts, start=1):
            for v in part:
                if v in out:
                    raise ContractViolation(f"vertex {v} lies in two parts")
                out[v] = i
        return out

    def cross_edges(self, i: int, j: int) -> list[tuple[Hashable, Hashable]]:
        """Edges between V_i and V_j oriented (V_i end, V_j end)."""
        col = self.color()
        out = set()
        for u, v in self.g_edges:
            if col[u] == i and col[v] == j:
                out.add((u, v))
            if col[v] == i and col[u] == j:
                out.add((v, u))
        return sorted(out, key=lambda e: (str(e[0]), str(e[1])))


def solve_csi(csi: CSIInput) -> dict[int, Hashable] | None:
    """Brute-force colourful embedding of H, or None."""
    adj = {frozenset(e) for e in csi.g_edges}
    for choice in product(*csi.parts):
        if all(frozenset((choice[i - 1], choice[j - 1])) in adj for i, j in csi.h_edges):
            return {i: choice[i - 1] for i in range(1, csi.ell + 1)}
    return None


def csi_budget(k: int, ell: int, M: Fraction) -> Fraction:
    B = 7 * M
    return 4 * ell + 2 * (2 * k + 2 * ell) * B + (2 * k + ell) * (B + 4)


def gen_csi_bidsn(csi: CSIInput, M: int | str | Fraction | None = None,
                  phi: Mapping[int, Hashable] | None = None) -> Certified:
    ell = csi.ell
    hg = nx.Graph()
    hg.add_nodes_from(range(1, ell + 1))
    hg.add_edges_from(csi.h_edges)
    if ell == 0 or not nx.is_connected(hg):
        raise ContractViolation("pattern graph H must be connected")
    if any(not (1 <= i <= ell and 1 <= j <= ell) or i == j for i, j in csi.h_edges):
        raise ContractViolation("H edges must join distinct vertices of 1..ell")
    k = hg.number_of_edges()
    M = as_weight(k ** 4 if M is None else M)
    one = Fraction(1)
    nbr = {i: set(hg[i]) | {i} for i in range(1, ell + 1)}
    extended = {i: nbr[i] | {ell + 1} for i in nbr}

    def next_of(i: int, j: int) -> int:
        return min([ell + 1] + [r for r in nbr[i] if r > j])

    def prev_of(i: int, j: int) -> int:
        return max([0] + [r for r in nbr[i] if r < j])

    def rows(i: int, j: int) -> list[tuple[Hashable, Hashable]]:
        if i == j:
            return [(x, x) for x in csi.parts[i - 1]]
        return csi.cross_edges(i, j)

    b = _Builder()
    main = {(i, j): _add_gadget(b, f"M[{i},{j}]", rows(i, j), M)
            for i in range(1, ell + 1) for j in sorted(nbr[i])}
    hs = {(i, j): _add_gadget(b, f"HS[{i},{j}]", list(csi.parts[i - 1]), M)
          for i in range(1, ell + 1) for j in sorted(extended[i])}
    vs = {(i, j): _add_gadget(b, f"VS[{i},{j}]", list(csi.parts[j - 1]), M)
          for j in range(1, ell + 1) for i in sorted(extended[j])}
    border = {c: [None] + [b.vertex(f"{c}[{i}]") for i in range(1, ell + 1)] for c in "abcd"}

    for (i, j), mg in main.items():
        top, right = hs[(i, next_of(i, j))], vs[(next_of(j, i), j)]
        for x, y in mg.rows:
            zero, three = mg.row_vertex(0, (x, y)), mg.row_vertex(3, (x, y))
            b.edge(top.row_vertex(3, x), zero, one)
            b.edge(vs[(i, j)].row_vertex(3, y), zero, one)
            b.edge(right.row_vertex(0, y), three, one)
            b.edge(hs[(i, j)].row_vertex(0, x), three, one)
    for i in range(1, ell + 1):
        low = min(nbr[i])
        for x in csi.parts[i - 1]:
            b.edge(border["a"][i], hs[(i, ell + 1)].row_vertex(0, x), one)
            b.edge(border["b"][i], hs[(i, low)].row_vertex(3, x), one)
            b.edge(border["c"][i], vs[(low, i)].row_vertex(0, x), one)
            b.edge(border["d"][i], vs[(ell + 1, i)].row_vertex(3, x), one)

    def src(i: int, j: int, role: str) -> int:
        if i == 0:
            return border["c"][j]
        if j == ell + 1:
            return border["a"][i]
        return main[(i, j)].v(role)

    def tgt(i: int, j: int, role: str) -> int:
        if i == ell + 1:
            return border["d"][j]
        if j == 0:
            return border["b"][i]
        return main[(i, j)].v(role)

    demands: list[tuple[int, int]] = []
    for j in range(1, ell + 1):
        for i in sorted(extended[j]):
            g_ = vs[(i, j)]
            for a, c in (("s1", "t1"), ("s2", "t2")):
                demands.append((src(prev_of(j, i), j, a), g_.v(c)))
                demands.append((g_.v(a), tgt(i, j, c)))
    for i in range(1, ell + 1):
        for j in sorted(extended[i]):
            g_ = hs[(i, j)]
            for a, c in (("s1", "t1"), ("s2", "t2")):
                demands.append((src(i, j, a), g_.v(c)))
                demands.append((g_.v(a), tgt(i, prev_of(i, j), c)))

    g = b.graph()
    inst = Instance(g, Pattern.from_demands(demands), "dsn", True)
    budget = csi_budget(k, ell, M)
    phi = dict(phi) if phi is not None else solve_csi(csi)
    witness = None
    if phi is not None:
        arcs: set[tuple[int, int]] = set()
        picked: set[int] = set()
        for i in range(1, ell + 1):
            low = min(nbr[i])
            arcs.add((border["a"][i], hs[(i, ell + 1)].row_vertex(0, phi[i])))
            arcs.add((hs[(i, low)].row_vertex(3, phi[i]), border["b"][i]))
            arcs.add((border["c"][i], vs[(low, i)].row_vertex(0, phi[i])))
            arcs.add((vs[(ell + 1, i)].row_vertex(3, phi[i]), border["d"][i]))
        for (i, j), mg in main.items():
            row = (phi[i], phi[j])
            if row not in mg.rows:
                raise ContractViolation(f"phi maps H-edge {i}-{j} onto a non-edge")
            picked |= _right(g, mg, M, row)
            zero, three = mg.row_vertex(0, row), mg.row_vertex(3, row)
            arcs.add((hs[(i, next_of(i, j))].row_vertex(3, phi[i]), zero))
            arcs.add((vs[(i, j)].row_vertex(3, phi[j]), zero))
            arcs.add((three, hs[(i, j)].row_vertex(0, phi[i])))
            arcs.add((three, vs[(next_of(j, i), j)].row_vertex(0, phi[j])))
        for (i, j), sg in hs.items():
            picked |= _right(g, sg, M, phi[i])
        for (i, j), sg in vs.items():
            picked |= _right(g, sg, M, phi[j])
        picked |= {b.arc_id[a] for a in arcs}
        witness = make_solution(g, picked, inst.pattern)
    return Certified(inst, budget, witness)


# ---------------------------------------------------------------------------
# Hamiltonian cycle -> bidirected SCSS


def gen_hamcycle_biscss(ug: nx.Graph) -> Certified:
    """Complete bidirected graph, weight 1 on edges of ``ug`` and 2 elsewhere; every vertex a terminal."""
    nodes = sorted(ug.nodes)
    n = len(nodes)
    if n < 3:
        raise ContractViolation("Hamiltonian-cycle reduction needs n >= 3")
    idx = {v: i for i, v in enumerate(nodes)}
    b = _Builder()
    for v in nodes:
        b.vertex(f"v({v})")
    for u, v in ((a, c) for ai, a in enumerate(nodes) for c in nodes[ai + 1:]):
        b.edge(idx[u], idx[v], Fraction(1 if ug.has_edge(u, v) else 2))
    g = b.graph()
    inst = Instance.scss(g, range(n), bidirected_required=True)
    witness = None
    cycle = _hamiltonian_cycle(ug, nodes) if n <= 10 else None
    if cycle is not None:
        ids = {b.arc_id[(idx[a], idx[c])] for a, c in zip(cycle, cycle[1:] + cycle[:1])}
        witness = make_solution(g, ids, inst.pattern)
    return Certified(inst, Fraction(n), witness)


def _hamiltonian_cycle(ug: nx.Graph, nodes: Sequence[Hashable]) -> list[Hashable] | None:
    first, rest = nodes[0], nodes[1:]
    for perm in permutations(rest):
        cyc = [first, *perm]
        if all(ug.has_edge(a, c) for a, c in zip(cyc, cyc[1:] + cyc[:1])):
            return cyc
    return None


# ---------------------------------------------------------------------------
# maximum colored subgraph isomorphism -> SCSS / DSN


def _require_complete(csi: CSIInput) -> None:
    ell = csi.ell
    want = {frozenset((i, j)) for i in range(1, ell + 1) for j in range(i + 1, ell + 1)}
    if {frozenset(e) for e in csi.h_edges} != want:
        raise ContractViolation("this reduction needs H to be the complete graph on 1..ell")


def _cross_only(csi: CSIInput) -> list[tuple[Hashable, Hashable]]:
    col = csi.color()
    return sorted({(u, v) for u, v in csi.g_edges if col[u] != col[v]}, key=lambda e: (str(e[0]), str(e[1])))


def gen_mcsi_scss(csi: CSIInput, q: int | str | Fraction) -> Certified:
    """General-graph SCSS instance; gamma is q**5 so every weight stays rational."""
    _require_complete(csi)
    q = as_weight(q)
    if q <= 0:
        raise ContractViolation("q must be positive")
    ell = csi.ell
    if ell < 2:
        raise ContractViolation("need ell >= 2")
    col = csi.color()
    pairs = ell * (ell - 1) // 2
    beta_w = 2 * q / ell
    eps_w = Fraction(1, pairs)
    zero = Fraction(0)
    cross = _cross_only(csi)
    directed = cross + [(v, u) for u, v in cross]

    b = _Builder()
    bv = {i: b.vertex(f"b[{i}]") for i in range(1, ell + 1)}
    cv = {v: b.vertex(f"c[{v}]") for part in csi.parts for v in part}
    cpv = {v: b.vertex(f"c'[{v}]") for part in csi.parts for v in part}
    dv = {(u, v): b.vertex(f"d[{u},{v}]") for u, v in directed}
    dpv = {(u, v): b.vertex(f"d'[{u},{v}]") for u, v in directed}
    fv = {(i, j): b.vertex(f"f[{i},{j}]") for i in range(1, ell + 1) for j in range(1, ell + 1) if i != j}

    arc = {}
    for v in cv:
        arc["alpha", v] = b.arc(bv[col[v]], cv[v], zero)
        arc["alpha'", v] = b.arc(cpv[v], bv[col[v]], zero)
        arc["beta", v] = b.arc(cv[v], cpv[v], beta_w)
    for u, v in directed:
        arc["delta", u, v] = b.arc(cpv[u], dv[(u, v)], zero)
        arc["delta'", u, v] = b.arc(dpv[(u, v)], cv[v], zero)
        arc["eps", u, v] = b.arc(dv[(u, v)], dpv[(u, v)], eps_w)
        arc["zeta", u, v] = b.arc(fv[(col[u], col[v])], dv[(u, v)], zero)
        arc["zeta'", u, v] = b.arc(dpv[(u, v)], fv[(col[u], col[v])], zero)
    g = b.graph()
    inst = Instance.scss(g, sorted(bv.values()) + sorted(fv.values()))
    budget = 2 * (1 + q)
    witness = None
    clique = solve_csi(csi)
    if clique is not None:
        ids = set()
        for i in range(1, ell + 1):
            v = clique[i]
            ids |= {arc["alpha", v], arc["alpha'", v], arc["beta", v]}
        for i in range(1, ell + 1):
            for j in range(1, ell + 1):
                if i != j:
                    u, v = clique[i], clique[j]
                    ids |= {arc[name, u, v] for name in ("delta", "delta'", "eps", "zeta", "zeta'")}
        witness = make_solution(g, ids, inst.pattern)
    return Certified(inst, budget, witness)


def gen_mcsi_dsn(csi: CSIInput) -> Certified:
    """Two copies of V_G between per-part sources and sinks; demands s_i -> t_j for i != j."""
    _require_complete(csi)
    ell = csi.ell
    col = csi.color()
    w = Fraction(1, 2 * ell)
    zero = Fraction(0)
    b = _Builder()
    first = {v: b.vertex(f"v1[{v}]") for part in csi.parts for v in part}
    second = {v: b.vertex(f"v2[{v}]") for part in csi.parts for v in part}
    s = {i: b.vertex(f"s[{i}]") for i in range(1, ell + 1)}
    t = {i: b.vertex(f"t[{i}]") for i in range(1, ell + 1)}
    for v in first:
        b.arc(s[col[v]], first[v], w)
    for v in second:
        b.arc(second[v], t[col[v]], w)
    for u, v in _cross_only(csi):
        b.arc(first[u], second[v], zero)
        b.arc(first[v], second[u], zero)
    g = b.graph()
    demands = [(s[i], t[j]) for i in range(1, ell + 1) for j in range(1, ell + 1) if i != j]
    inst = Instance.dsn(g, demands)
    witness = None
    clique = solve_csi(csi)
    if clique is not None:
        ids = {b.arc_id[(s[i], first[clique[i]])] for i in s}
        ids |= {b.arc_id[(second[clique[i]], t[i])] for i in t}
        ids |= {b.arc_id[(first[clique[i]], second[clique[j]])] for i in s for j in t if i != j}
        witness = make_solution(g, ids, inst.pattern)
    return Certified(inst, Fraction(1), witness)
