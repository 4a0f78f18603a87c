"""Seeded instance sweeps and the invariant checks run over them.

Every check yields a :class:`Row` comparing a measured value against a
reference under a relation.  ``bench`` prints the rows; the acceptance tests
re-check them.  Nothing here reads the clock, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import networkx as nx

from .approx import bidsn_2approx_fpt, bidsn_4approx, scss_2approx, steiner_forest_2approx
from .biscss import biscss_fpt, polytree_decompose
from .errors import NoFeasibleNetwork
from .exact import brute_force_dsn, dreyfus_wagner_dst, dreyfus_wagner_st, dsn_bounded_tw, steiner_forest_fpt
from .graph import (
    PLANAR,
    Graph,
    Instance,
    Solution,
    SolutionClass,
    is_bidirected,
    is_planar,
    is_polyforest,
    simple_adjacency,
    underlying_undirected,
)
from .hardness import (
    CSIInput,
    GridTilingInput,
    check_inout,
    gen_gridtiling_bidsnplanar,
    gen_hamcycle_biscss,
    gen_mcsi_dsn,
    gen_mcsi_scss,
    gen_uniqueness_gadget,
    inout_census,
    representation_arcs,
)
from .io import format_weight
from .planar import (
    bidsn_planar_pas,
    bidsn_planar_xp,
    build_decomposition,
    planar_treewidth_bound,
    tau_chop_division,
    verify_decomposition,
)
from .treewidth import treewidth_exact

RELATIONS = ("eq", "le", "ge", "gt")


@dataclass(frozen=True)
class Row:
    instance: str
    check: str
    value: Fraction | None  # None means "no feasible network"
    reference: Fraction | None
    relation: str = "eq"
    factor: Fraction = Fraction(1)

    @property
    def ok(self) -> bool:
        if self.value is None or self.reference is None:
            return self.value is None and self.reference is None
        ref = self.factor * self.reference
        return {
            "eq": self.value == ref,
            "le": self.value <= ref,
            "ge": self.value >= ref,
            "gt": self.value > ref,
        }[self.relation]

    @property
    def ratio(self) -> Fraction | None:
        if self.value is None or not self.reference:
            return None
        return self.value / self.reference


def _flag(ok: bool) -> Fraction:
    return Fraction(int(ok))


def _cost(run: Callable[[], Solution]) -> Fraction | None:
    try:
        return run().cost
    except NoFeasibleNetwork:
        return None


def _optimum(inst: Instance) -> Solution | None:
    try:
        return brute_force_dsn(inst)
    except NoFeasibleNetwork:
        return None


# ---------------------------------------------------------------------------
# random instances


@dataclass(frozen=True)
class SweepCase:
    name: str
    instance: Instance
    omega: int

    @property
    def bidirected(self) -> bool:
        return is_bidirected(self.instance.graph)


def _weight(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 5), rng.choice((1, 1, 2)))


def random_graph(rng: random.Random, n: int, bidirected: bool, density: float) -> Graph:
    arcs = []
    for a in range(n):
        for b in range(a + 1, n):
            if bidirected:
                if rng.random() < density:
                    w = _weight(rng)
                    arcs += [(a, b, w), (b, a, w)]
            else:
                if rng.random() < density:
                    arcs.append((a, b, _weight(rng)))
                if rng.random() < density:
                    arcs.append((b, a, _weight(rng)))
    return Graph.build(n, arcs)


def random_case(rng: random.Random, name: str, max_vertices: int = 7) -> SweepCase:
    n = rng.randint(2, max_vertices)
    bidirected = rng.random() < 0.5
    g = random_graph(rng, n, bidirected, rng.choice((0.35, 0.5, 0.65)))
    if rng.random() < 0.3:
        terms = rng.sample(range(n), rng.randint(2, min(3, n)))
        inst = Instance.scss(g, terms, bidirected_required=bidirected)
    else:
        demands = {tuple(rng.sample(range(n), 2)) for _ in range(rng.randint(1, 3))}
        inst = Instance.dsn(g, demands, bidirected_required=bidirected)
    return SweepCase(name, inst, rng.choice((1, 2, max(n - 1, 2))))


def sweep_cases(seed: int, count: int, max_vertices: int = 7) -> list[SweepCase]:
    rng = random.Random(seed)
    return [random_case(rng, f"s{seed}-{i:04d}", max_vertices) for i in range(count)]


# ---------------------------------------------------------------------------
# per-case checks


def equivalence_rows(case: SweepCase) -> list[Row]:
    inst, name = case.instance, case.name
    g, p = inst.graph, inst.pattern
    terms = list(p.terminals)
    ug = underlying_undirected(g)
    rows = []

    tree_demands = [(terms[0], t) for t in terms[1:]]
    ref = _cost(lambda: brute_force_dsn(Instance.dsn(ug, tree_demands)))
    rows.append(Row(name, "dw-st", _cost(lambda: dreyfus_wagner_st(ug, terms)), ref))

    root = p.demands[0][0]
    targets = [t for t in terms if t != root]
    ref = _cost(lambda: brute_force_dsn(Instance.dsn(g, [(root, t) for t in targets])))
    rows.append(Row(name, "dw-dst", _cost(lambda: dreyfus_wagner_dst(g, root, targets)), ref))

    pairs = {(min(s, t), max(s, t)) for s, t in p.demands}
    ref = _cost(lambda: brute_force_dsn(Instance.dsn(ug, pairs)))
    rows.append(Row(name, "sf-fpt", _cost(lambda: steiner_forest_fpt(ug, pairs)), ref))

    tw_inst = Instance(g, p, inst.variant, inst.bidirected_required, SolutionClass.treewidth(case.omega))
    ref = _cost(lambda: brute_force_dsn(tw_inst))
    rows.append(Row(name, f"tw:{case.omega}", _cost(lambda: dsn_bounded_tw(tw_inst)), ref))

    if case.bidirected:
        if inst.variant == "scss":
            ref = _cost(lambda: brute_force_dsn(inst))
            rows.append(Row(name, "biscss-fpt", _cost(lambda: biscss_fpt(g, terms)), ref))
        planar_inst = Instance(g, p, inst.variant, True, PLANAR)
        ref = _cost(lambda: brute_force_dsn(planar_inst))
        rows.append(Row(name, "planar-xp", _cost(lambda: bidsn_planar_xp(planar_inst)), ref))
    return rows


def ratio_rows(case: SweepCase) -> list[Row]:
    if not case.bidirected:
        return []
    inst, name = case.instance, case.name
    g, p = inst.graph, inst.pattern
    opt = _cost(lambda: brute_force_dsn(inst))
    rows = [
        Row(name, "bidsn-4approx", _cost(lambda: bidsn_4approx(inst)), opt, "le", Fraction(4)),
        Row(name, "bidsn-2approx", _cost(lambda: bidsn_2approx_fpt(inst)), opt, "le", Fraction(2)),
    ]
    if inst.variant == "scss":
        rows.append(Row(name, "scss-2approx", _cost(lambda: scss_2approx(g, p.terminals)), opt, "le", Fraction(2)))
    ug = underlying_undirected(g)
    pairs = {(min(s, t), max(s, t)) for s, t in p.demands}
    opt_sf = _cost(lambda: steiner_forest_fpt(ug, pairs))
    rows.append(Row(name, "sf-2approx", _cost(lambda: steiner_forest_2approx(ug, pairs)), opt_sf, "le", Fraction(2)))
    if len(p.terminals) <= 4:
        # g(1/2) = 4 terminals per pattern covers the whole instance, so the scheme is exact
        planar_opt = _cost(lambda: brute_force_dsn(Instance(g, p, inst.variant, True, PLANAR)))
        rows.append(Row(name, "planar-pas", _cost(lambda: bidsn_planar_pas(inst, Fraction(1, 2))), planar_opt))
    return rows


def planar_tw_rows(case: SweepCase) -> list[Row]:
    inst = case.instance
    sol = _optimum(Instance(inst.graph, inst.pattern, inst.variant, False, PLANAR))
    if sol is None:
        return []
    width = treewidth_exact(simple_adjacency(inst.graph, sol.edge_ids)) if sol.edge_ids else 0
    bound = planar_treewidth_bound(inst.pattern.k)
    return [Row(case.name, "planar-opt-treewidth", Fraction(width), Fraction(bound), "le")]


# (r_cap, epsilon) settings: two that force cutting, one where r covers the whole network
DECOMPOSITION_SETTINGS = ((2, Fraction(1, 3)), (4, Fraction(1, 3)), (64, Fraction(1, 3)))


def decomposition_rows(case: SweepCase) -> list[Row]:
    if not case.bidirected:
        return []
    inst = case.instance
    planar_inst = Instance(inst.graph, inst.pattern, inst.variant, True, PLANAR)
    sol = _optimum(planar_inst)
    if sol is None or not sol.edge_ids:
        return []
    rows = []
    spanned = len(inst.graph.spanned_vertices(sol.edge_ids))
    for r_cap, eps in DECOMPOSITION_SETTINGS:
        d = build_decomposition(planar_inst, sol, eps, r_cap)
        rep = verify_decomposition(planar_inst, sol, d)
        tag = f"decomp-r{d.r}"
        rows.append(Row(case.name, f"{tag}-feasible", _flag(rep.feasible), Fraction(1)))
        rows.append(Row(case.name, f"{tag}-terminals", Fraction(rep.max_part_terminals), Fraction(d.r), "le"))
        rows.append(Row(case.name, f"{tag}-ratio", rep.cost_ratio, Fraction(1), "ge"))
        if d.r >= spanned:
            rows.append(Row(case.name, f"{tag}-ratio-full", rep.cost_ratio, Fraction(1)))
    return rows


def polytree_rows(case: SweepCase) -> list[Row]:
    inst = case.instance
    if not case.bidirected or inst.variant != "scss":
        return []
    sol = _optimum(inst)
    if sol is None:
        return []
    g = inst.graph
    parts = polytree_decompose(g, sol, inst.pattern.terminals)
    union: set[int] = set()
    for _, piece in parts:
        union |= piece.edge_ids
    shapes = all(is_polyforest(g, piece.edge_ids) and
                 nx.is_connected(nx.Graph([(g.edges[i].tail, g.edges[i].head) for i in piece.edge_ids]))
                 for _, piece in parts)
    return [
        Row(case.name, "polytree-union", _flag(union == set(sol.edge_ids)), Fraction(1)),
        Row(case.name, "polytree-disjoint", Fraction(sum(len(s) for _, s in parts)), Fraction(len(sol))),
        Row(case.name, "polytree-shape", _flag(shapes), Fraction(1)),
    ]


SWEEP_CHECKS: dict[str, Callable[[SweepCase], list[Row]]] = {
    "equivalence": equivalence_rows,
    "ratios": ratio_rows,
    "planar-treewidth": planar_tw_rows,
    "decomposition": decomposition_rows,
    "polytree": polytree_rows,
}


def run_sweep(suite: str, seed: int, count: int, max_vertices: int = 7) -> list[Row]:
    check = SWEEP_CHECKS[suite]
    return [row for case in sweep_cases(seed, count, max_vertices) for row in check(case)]


# ---------------------------------------------------------------------------
# fixed suites


def degree3_planar_graph(rng: random.Random, n: int) -> Graph:
    """Random connected planar graph with maximum degree 3, both arc directions present."""
    ug = nx.empty_graph(n)
    for v in range(1, n):
        ug.add_edge(v, rng.choice([u for u in range(v) if ug.degree(u) < 3]))
    for _ in range(n):
        if n < 2:
            break
        a, b = rng.sample(range(n), 2)
        if not ug.has_edge(a, b) and ug.degree(a) < 3 and ug.degree(b) < 3:
            ug.add_edge(a, b)
            if not nx.check_planarity(ug)[0]:
                ug.remove_edge(a, b)
    arcs = [(a, b, 1) for a, b in sorted(ug.edges)] + [(b, a, 1) for a, b in sorted(ug.edges)]
    return Graph.build(n, arcs)


def division_rows(seed: int, count: int = 100, max_vertices: int = 40, h: int = 5) -> list[Row]:
    rng = random.Random(seed)
    rows = []
    for i in range(count):
        n = rng.randint(1, max_vertices)
        g = degree3_planar_graph(rng, n)
        weights = {v: Fraction(rng.randint(1, 9), rng.randint(1, 4)) for v in range(n)}
        r = rng.choice((2, 4, 8, 16))
        d = tau_chop_division(g, weights, r, h)
        largest = max((len(g.spanned_vertices(part)) for part in d.edge_partition), default=0)
        name = f"d{seed}-{i:03d}"
        rows.append(Row(name, f"division-r{r}-region", Fraction(largest), Fraction(r), "le"))
        rows.append(Row(name, f"division-r{r}-boundary", d.boundary_weight, d.total_weight, "le", Fraction(3 * h, d.tau)))
    return rows


def gadget_rows(sizes: Iterable[int] = (1, 2)) -> list[Row]:
    rows = []
    for n in sizes:
        g, gadget = gen_uniqueness_gadget(n, 1)
        # every arc weighs M = 1, so sets of 8 or more arcs cannot reach weight 7
        census = inout_census(gadget, max_arcs=7)
        reps = {representation_arcs(g, gadget, row, side) for row in range(1, n + 1) for side in ("right", "left")}
        labelled = all(check_inout(gadget, s).representation is not None for s in census.minimum_sets)
        name = f"U{n}"
        rows.append(Row(name, "min-inout-weight", census.min_weight, Fraction(7)))
        rows.append(Row(name, "min-sets-are-representations", _flag(set(census.minimum_sets) == reps and labelled), Fraction(1)))
        rows.append(Row(name, "min-set-count", Fraction(len(census.minimum_sets)), Fraction(2 * n)))
        rows.append(Row(name, "empty-set-fails", _flag(not check_inout(gadget, ()).satisfies), Fraction(1)))
    return rows


def _single_cross_edge() -> CSIInput:
    return CSIInput((("a", "b"),), ((1, 2),), (("a",), ("b",)))


def certificate_rows() -> list[Row]:
    rows = []
    inst, budget, _ = gen_hamcycle_biscss(nx.cycle_graph(5))
    rows.append(Row("hamcycle-C5", "oracle", brute_force_dsn(inst).cost, budget))
    inst, _, _ = gen_hamcycle_biscss(nx.star_graph(3))
    rows.append(Row("hamcycle-K1,3", "oracle", brute_force_dsn(inst).cost, Fraction(4), "gt"))

    gt = GridTilingInput(1, 2, {(1, 1): frozenset({(1, 1)})})
    inst, budget, witness = gen_gridtiling_bidsnplanar(gt, M=1)
    rows.append(Row("gridtiling-k1n2", "budget", budget, Fraction(43)))
    rows.append(Row("gridtiling-k1n2", "witness", witness.cost, budget))
    rows.append(Row("gridtiling-k1n2", "witness-feasible", _flag(witness.feasible), Fraction(1)))
    rows.append(Row("gridtiling-k1n2", "witness-planar", _flag(is_planar(inst.graph, witness.edge_ids)), Fraction(1)))

    inst, budget, witness = gen_mcsi_dsn(_single_cross_edge())
    rows.append(Row("mcsi-dsn-l2", "witness", witness.cost, Fraction(1)))
    rows.append(Row("mcsi-dsn-l2", "witness-feasible", _flag(witness.feasible), Fraction(1)))
    rows.append(Row("mcsi-dsn-l2", "oracle", brute_force_dsn(inst).cost, budget))

    q = Fraction(1, 32)
    inst, budget, witness = gen_mcsi_scss(_single_cross_edge(), q)
    rows.append(Row("mcsi-scss-l2", "witness", witness.cost, 2 * (1 + q)))
    rows.append(Row("mcsi-scss-l2", "witness-feasible", _flag(witness.feasible), Fraction(1)))
    rows.append(Row("mcsi-scss-l2", "oracle", brute_force_dsn(inst).cost, budget))
    return rows


def bidirected_cycle(n: int) -> Graph:
    arcs = []
    for i in range(n):
        arcs += [(i, (i + 1) % n, 1), ((i + 1) % n, i, 1)]
    return Graph.build(n, arcs)


def savings_rows(sizes: Iterable[int] = (4, 5, 6)) -> list[Row]:
    rows = []
    for n in sizes:
        g = bidirected_cycle(n)
        best = biscss_fpt(g, range(n)).cost
        doubled_tree = 2 * dreyfus_wagner_st(underlying_undirected(g), range(n)).cost
        rows.append(Row(f"C{n}", "biscss-fpt", best, Fraction(n)))
        rows.append(Row(f"C{n}", "doubled-steiner-tree", doubled_tree, Fraction(2 * (n - 1))))
        rows.append(Row(f"C{n}", "doubled-tree-exceeds-optimum", doubled_tree, best, "gt"))
    return rows


SUITES = tuple(SWEEP_CHECKS) + ("division", "gadget-dichotomy", "certificates", "savings")


def run_suite(suite: str, seed: int = 1, count: int | None = None) -> list[Row]:
    if suite in SWEEP_CHECKS:
        return run_sweep(suite, seed, 500 if count is None else count)
    if suite == "division":
        return division_rows(seed, 100 if count is None else count)
    if suite == "gadget-dichotomy":
        return gadget_rows()
    if suite == "certificates":
        return certificate_rows()
    if suite == "savings":
        return savings_rows()
    raise KeyError(suite)


# ---------------------------------------------------------------------------
# reports


def _fmt(w: Fraction | None) -> str:
    return "inf" if w is None else format_weight(w)


COLUMNS = ("instance", "check", "value", "reference", "relation", "ratio", "status")


def render(rows: list[Row], fmt: str = "tsv") -> str:
    ordered = sorted(rows, key=lambda r: (r.instance, r.check))
    records = [
        {
            "instance": r.instance,
            "check": r.check,
            "value": _fmt(r.value),
            "reference": _fmt(r.reference),
            "relation": r.relation if r.factor == 1 else f"{r.relation} {format_weight(r.factor)}x",
            "ratio": "-" if r.ratio is None else format_weight(r.ratio),
            "status": "ok" if r.ok else "FAIL",
        }
        for r in ordered
    ]
    if fmt == "json":
        return json.dumps(records, indent=1) + "\n"
    lines = ["\t".join(COLUMNS)]
    lines.extend("\t".join(rec[c] for c in COLUMNS) for rec in records)
    return "\n".join(lines) + "\n"


def summary(rows: list[Row]) -> tuple[int, int]:
    """(rows, failures)"""
    return len(rows), sum(not r.ok for r in rows)


__all__ = [
    "Row",
    "SweepCase",
    "SUITES",
    "run_suite",
    "run_sweep",
    "render",
    "summary",
    "sweep_cases",
]
