"""Command-line front end: solve, generate, verify, bench, decomp.

Exit codes: 0 success, 1 bad input or failed invariant, 2 unknown algorithm
or reduction, 3 capacity exceeded, 4 no feasible network.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import networkx as nx

from . import sweep
from .approx import bidsn_2approx_fpt, bidsn_4approx, scss_2approx, steiner_forest_2approx
from .biscss import biscss_fpt
from .errors import CapacityError, ContractViolation, DivisionError, NoFeasibleNetwork, ParseError
from .exact import (
    DEFAULT_TERMINAL_CAP,
    DEFAULT_VERTEX_CAP,
    brute_force_dsn,
    dreyfus_wagner_dst,
    dreyfus_wagner_st,
    dsn_bounded_tw,
    steiner_forest_fpt,
)
from .graph import (
    Graph,
    Instance,
    Solution,
    in_class,
    is_planar,
    make_solution,
    multigraph_treewidth,
    underlying_undirected,
    undirected_edge_groups,
)
from .hardness import (
    CSIInput,
    Certified,
    GridTilingInput,
    gen_csi_bidsn,
    gen_gridtiling_bidsnplanar,
    gen_hamcycle_biscss,
    gen_mcsi_dsn,
    gen_mcsi_scss,
    gen_uniqueness_gadget,
    representation_arcs,
)
from .io import (
    Certificate,
    format_weight,
    parse_certificate,
    parse_instance,
    parse_solution,
    serialize_certificate,
    serialize_instance,
    serialize_solution,
)
from .planar import DEFAULT_PATTERN_CAP, bidsn_planar_pas, bidsn_planar_xp, build_decomposition, verify_decomposition

EXIT_FAIL, EXIT_UNKNOWN, EXIT_CAP, EXIT_INFEASIBLE = 1, 2, 3, 4


class UnknownName(Exception):
    pass


# ---------------------------------------------------------------------------
# solve


def _lift_undirected(inst: Instance, run: Callable[[Graph], Solution]) -> Solution:
    """Run an undirected solver on the underlying graph and take every arc behind each chosen edge."""
    g = inst.graph
    if not g.directed:
        return run(g)
    groups = undirected_edge_groups(g)
    sol = run(underlying_undirected(g))
    return make_solution(g, {a for i in sol.edge_ids for a in groups[i]}, inst.pattern)


def _solver(name: str, args: argparse.Namespace) -> Callable[[Instance], Solution]:
    tcap = args.cap_terminals

    def check_vertices(inst: Instance) -> None:
        if inst.graph.vertex_count > args.cap_vertices:
            raise CapacityError(f"{inst.graph.vertex_count} vertices exceed --cap-vertices {args.cap_vertices}")

    def oracle(inst: Instance) -> Solution:
        check_vertices(inst)
        return brute_force_dsn(inst)

    def dw_st(inst: Instance) -> Solution:
        return _lift_undirected(inst, lambda ug: dreyfus_wagner_st(ug, inst.pattern.terminals, tcap))

    def dw_dst(inst: Instance) -> Solution:
        p = inst.pattern
        root = args.root if args.root is not None else (p.demands[0][0] if p.demands else p.terminals[0])
        sol = dreyfus_wagner_dst(inst.graph, root, [t for t in p.terminals if t != root], tcap)
        return make_solution(inst.graph, sol.edge_ids, p)

    def sf(solver):
        def run(inst: Instance) -> Solution:
            return _lift_undirected(inst, lambda ug: solver(ug, inst.pattern.demands))
        return run

    def tw(inst: Instance) -> Solution:
        omega = args.omega
        if omega is None:
            omega = inst.solution_class.omega if inst.solution_class.kind == "tw" else 2
        return dsn_bounded_tw(inst, omega, vertex_cap=args.cap_vertices)

    table: dict[str, Callable[[Instance], Solution]] = {
        "oracle": oracle,
        "dw-st": dw_st,
        "dw-dst": dw_dst,
        "sf-fpt": sf(lambda ug, pairs: steiner_forest_fpt(ug, pairs, tcap)),
        "tw": tw,
        "sf-2approx": sf(steiner_forest_2approx),
        "bidsn-4approx": bidsn_4approx,
        "bidsn-2approx": bidsn_2approx_fpt,
        "scss-2approx": lambda inst: scss_2approx(inst.graph, inst.pattern.terminals),
        "planar-xp": bidsn_planar_xp,
        "planar-pas": lambda inst: bidsn_planar_pas(inst, Fraction(args.epsilon), pattern_cap=args.cap_patterns),
        "biscss-fpt": lambda inst: biscss_fpt(inst.graph, inst.pattern.terminals, args.cap_patterns),
    }
    if name not in table:
        raise UnknownName(f"unknown algorithm {name!r}; choose from {', '.join(table)}")
    return table[name]


ALGORITHMS = (
    "oracle", "dw-st", "dw-dst", "sf-fpt", "tw", "sf-2approx", "bidsn-4approx",
    "bidsn-2approx", "scss-2approx", "planar-xp", "planar-pas", "biscss-fpt",
)


def cmd_solve(args: argparse.Namespace) -> int:
    run = _solver(args.algorithm, args)
    inst = parse_instance(Path(args.instance).read_text())
    start = time.perf_counter()
    sol = run(inst)
    elapsed = (time.perf_counter() - start) * 1000
    feasible = make_solution(inst.graph, sol.edge_ids, inst.pattern).feasible
    if args.output:
        Path(args.output).write_text(serialize_solution(sol))
    print(f"{args.algorithm} cost={format_weight(sol.cost)} feasible={str(feasible).lower()} time_ms={elapsed:.1f}")
    return 0


# ---------------------------------------------------------------------------
# generate


def _random_grid_tiling(rng: random.Random, k: int, n: int, yes: bool) -> GridTilingInput:
    cells = [(x, y) for x in range(1, n + 1) for y in range(1, n + 1)]
    alpha = [rng.randint(1, n) for _ in range(k)]
    beta = [rng.randint(1, n) for _ in range(k)]
    S = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            chosen = set(rng.sample(cells, rng.randint(1, len(cells))))
            planted = (alpha[i - 1], beta[j - 1])
            if yes:
                chosen.add(planted)
            S[(i, j)] = frozenset(chosen)
    return GridTilingInput(k, n, S)


def _random_csi(rng: random.Random, ell: int, part_size: int, density: float, complete_h: bool) -> CSIInput:
    parts = tuple(tuple(f"v{i}_{a}" for a in range(part_size)) for i in range(1, ell + 1))
    if complete_h:
        h_edges = tuple((i, j) for i in range(1, ell + 1) for j in range(i + 1, ell + 1))
    else:
        tree = [(rng.randint(1, j - 1), j) for j in range(2, ell + 1)]
        extra = [(i, j) for i in range(1, ell + 1) for j in range(i + 1, ell + 1) if (i, j) not in tree and rng.random() < 0.3]
        h_edges = tuple(sorted(tree + extra))
    g_edges = tuple((u, v) for i, j in h_edges for u in parts[i - 1] for v in parts[j - 1] if rng.random() < density)
    return CSIInput(g_edges, h_edges, parts)


def _generate(args: argparse.Namespace) -> tuple[Instance, Certificate]:
    rng = random.Random(args.seed)
    M = Fraction(args.M) if args.M is not None else None
    name = args.reduction
    if name == "gadget":
        g, gadget = gen_uniqueness_gadget(args.n, M if M is not None else 1)
        inst = Instance.dsn(g, (), bidirected_required=True)
        witness = representation_arcs(g, gadget, 1, "right")
        return inst, Certificate(7 * gadget.M, witness)
    if name == "hamcycle":
        if args.cycle:
            ug = nx.cycle_graph(args.cycle)
        elif args.star:
            ug = nx.star_graph(args.star)
        else:
            ug = nx.gnp_random_graph(args.n, 0.5, seed=args.seed)
        cert = gen_hamcycle_biscss(ug)
    elif name == "gridtiling":
        cert = gen_gridtiling_bidsnplanar(_random_grid_tiling(rng, args.k, args.n, args.yes), M)
    elif name == "csi":
        cert = gen_csi_bidsn(_random_csi(rng, args.ell, args.n, args.density, False), M)
    elif name == "mcsi-scss":
        cert = gen_mcsi_scss(_random_csi(rng, args.ell, args.n, args.density, True), Fraction(args.q))
    elif name == "mcsi-dsn":
        cert = gen_mcsi_dsn(_random_csi(rng, args.ell, args.n, args.density, True))
    else:
        raise UnknownName(f"unknown reduction {name!r}")
    return _certified(cert)


def _certified(cert: Certified) -> tuple[Instance, Certificate]:
    witness = cert.witness.edge_ids if cert.witness is not None else None
    return cert.instance, Certificate(cert.budget, witness)


REDUCTIONS = ("gadget", "hamcycle", "gridtiling", "csi", "mcsi-scss", "mcsi-dsn")


def cmd_generate(args: argparse.Namespace) -> int:
    inst, cert = _generate(args)
    out = Path(args.output)
    out.write_text(serialize_instance(inst))
    cert_path = Path(str(out) + ".cert")
    cert_path.write_text(serialize_certificate(cert))
    witness = "none" if cert.witness is None else str(len(cert.witness))
    print(f"{args.reduction} vertices={inst.graph.vertex_count} edges={inst.graph.m} "
          f"demands={inst.pattern.k} budget={format_weight(cert.budget)} witness_edges={witness}")
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args: argparse.Namespace) -> int:
    inst = parse_instance(Path(args.instance).read_text())
    g = inst.graph
    declared, ids = parse_solution(Path(args.solution).read_text(), g)
    sol = make_solution(g, ids, inst.pattern)
    words = ["feasible" if sol.feasible else "infeasible", f"cost={format_weight(sol.cost)}"]
    if declared is not None and declared != sol.cost:
        words.append(f"declared-cost-mismatch={format_weight(declared)}")
    if inst.solution_class.kind != "any":
        ok = in_class(g, ids, inst.solution_class, inst.pattern.terminals)
        words.append(f"class-{inst.solution_class.token()}={'yes' if ok else 'no'}")
    if args.structure:
        words.append(f"planar={'yes' if is_planar(g, ids) else 'no'}")
        try:
            words.append(f"treewidth={multigraph_treewidth(g, ids) if ids else 0}")
        except CapacityError:
            words.append("treewidth=over-cap")
    if args.certificate:
        cert = parse_certificate(Path(args.certificate).read_text())
        if sol.feasible:
            if sol.cost == cert.budget:
                words.append("matches-budget")
            elif sol.cost > cert.budget:
                words.append("cost above budget")
            else:
                words.append("below-budget-impossible")
    print(", ".join(words))
    return 0 if sol.feasible and "below-budget-impossible" not in words else EXIT_FAIL


# ---------------------------------------------------------------------------
# bench and decomp


def cmd_bench(args: argparse.Namespace) -> int:
    if args.suite not in sweep.SUITES:
        raise UnknownName(f"unknown suite {args.suite!r}; choose from {', '.join(sweep.SUITES)}")
    rows = sweep.run_suite(args.suite, args.seed, args.count)
    text = sweep.render(rows, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    total, failed = sweep.summary(rows)
    print(f"{args.suite} seed={args.seed} rows={total} failures={failed}", file=sys.stderr)
    return 0 if failed == 0 else EXIT_FAIL


def cmd_decomp(args: argparse.Namespace) -> int:
    inst = parse_instance(Path(args.instance).read_text())
    if args.solution:
        _, ids = parse_solution(Path(args.solution).read_text(), inst.graph)
        sol = make_solution(inst.graph, ids, inst.pattern)
    else:
        sol = brute_force_dsn(inst)
    d = build_decomposition(inst, sol, Fraction(args.epsilon), args.r_cap)
    rep = verify_decomposition(inst, sol, d)
    print(f"parts={len(d.parts)} r={d.r} feasible={str(rep.feasible).lower()} "
          f"cost_ratio={format_weight(rep.cost_ratio)} max_part_terminals={rep.max_part_terminals}")
    for i, (pat, part) in enumerate(d.parts):
        terms = " ".join(map(str, pat.terminals))
        print(f"part {i} cost={format_weight(part.cost)} terminals=[{terms}] edges={' '.join(map(str, part.sorted_ids()))}")
    return 0 if rep.feasible and rep.max_part_terminals <= d.r else EXIT_FAIL


# ---------------------------------------------------------------------------
# entry point


def _caps(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cap-vertices", type=int, default=DEFAULT_VERTEX_CAP)
    p.add_argument("--cap-terminals", type=int, default=DEFAULT_TERMINAL_CAP)
    p.add_argument("--cap-patterns", type=int, default=DEFAULT_PATTERN_CAP)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsnkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance")
    p.add_argument("algorithm", help=", ".join(ALGORITHMS))
    p.add_argument("-o", "--output", help="solution file to write")
    p.add_argument("--epsilon", default="1", help="planar-pas accuracy (rational)")
    p.add_argument("--omega", type=int, help="treewidth bound for tw (default: instance class, else 2)")
    p.add_argument("--root", type=int, help="dw-dst root (default: first demand source)")
    _caps(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a reduction instance plus certificate sidecar")
    p.add_argument("reduction", help=", ".join(REDUCTIONS))
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2, help="gadget rows, grid values, part size or random graph order")
    p.add_argument("--k", type=int, default=1, help="grid tiling side")
    p.add_argument("--M", help="gadget weight (default 1 for gadget, k^4 otherwise)")
    p.add_argument("--yes", action="store_true", help="plant a grid tiling solution")
    p.add_argument("--cycle", type=int, help="hamcycle on the n-cycle")
    p.add_argument("--star", type=int, help="hamcycle on the star with this many leaves")
    p.add_argument("--ell", type=int, default=2, help="number of colour classes")
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--q", default="1/32", help="mcsi-scss: gamma = q^5")
    _caps(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check a solution file against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("certificate", nargs="?")
    p.add_argument("--structure", action="store_true", help="also report planarity and treewidth")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run an invariant suite and print its table")
    p.add_argument("suite", help=", ".join(sweep.SUITES))
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, help="sweep size (default 500, division 100)")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("-o", "--output")
    _caps(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("decomp", help="decompose an optimum planar network into few-terminal parts")
    p.add_argument("instance")
    p.add_argument("solution", nargs="?", help="defaults to the oracle optimum")
    p.add_argument("--epsilon", default="1/3")
    p.add_argument("--r-cap", type=int, default=64)
    p.set_defaults(func=cmd_decomp)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnknownName as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NoFeasibleNetwork as exc:
        print(f"no feasible network: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ParseError, ContractViolation, DivisionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
