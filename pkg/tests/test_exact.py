import itertools
import random
from fractions import Fraction

import pytest

from conftest import bi, directed, undirected
from dsnkit.errors import CapacityError, NoFeasibleNetwork
from dsnkit.exact import (
    OracleBudget,
    brute_force_dsn,
    dreyfus_wagner_dst,
    dreyfus_wagner_st,
    dsn_bounded_tw,
    path_union_search,
    solve_in_class,
    steiner_forest_fpt,
)
from dsnkit.graph import (
    CYCLE,
    PLANAR,
    POLYTREE,
    Graph,
    Instance,
    SolutionClass,
    check_feasible,
    in_class,
    is_directed_cycle_through,
    is_polyforest,
    multigraph_treewidth,
)
from dsnkit.sweep import random_graph


def _enumerate_optimum(inst: Instance):
    """Plain enumeration of every edge subset, for cross-checking the oracle."""
    g, p = inst.graph, inst.pattern
    best = None
    for size in range(g.m + 1):
        for ids in itertools.combinations(range(g.m), size):
            if check_feasible(g, ids, p) and in_class(g, ids, inst.solution_class, p.terminals):
                c = g.cost(ids)
                if best is None or c < best:
                    best = c
    return best


class TestOracle:
    def test_path(self):
        g = directed(3, [(0, 1, 1), (1, 2, 1)])
        assert brute_force_dsn(Instance.dsn(g, [(0, 2)])).cost == 2

    def test_bidirected_triangle_scss(self):
        g = bi(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        sol = brute_force_dsn(Instance.scss(g, range(3)))
        assert sol.cost == 3 and is_directed_cycle_through(g, sol.edge_ids, range(3))
        assert _enumerate_optimum(Instance.scss(g, range(3))) == 3

    def test_cycle_class(self):
        g = bi(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
        inst = Instance(g, Instance.scss(g, range(4)).pattern, "scss", True, CYCLE)
        assert brute_force_dsn(inst).cost == 4

    def test_infeasible(self):
        with pytest.raises(NoFeasibleNetwork):
            brute_force_dsn(Instance.dsn(directed(2, [(0, 1, 1)]), [(1, 0)]))

    def test_budget(self):
        g = bi(6, [(a, b, 1) for a, b in itertools.combinations(range(6), 2)])
        with pytest.raises(CapacityError):
            brute_force_dsn(Instance.scss(g, range(6)), OracleBudget(max_edges_enumerated=50))

    def test_undirected_instances(self):
        ug = undirected(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 10)])
        assert brute_force_dsn(Instance.dsn(ug, [(0, 3)])).cost == 3

    def test_matches_plain_enumeration(self):
        rng = random.Random(2)
        classes = [SolutionClass(), PLANAR, POLYTREE, SolutionClass.treewidth(1)]
        seen = 0
        while seen < 25:
            g = random_graph(rng, rng.randint(2, 4), rng.random() < 0.5, 0.5)
            if g.m > 10:
                continue
            demands = {tuple(rng.sample(range(g.vertex_count), 2)) for _ in range(2)}
            base = Instance.dsn(g, demands)
            for cls in classes:
                inst = Instance(g, base.pattern, "dsn", False, cls)
                want = _enumerate_optimum(inst)
                try:
                    got = brute_force_dsn(inst).cost
                except NoFeasibleNetwork:
                    got = None
                assert got == want
            seen += 1


class TestSteinerTree:
    def test_triangle(self):
        ug = undirected(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        assert dreyfus_wagner_st(ug, range(3)).cost == 2

    def test_star_leaves(self):
        ug = undirected(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])
        assert dreyfus_wagner_st(ug, [1, 2, 3]).cost == 3

    def test_long_way_round(self):
        ug = undirected(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 10)])
        assert dreyfus_wagner_st(ug, [0, 3]).cost == 3

    def test_disconnected(self):
        with pytest.raises(NoFeasibleNetwork):
            dreyfus_wagner_st(undirected(3, [(0, 1, 1)]), [0, 2])

    def test_terminal_cap(self):
        ug = undirected(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
        with pytest.raises(CapacityError):
            dreyfus_wagner_st(ug, range(4), cap=3)


class TestDirectedSteinerTree:
    def test_out_star(self):
        g = directed(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])
        assert dreyfus_wagner_dst(g, 0, [1, 2, 3]).cost == 3

    def test_path(self):
        g = directed(3, [(0, 1, 2), (1, 2, Fraction(3, 2))])
        assert dreyfus_wagner_dst(g, 0, [2]).cost == Fraction(7, 2)

    def test_shared_prefix_counted_once(self):
        g = directed(4, [(0, 1, 5), (1, 2, 1), (1, 3, 1), (0, 2, 6), (0, 3, 6)])
        sol = dreyfus_wagner_dst(g, 0, [2, 3])
        assert sol.cost == 7
        assert brute_force_dsn(Instance.dsn(g, [(0, 2), (0, 3)])).cost == 7

    def test_unreachable(self):
        with pytest.raises(NoFeasibleNetwork):
            dreyfus_wagner_dst(directed(2, [(1, 0, 1)]), 0, [1])


class TestSteinerForest:
    def test_two_far_pairs(self):
        ug = undirected(4, [(0, 1, 1), (2, 3, 1), (1, 2, 50)])
        assert steiner_forest_fpt(ug, [(0, 1), (2, 3)]).cost == 2

    def test_pairs_sharing_a_terminal(self):
        ug = undirected(4, [(0, 1, 1), (1, 2, 1), (0, 3, 5)])
        sol = steiner_forest_fpt(ug, [(0, 1), (1, 2)])
        assert sol.cost == 2 and len(sol) == 2

    def test_hub_merge_matches_oracle(self):
        # pairs (0,1) and (2,3); direct edges cost 3 each, a hub joins all four for 4
        ug = undirected(6, [(0, 1, 3), (2, 3, 3), (0, 4, 1), (1, 4, 1), (2, 4, 1), (3, 4, 1), (4, 5, 1)])
        sol = steiner_forest_fpt(ug, [(0, 1), (2, 3)])
        assert sol.cost == 4
        assert sol.cost == brute_force_dsn(Instance.dsn(ug, [(0, 1), (2, 3)])).cost

    def test_disconnected_pair(self):
        with pytest.raises(NoFeasibleNetwork):
            steiner_forest_fpt(undirected(4, [(0, 1, 1)]), [(0, 1), (2, 3)])


def _k4_subdivision_instance():
    """Six source vertices, one per K4 edge, each pointing at both ends; a costly hub offers a detour."""
    arcs, demands, hub = [], [], 10
    for i, (a, b) in enumerate(itertools.combinations(range(4), 2)):
        s = 4 + i
        arcs += [(s, a, 1), (s, b, 1)]
        demands += [(s, a), (s, b)]
    arcs += [(s, hub, 2) for s in range(4, 10)] + [(hub, u, 2) for u in range(4)]
    return Instance.dsn(Graph.build(11, arcs), demands)


class TestBoundedTreewidth:
    def test_both_directions_not_a_polytree(self):
        g = bi(3, [(0, 1, 1), (1, 2, 1)])
        inst = Instance(g, Instance.dsn(g, [(0, 2), (2, 0)]).pattern, "dsn", True, SolutionClass.treewidth(1))
        with pytest.raises(NoFeasibleNetwork):
            dsn_bounded_tw(inst)

    def test_single_demand_is_cheapest_path(self):
        g = bi(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 3)])
        sol = dsn_bounded_tw(Instance.dsn(g, [(0, 3)]), 1)
        assert sol.cost == 2 and is_polyforest(g, sol.edge_ids)

    def test_treewidth_filter_costs_more(self):
        inst = _k4_subdivision_instance()
        free = brute_force_dsn(inst)
        assert free.cost == 12 and multigraph_treewidth(inst.graph, free.edge_ids) == 3
        bounded = dsn_bounded_tw(inst, 2)
        assert bounded.cost == 18 > free.cost
        assert multigraph_treewidth(inst.graph, bounded.edge_ids) <= 2
        classed = Instance(inst.graph, inst.pattern, "dsn", False, SolutionClass.treewidth(2))
        assert brute_force_dsn(classed).cost == bounded.cost

    def test_vertex_cap(self):
        with pytest.raises(CapacityError):
            dsn_bounded_tw(_k4_subdivision_instance(), 2, vertex_cap=5)


def test_path_union_search_and_class_solver():
    g = bi(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    mask = path_union_search(g, [(0, 2)], lambda m: True)
    assert g.cost(i for i in range(g.m) if mask >> i & 1) == 2
    assert path_union_search(directed(2, [(0, 1, 1)]), [(1, 0)], lambda m: True) is None
    tree = solve_in_class(Instance.dsn(g, [(0, 2), (0, 3)]), POLYTREE)
    assert tree.cost == 2 and is_polyforest(g, tree.edge_ids)
