from fractions import Fraction

import networkx as nx
import pytest

from dsnkit.errors import ContractViolation, NoFeasibleNetwork
from dsnkit.exact import brute_force_dsn
from dsnkit.graph import is_bidirected, is_planar, reachable
from dsnkit.hardness import (
    CSIInput,
    GridTilingInput,
    check_inout,
    csi_budget,
    gen_csi_bidsn,
    gen_gridtiling_bidsnplanar,
    gen_hamcycle_biscss,
    gen_mcsi_dsn,
    gen_mcsi_scss,
    gen_uniqueness_gadget,
    gridtiling_budget,
    inout_census,
    representation_arcs,
    solve_grid_tiling,
)


def _cross(ell_edges=(("a", "b"),)):
    return CSIInput(tuple(ell_edges), ((1, 2),), (("a",), ("b",)))


class TestGadget:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_shape(self, n):
        g, gadget = gen_uniqueness_gadget(n, 3)
        assert g.vertex_count == 4 * n + 4
        assert g.m == 2 * (3 * n + 4 * n)
        assert is_bidirected(g) and all(e.weight == 3 for e in g.edges)
        assert len(gadget.boundary) == 2 * n

    def test_labels_are_auditable(self):
        g, gadget = gen_uniqueness_gadget(1)
        assert g.label(gadget.handle.v("s1")).endswith("(s1)")

    @pytest.mark.parametrize("side", ["right", "left"])
    def test_representation_weighs_seven(self, side):
        g, gadget = gen_uniqueness_gadget(2, Fraction(5, 2))
        arcs = representation_arcs(g, gadget, 2, side)
        rep = check_inout(gadget, arcs)
        assert rep.satisfies and rep.weight == 7 * Fraction(5, 2)
        assert rep.representation == (2, side)

    def test_empty_set_fails(self):
        _, gadget = gen_uniqueness_gadget(1)
        assert not check_inout(gadget, ()).satisfies

    def test_u1_exhaustive(self):
        g, gadget = gen_uniqueness_gadget(1)
        census = inout_census(gadget)
        assert census.min_weight == 7
        reps = {representation_arcs(g, gadget, 1, s) for s in ("right", "left")}
        assert set(census.minimum_sets) == reps

    def test_heavier_set_has_no_representation(self):
        g, gadget = gen_uniqueness_gadget(2)
        arcs = representation_arcs(g, gadget, 1, "right") | representation_arcs(g, gadget, 2, "left")
        rep = check_inout(gadget, arcs)
        assert rep.satisfies and rep.weight >= 8 and rep.representation is None


class TestGridTiling:
    def test_k1_budget_and_witness(self):
        gt = GridTilingInput(1, 2, {(1, 1): frozenset({(1, 1)})})
        inst, budget, witness = gen_gridtiling_bidsnplanar(gt, M=1)
        assert budget == 43 == gridtiling_budget(1, Fraction(1))
        assert witness.feasible and witness.cost == budget
        assert is_planar(inst.graph, witness.edge_ids)
        assert inst.pattern.k == 8 * 1 * 2
        assert is_bidirected(inst.graph)

    def test_k2_demands_and_solution(self):
        S = {(1, 1): frozenset({(1, 1), (2, 2)}), (1, 2): frozenset({(1, 2)}),
             (2, 1): frozenset({(2, 1), (1, 1)}), (2, 2): frozenset({(2, 2)})}
        gt = GridTilingInput(2, 2, S)
        inst, budget, witness = gen_gridtiling_bidsnplanar(gt, M=1)
        assert inst.pattern.k == 8 * 2 * 3
        assert solve_grid_tiling(gt) is not None
        assert witness.feasible and witness.cost == budget

    def test_default_weight_is_k_to_the_fourth(self):
        gt = GridTilingInput(1, 1, {(1, 1): frozenset({(1, 1)})})
        inst, budget, _ = gen_gridtiling_bidsnplanar(gt)
        assert budget == gridtiling_budget(1, Fraction(1))

    def test_empty_cell_rejected(self):
        with pytest.raises(ContractViolation):
            GridTilingInput(1, 2, {(1, 1): frozenset()})


class TestColoredSubgraph:
    def test_single_cross_edge(self):
        inst, budget, witness = gen_csi_bidsn(_cross(), M=1)
        assert budget == csi_budget(1, 2, Fraction(1))
        assert witness.feasible and witness.cost == budget
        assert is_bidirected(inst.graph)

    def test_no_cross_edge_is_infeasible(self):
        inst, budget, witness = gen_csi_bidsn(_cross(()), M=1)
        assert witness is None
        assert any(t not in reachable(inst.graph, s) for s, t in inst.pattern.demands)

    def test_demands_grow_linearly(self):
        path = CSIInput((("a", "b"), ("b", "c")), ((1, 2), (2, 3)), (("a",), ("b",), ("c",)))
        small = gen_csi_bidsn(_cross(), M=1).instance.pattern.k
        larger = gen_csi_bidsn(path, M=1).instance.pattern.k
        assert small < larger <= 4 * small

    def test_disconnected_pattern_rejected(self):
        with pytest.raises(ContractViolation):
            gen_csi_bidsn(CSIInput((), ((1, 2),), (("a",), ("b",), ("c",))))


class TestHamiltonianCycle:
    @pytest.mark.parametrize("graph, expected", [(nx.cycle_graph(5), 5), (nx.complete_graph(4), 4)])
    def test_hamiltonian_inputs(self, graph, expected):
        inst, budget, witness = gen_hamcycle_biscss(graph)
        assert budget == expected and witness.cost == expected
        assert brute_force_dsn(inst).cost == expected

    def test_star_is_not_hamiltonian(self):
        inst, budget, witness = gen_hamcycle_biscss(nx.star_graph(3))
        assert witness is None and brute_force_dsn(inst).cost > 4


class TestMaximumColoredSubgraph:
    def test_scss_witness(self):
        q = Fraction(1, 32)
        inst, budget, witness = gen_mcsi_scss(_cross(), q)
        assert budget == 2 * (1 + q) == witness.cost and witness.feasible
        assert brute_force_dsn(inst).cost == budget

    def test_scss_terminal_count(self):
        tri = CSIInput((("a", "b"), ("b", "c"), ("a", "c")), ((1, 2), (1, 3), (2, 3)), (("a",), ("b",), ("c",)))
        inst, _, _ = gen_mcsi_scss(tri, Fraction(1, 2))
        assert len(inst.pattern.terminals) == 9

    def test_scss_only_beta_and_eps_cost(self):
        inst, _, _ = gen_mcsi_scss(_cross(), Fraction(1, 2))
        costly = [e for e in inst.graph.edges if e.weight > 0]
        assert {e.weight for e in costly} == {Fraction(1, 2), Fraction(1)}
        assert len(costly) == 2 + 2

    def test_dsn_witness(self):
        inst, budget, witness = gen_mcsi_dsn(_cross())
        assert witness.cost == 1 == budget and witness.feasible
        assert brute_force_dsn(inst).cost == 1

    def test_dsn_demand_count(self):
        tri = CSIInput((("a", "b"),), ((1, 2), (1, 3), (2, 3)), (("a",), ("b",), ("c",)))
        inst, _, _ = gen_mcsi_dsn(tri)
        assert inst.pattern.k == 6

    def test_dsn_without_cross_edges_is_infeasible(self):
        inst, _, witness = gen_mcsi_dsn(_cross(()))
        assert witness is None
        with pytest.raises(NoFeasibleNetwork):
            brute_force_dsn(inst)

    def test_needs_complete_pattern(self):
        path = CSIInput((("a", "b"),), ((1, 2), (2, 3)), (("a",), ("b",), ("c",)))
        with pytest.raises(ContractViolation):
            gen_mcsi_dsn(path)
