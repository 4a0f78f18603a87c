from fractions import Fraction

import networkx as nx
import pytest

from conftest import bi, directed, undirected
from dsnkit.errors import ContractViolation, ParseError
from dsnkit.graph import (
    Graph,
    Instance,
    Pattern,
    check_feasible,
    is_bidirected,
    is_planar,
    make_solution,
    multigraph_treewidth,
    scc_condensation,
    underlying_undirected,
)
from dsnkit.io import (
    Certificate,
    parse_certificate,
    parse_instance,
    parse_solution,
    serialize_certificate,
    serialize_instance,
    serialize_solution,
)
from dsnkit.treewidth import tree_decomposition, treewidth_exact


def test_parse_minimal_instance():
    inst = parse_instance("dsn 2 1 1\ne 0 1 1\nd 0 1\n")
    assert inst.graph.vertex_count == 2
    assert inst.graph.edges[0].weight == 1
    assert inst.pattern.demands == ((0, 1),)


def test_parse_rational_weight_in_lowest_terms():
    inst = parse_instance("dsn 2 1 1\ne 0 1 14/4\nd 0 1\n")
    assert inst.graph.edges[0].weight == Fraction(7, 2)


def test_bidirected_flag_is_enforced():
    with pytest.raises(ParseError):
        parse_instance("dsn 2 1 1 bidirected\ne 0 1 1\nd 0 1\n")


@pytest.mark.parametrize("text", [
    "dsn 2 1 1\ne 0 5 1\nd 0 1\n",
    "dsn 2 1 1\ne 0 1 -1\nd 0 1\n",
    "dsn 2 1 1\ne 0 1 1/0\nd 0 1\n",
    "dsn 2 2 1\ne 0 1 1\nd 0 1\n",
    "dsn 2 1 1\ne 0 0 1\nd 0 1\n",
    "dsn 2 1 1\ne 0 1 1\nd 0 1\nq 1\n",
    "",
])
def test_malformed_instances_are_rejected(text):
    with pytest.raises(ParseError):
        parse_instance(text)


def test_instance_round_trip():
    g = bi(3, [(0, 1, Fraction(1, 3)), (1, 2, 2)], labels=["a", None, "c"])
    for inst in (Instance.scss(g, [0, 2], bidirected_required=True), Instance.dsn(g, [(0, 2), (2, 1)])):
        again = parse_instance(serialize_instance(inst))
        assert again == inst


def test_solution_and_certificate_round_trip():
    g = bi(2, [(0, 1, Fraction(5, 2))])
    sol = make_solution(g, [0, 1])
    declared, ids = parse_solution(serialize_solution(sol), g)
    assert declared == 5 and ids == sol.edge_ids
    cert = Certificate(Fraction(43), frozenset({1, 4}))
    assert parse_certificate(serialize_certificate(cert)) == cert
    with pytest.raises(ParseError):
        parse_solution("e 0\ne 0\n", g)


@pytest.mark.parametrize("arcs, expected", [
    ([(0, 1, 1)], False),
    ([(0, 1, 1), (1, 0, 1)], True),
    ([(0, 1, 1), (1, 0, 2)], False),
])
def test_is_bidirected(arcs, expected):
    assert is_bidirected(directed(2, arcs)) is expected


def test_underlying_undirected():
    tri = underlying_undirected(directed(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)]))
    assert not tri.directed and tri.m == 3
    pair = underlying_undirected(bi(2, [(0, 1, 5)]))
    assert pair.m == 1 and pair.edges[0].weight == 5
    assert underlying_undirected(Graph.build(0, [])).m == 0


def test_check_feasible():
    g = directed(3, [(0, 1, 1), (1, 2, 1)])
    p = Pattern.from_demands([(0, 2)])
    assert check_feasible(g, {0, 1}, p)
    assert not check_feasible(g, {0}, p)
    cyc = directed(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)])
    assert check_feasible(cyc, {0, 1, 2}, Pattern.strongly_connect(range(3)))


def test_solution_cost_is_exact():
    g = directed(3, [(0, 1, Fraction(1, 3)), (1, 2, Fraction(2, 3))])
    sol = make_solution(g, [0, 1], Pattern.from_demands([(0, 2)]))
    assert sol.cost == 1 and isinstance(sol.cost, Fraction) and sol.feasible


def test_negative_weight_and_loops_rejected():
    with pytest.raises(ContractViolation):
        directed(2, [(0, 1, -1)])
    with pytest.raises(ContractViolation):
        directed(2, [(0, 0, 1)])


def test_scc_condensation():
    assign, cond = scc_condensation(directed(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)]))
    assert len(set(assign)) == 1 and cond.m == 0
    assign, cond = scc_condensation(directed(3, [(0, 1, 1), (1, 2, 1)]))
    assert len(set(assign)) == 3 and cond.m == 2
    two = directed(4, [(0, 1, 1), (1, 0, 1), (2, 3, 1), (3, 2, 1), (1, 2, 1)])
    assign, cond = scc_condensation(two)
    assert len(set(assign)) == 2 and cond.m == 1


def _nx_graph(h: nx.Graph) -> Graph:
    nodes = sorted(h.nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    return undirected(len(nodes), [(idx[a], idx[b], 1) for a, b in h.edges])


def test_treewidth_exact():
    assert treewidth_exact(_nx_graph(nx.random_labeled_tree(9, seed=3))) == 1
    assert treewidth_exact(_nx_graph(nx.complete_graph(4))) == 3
    assert treewidth_exact(_nx_graph(nx.grid_2d_graph(3, 3))) == 3
    td = tree_decomposition(_nx_graph(nx.grid_2d_graph(3, 3)))
    assert td.width == 3


def test_multigraph_treewidth_counts_reverse_pairs():
    g = bi(2, [(0, 1, 1)])
    assert multigraph_treewidth(g, [0]) == 1
    assert multigraph_treewidth(g, [0, 1]) == 2


def test_is_planar():
    assert is_planar(_nx_graph(nx.complete_graph(4)))
    assert not is_planar(_nx_graph(nx.complete_graph(5)))
    assert not is_planar(_nx_graph(nx.complete_bipartite_graph(3, 3)))
