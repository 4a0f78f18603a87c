import random
from fractions import Fraction

import pytest

from conftest import bi
from dsnkit.errors import ContractViolation, NoFeasibleNetwork
from dsnkit.exact import brute_force_dsn
from dsnkit.graph import Instance, Pattern, check_feasible, is_directed_cycle_through, simple_adjacency
from dsnkit.structure import (
    canonicalize_components,
    condensation_is_polyforest,
    normalize_solution,
    prune_minimal,
    reduce_degrees,
    replace_polycycle,
    tie_break_order,
)
from dsnkit.sweep import random_graph


def _degrees(g):
    adj = simple_adjacency(g)
    return {v: len(adj.get(v, ())) for v in range(g.vertex_count)}


def test_star_terminals_become_pendant():
    g = bi(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])
    h, trace = reduce_degrees(g, [1, 2, 3])
    deg = _degrees(h)
    assert deg[0] == 3
    assert all(deg[t] == 1 for t in (1, 2, 3))
    assert len(trace.splitters) == 3
    zero = [e for e in h.edges if e.weight == 0]
    assert len(zero) == 6 and all(not trace.expansion[e.id] for e in zero)


def test_terminal_pair_gets_splitters():
    h, trace = reduce_degrees(bi(2, [(0, 1, 1)]), [0, 1])
    assert h.vertex_count == 4 and len(trace.splitters) == 2


def test_high_degree_steiner_vertex_is_split():
    g = bi(6, [(0, i, 1) for i in range(1, 6)])
    h, _ = reduce_degrees(g, [1, 2, 3, 4, 5])
    assert max(_degrees(h).values()) <= 3


def test_reduce_degrees_needs_bidirected():
    from dsnkit.graph import Graph
    with pytest.raises(ContractViolation):
        reduce_degrees(Graph.build(2, [(0, 1, 1)]), [0, 1])


def test_trace_maps_optima_back_at_equal_cost():
    rng = random.Random(11)
    checked = 0
    for _ in range(40):
        n = rng.randint(3, 6)
        g = random_graph(rng, n, True, 0.6)
        terms = rng.sample(range(n), 2)
        inst = Instance.dsn(g, [tuple(terms)])
        try:
            opt = brute_force_dsn(inst)
        except NoFeasibleNetwork:
            continue
        h, trace = reduce_degrees(g, terms)
        pushed = trace.push(opt.edge_ids)
        assert h.cost(pushed) == opt.cost
        back = trace.lift(pushed)
        assert back == opt.edge_ids
        reduced_opt = brute_force_dsn(Instance.dsn(h, [tuple(terms)]))
        assert reduced_opt.cost == opt.cost
        assert check_feasible(g, trace.lift(reduced_opt.edge_ids), inst.pattern)
        checked += 1
    assert checked > 10


def test_tie_break_order():
    g = bi(3, [(0, 1, 2), (1, 2, 1), (0, 2, 1)])
    order = tie_break_order(g)
    weights = [g.edges[i].weight for i in order]
    assert weights == sorted(weights)
    # reverse pairs adjacent
    for a, b in zip(order[::2], order[1::2]):
        assert {g.edges[a].tail, g.edges[a].head} == {g.edges[b].tail, g.edges[b].head}


def _cycle4():
    return bi(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])


def _arc(g, u, v):
    return next(e.id for e in g.edges if (e.tail, e.head) == (u, v))


def test_polycycle_becomes_directed_cycle():
    g = _cycle4()
    mixed = [_arc(g, 0, 1), _arc(g, 2, 1), _arc(g, 2, 3), _arc(g, 0, 3)]
    out = replace_polycycle(g, mixed, mixed)
    assert out.cost == 4
    assert is_directed_cycle_through(g, out.edge_ids, range(4))


def test_directed_cycle_is_left_alone():
    g = _cycle4()
    cyc = [_arc(g, 0, 1), _arc(g, 1, 2), _arc(g, 2, 3), _arc(g, 3, 0)]
    assert replace_polycycle(g, cyc, cyc).edge_ids == frozenset(cyc)
    assert canonicalize_components(g, cyc).edge_ids == frozenset(cyc)


def test_chord_becomes_removable_after_replacement():
    g = bi(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1), (0, 2, 1), (2, 4, 1)])
    ring = [_arc(g, 0, 1), _arc(g, 2, 1), _arc(g, 2, 3), _arc(g, 0, 3)]
    chord = _arc(g, 0, 2)
    N = ring + [chord, _arc(g, 2, 4)]
    p = Pattern.from_demands([(0, 4), (0, 1)])
    assert check_feasible(g, N, p)
    out = replace_polycycle(g, N, ring)
    assert chord in out.edge_ids
    assert check_feasible(g, out.edge_ids - {chord}, p)
    assert not check_feasible(g, set(N) - {chord}, p)


def test_diamond_paths_become_one_strong_component():
    g = bi(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)])
    N = [_arc(g, 0, 1), _arc(g, 1, 3), _arc(g, 0, 2), _arc(g, 2, 3)]
    out = canonicalize_components(g, N)
    assert out.cost == 4
    assert is_directed_cycle_through(g, out.edge_ids, range(4))
    assert condensation_is_polyforest(g, out.edge_ids)


def test_polytree_is_unchanged():
    g = bi(4, [(0, 1, 1), (1, 2, 1), (1, 3, 1)])
    N = [_arc(g, 0, 1), _arc(g, 1, 2), _arc(g, 3, 1)]
    assert canonicalize_components(g, N).edge_ids == frozenset(N)


def test_prune_minimal():
    tri = bi(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    p = Pattern.from_demands([(0, 1)])
    out = prune_minimal(tri, range(tri.m), p)
    assert out.edge_ids == {_arc(tri, 0, 1)}
    assert prune_minimal(tri, out, p).edge_ids == out.edge_ids
    with pytest.raises(ContractViolation):
        prune_minimal(tri, [], p)


def test_detour_is_pruned():
    g = bi(3, [(0, 1, 1), (1, 2, Fraction(1, 2)), (0, 2, 3)])
    p = Pattern.from_demands([(0, 1)])
    N = [_arc(g, 0, 1), _arc(g, 0, 2), _arc(g, 2, 1)]
    assert prune_minimal(g, N, p).edge_ids == {_arc(g, 0, 1)}


def test_normalize_keeps_optimum_cost():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(3, 6)
        g = random_graph(rng, n, True, 0.6)
        inst = Instance.scss(g, rng.sample(range(n), 3))
        try:
            opt = brute_force_dsn(inst)
        except NoFeasibleNetwork:
            continue
        out = normalize_solution(g, opt, inst.pattern)
        assert out.cost == opt.cost and out.feasible
        assert condensation_is_polyforest(g, out.edge_ids)
