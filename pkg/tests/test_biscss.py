import random

import pytest

from conftest import bi, directed
from dsnkit.biscss import biscss_fpt, polytree_decompose
from dsnkit.errors import ContractViolation, NoFeasibleNetwork
from dsnkit.exact import brute_force_dsn, dreyfus_wagner_st
from dsnkit.graph import Instance, is_polyforest, underlying_undirected
from dsnkit.sweep import bidirected_cycle, random_graph


def _arc(g, u, v):
    return next(e.id for e in g.edges if (e.tail, e.head) == (u, v))


def test_triangle():
    assert biscss_fpt(bi(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]), range(3)).cost == 3


def test_unit_edge_needs_both_directions():
    sol = biscss_fpt(bi(2, [(0, 1, 1)]), [0, 1])
    assert sol.cost == 2 and len(sol) == 2


def test_cycle_beats_doubled_tree():
    g = bidirected_cycle(5)
    assert biscss_fpt(g, range(5)).cost == 5
    assert 2 * dreyfus_wagner_st(underlying_undirected(g), range(5)).cost == 8


def test_contract_checks():
    with pytest.raises(ContractViolation):
        biscss_fpt(directed(2, [(0, 1, 1), (1, 0, 2)]), [0, 1])
    with pytest.raises(NoFeasibleNetwork):
        biscss_fpt(bi(3, [(0, 1, 1)]), [0, 2])


@pytest.mark.parametrize("cap_patterns", [4096, 1])
def test_matches_oracle(cap_patterns):
    rng = random.Random(4)
    checked = 0
    while checked < 25:
        n = rng.randint(2, 6)
        g = random_graph(rng, n, True, 0.5)
        if cap_patterns == 1 and g.m > 14:
            continue
        R = rng.sample(range(n), rng.randint(2, min(4, n)))
        try:
            opt = brute_force_dsn(Instance.scss(g, R))
        except NoFeasibleNetwork:
            continue
        assert biscss_fpt(g, R, cap_patterns=cap_patterns).cost == opt.cost
        checked += 1


def test_directed_cycle_splits_into_paths():
    g = bidirected_cycle(4)
    cyc = [_arc(g, i, (i + 1) % 4) for i in range(4)]
    parts = polytree_decompose(g, cyc, [0, 2])
    assert len(parts) == 2
    for pat, sol in parts:
        assert set(pat.terminals) == {0, 2} and len(sol) == 2


def test_edge_pair_splits_into_two_arcs():
    g = bi(2, [(0, 1, 1)])
    parts = polytree_decompose(g, [0, 1], [0, 1])
    assert sorted(len(s) for _, s in parts) == [1, 1]


def test_random_optima_decompose_exactly():
    rng = random.Random(8)
    for _ in range(40):
        n = rng.randint(2, 7)
        g = random_graph(rng, n, True, 0.55)
        R = rng.sample(range(n), rng.randint(2, min(4, n)))
        try:
            opt = brute_force_dsn(Instance.scss(g, R))
        except NoFeasibleNetwork:
            continue
        parts = polytree_decompose(g, opt, R)
        union = [i for _, s in parts for i in s.edge_ids]
        assert sorted(union) == sorted(opt.edge_ids)
        assert all(is_polyforest(g, s.edge_ids) for _, s in parts)
