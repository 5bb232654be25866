import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcp.core import make_domains
from qcp.graphs import (
    NIL,
    Digraph,
    Matching,
    VariableValueGraph,
    build_value_graph,
    direct_graph,
    max_matching_hk,
    remove_edges_classical,
    remove_edges_trace,
    tarjan_scc,
    verify_matching_maximum,
)

from oracles import (
    closure_partition,
    edges_in_some_maximum_matching,
    max_matching_size,
    random_digraph,
)

FIG1 = make_domains([[1, 2], [1, 2], [2, 3, 4]])


def fig1_graph():
    return build_value_graph(FIG1, (0, 1, 2))


def test_fig1_sizes():
    g = fig1_graph()
    assert (g.nx, g.nv, g.m) == (3, 4, 7)


def test_singleton_graph():
    g = build_value_graph(make_domains([[5]]), (0,))
    assert (g.nx, g.nv, g.m) == (1, 1, 1)


def test_build_rejects_empty_domain():
    with pytest.raises(ValueError):
        build_value_graph(((1,), ()), (0, 1))


@given(st.lists(st.sets(st.integers(0, 8), min_size=1), min_size=1, max_size=6))
def test_edge_count(sets):
    g = build_value_graph(make_domains(sets), tuple(range(len(sets))))
    assert g.m == sum(len(s) for s in sets)
    assert g.m >= g.nv


def test_fig1_matching_and_removal():
    g = fig1_graph()
    m = max_matching_hk(g)
    assert m.size == 3
    assert verify_matching_maximum(g, m)
    assert remove_edges_classical(g, m) == [(2, 1)]  # (x3, d2)


def test_fig2_directed_graph():
    g = fig1_graph()
    m = Matching([1, 0, 3], g.nv)  # x1-d2, x2-d1, x3-d4
    tr = remove_edges_trace(g, m)
    x3, d3, d4 = 2, 3 + 2, 3 + 3
    assert tr.used == {(d3, x3), (x3, d4)}
    assert tr.scc.partition() == {frozenset({0, 1, 3, 4}), frozenset({2}),
                                  frozenset({5}), frozenset({6})}
    assert tr.removed == [(2, 1)]
    right = sum(1 for u, adj in enumerate(tr.directed.out) for w in adj if u < g.nx)
    assert right == m.size and tr.directed.m == g.m


def test_empty_graph():
    g = VariableValueGraph.from_edges(2, [1, 2], [])
    m = max_matching_hk(g)
    assert m.size == 0 and verify_matching_maximum(g, m)
    assert tarjan_scc(Digraph(((), (), ()))).count == 3


def test_empty_matching_not_maximum():
    g = fig1_graph()
    assert not verify_matching_maximum(g, Matching([NIL] * 3, g.nv))


def test_verify_rejects_foreign_edge():
    g = fig1_graph()
    with pytest.raises(ValueError):
        verify_matching_maximum(g, Matching([3, NIL, NIL], g.nv))


def test_k22_nothing_removed():
    g = build_value_graph(make_domains([[1, 2], [1, 2]]), (0, 1))
    assert remove_edges_classical(g, max_matching_hk(g)) == []


def test_remove_edges_precondition():
    g = fig1_graph()
    with pytest.raises(ValueError):
        remove_edges_classical(g, Matching([0, NIL, NIL], g.nv))


def _random_graph(rng, nx, nv, p):
    edges = [(i, j) for i in range(nx) for j in range(nv) if rng.random() < p]
    return VariableValueGraph.from_edges(nx, list(range(nv)), edges)


def test_hk_against_exhaustive_and_phase_bound():
    rng = random.Random(11)
    for _ in range(200):
        nx = rng.randint(0, 6)
        g = _random_graph(rng, nx, rng.randint(0, 12 - nx), rng.random())
        m = max_matching_hk(g)
        assert m.size == max_matching_size(g.var_adj)
        assert verify_matching_maximum(g, m)
        assert m.phases <= math.ceil(2 * math.sqrt(m.size + 1))
        vm = [j for j in m.var_match if j != NIL]
        assert len(vm) == len(set(vm))


@given(st.data())
def test_verify_against_brute_force(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    nx = rng.randint(1, 5)
    g = _random_graph(rng, nx, rng.randint(1, 6), 0.5)
    # a random (not necessarily maximum) matching
    used, var_match = set(), []
    for adj in g.var_adj:
        free = [j for j in adj if j not in used]
        j = rng.choice(free + [NIL]) if free else NIL
        if j != NIL:
            used.add(j)
        var_match.append(j)
    m = Matching(var_match, g.nv)
    assert verify_matching_maximum(g, m) == (m.size == max_matching_size(g.var_adj))


def test_tarjan_against_closure():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(1, 50)
        out = random_digraph(rng, n, rng.randint(0, 3 * n))
        scc = tarjan_scc(Digraph(out))
        assert scc.partition() == closure_partition(out)
        assert sorted(set(scc.comp)) == list(range(1, scc.count + 1))


def test_berge_property():
    rng = random.Random(9)
    for _ in range(300):
        nx = rng.randint(1, 6)
        doms = [sorted(rng.sample(range(7), rng.randint(1, 7))) for _ in range(nx)]
        g = build_value_graph(make_domains(doms), tuple(range(nx)))
        m = max_matching_hk(g)
        if m.size < nx:
            continue
        removed = set(remove_edges_classical(g, m))
        keep = edges_in_some_maximum_matching(g.var_adj)
        assert removed == set(g.edges()) - keep
        assert not removed & set(m.pairs())
        dg = direct_graph(g, m)
        scc = tarjan_scc(dg)
        assert all(scc.comp[i] != scc.comp[g.nx + j] for i, j in removed)
