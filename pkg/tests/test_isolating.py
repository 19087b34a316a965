import pytest
from hypothesis import given, settings, strategies as st

from faircut.graph import Graph, GraphError
from faircut.isolating import check_isolating, isolating_cuts, steiner_mincut
from oracles import brute_steiner, graphs, min_isolating_value


@st.composite
def with_terminals(draw, n_max=10):
    g = draw(graphs(n_min=3, n_max=n_max))
    k = draw(st.integers(2, min(5, g.n)))
    terms = sorted(draw(st.sets(st.integers(0, g.n - 1), min_size=k, max_size=k)))
    return g, terms


@given(with_terminals())
def test_isolating_cuts_contract(inst):
    g, terms = inst
    res = isolating_cuts(g, terms, 0.2, seed=1)
    assert check_isolating(g, terms, res) == []
    seen = set()
    for x in terms:
        c = res.cuts[x]
        assert x in c.side and not (set(terms) - {x}) & c.side
        assert not seen & c.side
        seen |= c.side
        assert c.value <= 1.2 * min_isolating_value(g, x, terms) + 1e-9


@settings(max_examples=25)
@given(with_terminals(n_max=9))
def test_steiner_mincut_bound(inst):
    g, terms = inst
    cut = steiner_mincut(g, terms, 0.25, seed=2)
    inside = set(terms) & cut.side
    assert 0 < len(inside) < len(terms)
    assert cut.value <= 1.25 * brute_steiner(g, terms) + 1e-9


def test_work_budget_recorded():
    g = Graph.from_edges(6, [(i, (i + 1) % 6, 1 + i) for i in range(6)])
    res = isolating_cuts(g, [0, 2, 4], 0.2)
    assert 0 < res.work <= 2 * (g.m + g.n) + 2 * 3


def test_rejects_bad_arguments():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    with pytest.raises(GraphError):
        isolating_cuts(g, [0], 0.2)
    with pytest.raises(GraphError):
        isolating_cuts(g, [0, 2], 1.5)
