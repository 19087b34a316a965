import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from faircut.almost_fair import almost_fair, check_almost_fair, exact_prune
from faircut.graph import Graph, boundary_graph
from oracles import graphs


@st.composite
def instances(draw):
    g = draw(graphs(n_min=3, n_max=9))
    u = sorted(draw(st.sets(st.integers(0, g.n - 1), min_size=1, max_size=g.n - 1)))
    t = draw(st.sampled_from(u))
    beta = draw(st.sampled_from([0.0, 0.05, 0.2, 0.5]))
    eps = draw(st.sampled_from([0.25, 0.5, 1.0]))
    return g, u, t, beta, eps


@given(instances())
def test_exact_engine_contract(inst):
    g, u, t, beta, eps = inst
    res = almost_fair(g, u, t, eps, beta, engine="exact")
    assert check_almost_fair(g, u, t, beta, eps, res) == []


@settings(max_examples=20)
@given(instances())
def test_weights_engine_contract(inst):
    g, u, t, beta, eps = inst
    if boundary_graph(g, u).graph.n > 14:
        return
    res = almost_fair(g, u, t, eps, beta, engine="mwu", seed=3)
    assert check_almost_fair(g, u, t, beta, eps, res) == []
    assert res.max_rbar <= res.alpha + 1e-12


def test_whole_graph_needs_no_pruning():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    res = exact_prune(g, [0, 1, 2], 1, 0.1)
    assert res.pruned == frozenset()


def test_sink_must_be_inside():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    with pytest.raises(ValueError):
        almost_fair(g, [0, 1], 2, 0.5, 0.1)


def test_bottleneck_is_pruned():
    # heavy boundary edge into 0, thin edge 0-1, t = 1: vertex 0 must go
    g = Graph.from_edges(3, [(2, 0, 10), (0, 1, 1)])
    res = almost_fair(g, [0, 1], 1, 0.5, 0.1, engine="exact")
    assert res.pruned == frozenset({0})
    assert check_almost_fair(g, [0, 1], 1, 0.1, 0.5, res) == []
