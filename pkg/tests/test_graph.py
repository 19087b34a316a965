import numpy as np
import pytest
from hypothesis import given, strategies as st

from faircut.graph import (
    Graph, GraphError, boundary_graph, contract, cut_value, induced_subgraph, make_cut,
    self_loop_subgraph, volume,
)
from oracles import cut_of, graphs


def test_rejects_bad_input():
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 3, 1)])
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 1, 0)])
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 1, float("inf"))])
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(0, 1, 1), (1, 2, 1e30)], check_ratio=True)


def test_cut_value_needs_proper_side():
    g = Graph.from_edges(3, [(0, 1, 2), (1, 2, 3)])
    assert cut_value(g, [1]) == 5
    with pytest.raises(GraphError):
        cut_value(g, [])
    with pytest.raises(GraphError):
        cut_value(g, [0, 1, 2])


def test_self_loops_count_twice_in_degree():
    g = Graph.from_edges(2, [(0, 0, 3), (0, 1, 1)])
    assert g.degrees().tolist() == [7, 1]
    assert cut_value(g, [0]) == 1


@given(graphs(), st.data())
def test_cut_value_matches_reference(g, data):
    side = data.draw(st.sets(st.integers(0, g.n - 1), min_size=1, max_size=g.n - 1))
    assert cut_value(g, side) == pytest.approx(cut_of(g, side))
    assert make_cut(g, side).side == frozenset(side)


@given(graphs(n_min=3), st.data())
def test_self_loop_subgraph_keeps_degrees(g, data):
    s = sorted(data.draw(st.sets(st.integers(0, g.n - 1), min_size=1)))
    h = self_loop_subgraph(g, s)
    assert np.allclose(h.graph.degrees(), g.degrees()[s])
    assert volume(h.graph, range(h.graph.n)) == pytest.approx(volume(g, s))


@given(graphs(n_min=3), st.data())
def test_boundary_graph_pendants_carry_capacity(g, data):
    s = sorted(data.draw(st.sets(st.integers(0, g.n - 1), min_size=1, max_size=g.n - 1)))
    bg = boundary_graph(g, s)
    h = bg.graph
    k = bg.k
    assert k == len(s)
    assert h.n - k == len(bg.boundary_map)
    pend_cap = sum(c for u, v, c in h.edges() if u >= k or v >= k)
    assert pend_cap == pytest.approx(cut_of(g, s))
    # interior degrees are unchanged
    assert np.allclose(h.degrees()[:k], g.degrees()[s])


@given(graphs(n_min=4), st.data())
def test_contract_preserves_cuts_of_unions(g, data):
    part = sorted(data.draw(st.sets(st.integers(0, g.n - 1), min_size=2, max_size=g.n - 1)))
    h, vmap = contract(g, [part])
    rest = [v for v in range(g.n) if v not in part]
    side = data.draw(st.sets(st.sampled_from(rest), max_size=len(rest) - 1)) if len(rest) > 1 else set()
    img = {int(vmap[v]) for v in side} | {int(vmap[part[0]])}
    assert cut_of(h, img) == pytest.approx(cut_of(g, set(side) | set(part)))


def test_induced_subgraph_origin():
    g = Graph.from_edges(4, [(0, 1, 1), (1, 2, 2), (2, 3, 3)])
    h, verts = induced_subgraph(g, [1, 2, 3])
    assert verts.tolist() == [1, 2, 3]
    assert h.origin.tolist() == [1, 2]


def test_components():
    g = Graph.from_edges(5, [(0, 1, 1), (3, 4, 1)])
    lab = g.components()
    assert lab[0] == lab[1] != lab[2]
    assert lab[3] == lab[4]
