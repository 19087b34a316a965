import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from faircut.expander import (
    BalancedCut, Certified, NearExpanderCut, conductance, cut_matching, exact_conductance,
    expander_decomposition, subdivision_graph, trimming_report,
)
from faircut.graph import Graph, GraphError, boundary_capacity, volume
from oracles import graphs, min_conductance, naive_conductance, part_conductance


def clique(k, w=1.0, off=0):
    return [(i + off, j + off, w) for i, j in itertools.combinations(range(k), 2)]


@given(graphs(n_min=3, n_max=8), st.data())
def test_conductance_matches_reference(g, data):
    side = data.draw(st.sets(st.integers(0, g.n - 1), min_size=1, max_size=g.n - 1))
    assert conductance(g, side) == pytest.approx(naive_conductance(g, side))


@settings(max_examples=20)
@given(graphs(n_min=3, n_max=8))
def test_exact_conductance_matches_reference(g):
    val, _ = exact_conductance(g)
    assert val == pytest.approx(min_conductance(g))


def test_subdivision_graph_splits_every_edge():
    g = Graph.from_edges(3, [(0, 1, 2), (1, 2, 3), (2, 2, 1)])
    sub = subdivision_graph(g)
    assert sub.graph.n == 3 + 3
    assert sub.graph.m == 6
    assert np.allclose(sub.graph.degrees()[:3], g.degrees())


@pytest.mark.parametrize("k", [6, 8, 10])
def test_two_cliques_split_at_the_bridge(k):
    g = Graph.from_edges(2 * k, clique(k) + clique(k, off=k) + [(k - 1, k, 1.0)])
    part = expander_decomposition(g, 0.05, seed=0)
    assert sorted(map(tuple, part.parts)) == [tuple(range(k)), tuple(range(k, 2 * k))]
    assert part.crossing_weight == 1.0


def test_single_clique_is_one_part():
    g = Graph.from_edges(8, clique(8))
    part = expander_decomposition(g, 0.05, seed=0)
    assert part.parts == [list(range(8))]


def test_disconnected_graph_splits_into_components():
    g = Graph.from_edges(6, clique(3) + clique(3, off=3))
    part = expander_decomposition(g, 0.05)
    assert sorted(map(tuple, part.parts)) == [(0, 1, 2), (3, 4, 5)]
    assert part.crossing_weight == 0


@pytest.mark.parametrize("seed", range(6))
def test_random_parts_expand(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 16))
    lab = rng.integers(0, 3, n)
    edges = [(i, j, float(rng.integers(1, 5))) for i, j in itertools.combinations(range(n), 2)
             if rng.random() < (0.7 if lab[i] == lab[j] else 0.05)] or [(0, 1, 1.0)]
    g = Graph.from_edges(n, edges)
    phi = 0.05
    part = expander_decomposition(g, phi, seed=seed)
    assert sorted(v for p in part.parts for v in p) == list(range(n))
    for p in part.parts:
        if 2 <= len(p) <= 14:
            assert part_conductance(g, p) >= phi / 6 - 1e-12


def test_cut_matching_certifies_a_clique():
    g = Graph.from_edges(8, clique(8))
    assert isinstance(cut_matching(g, 0.05, seed=0), Certified)


def test_cut_matching_finds_sparse_cut():
    g = Graph.from_edges(12, clique(6) + clique(6, off=6) + [(0, 6, 0.01)])
    res = cut_matching(g, 0.05, seed=0)
    assert isinstance(res, (BalancedCut, NearExpanderCut))
    side = res.cut.side
    assert boundary_capacity(g, side) <= 0.05 * min(volume(g, side), volume(g, set(range(12)) - side))


def test_trimming_removes_a_dangling_path():
    edges = clique(10, 10.0) + [(9, 10, 0.01), (10, 11, 0.01), (11, 12, 0.01)]
    g = Graph.from_edges(14, edges + [(12, 13, 5.0)])
    a = list(range(13))
    rep = trimming_report(g, a, 0.5, seed=0)
    assert rep.kept < frozenset(a)
    assert rep.vol_after >= rep.vol_before - 4 * rep.boundary_before / 0.5 - 1e-9
    assert rep.boundary_after <= 2 * rep.boundary_before + 1e-9


def test_trimming_checks_precondition():
    g = Graph.from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    with pytest.raises(GraphError):
        trimming_report(g, [0, 1], 0.5)
