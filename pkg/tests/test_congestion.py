import numpy as np
import pytest
from hypothesis import given, settings

from faircut import congestion
from faircut.congestion import build, check_family, exclude_sink, family_from_sets, is_laminar, measure_quality
from faircut.graph import Graph
from oracles import graphs


@given(graphs(n_min=2, n_max=10, connected=False))
def test_family_is_laminar_and_shallow(g):
    fam = build(g, seed=1)
    assert not check_family(g, fam)
    assert fam.quality >= 1.0


@settings(max_examples=25)
@given(graphs(n_min=3, n_max=7))
def test_tree_recursion_matches_linear_program(g):
    fam = build(g, seed=2, measure=False)
    sets = [np.asarray(s) for s in fam.sets]
    cuts = np.array([congestion.boundary_capacity(g, s) for s in sets])
    masks, _ = congestion._all_cut_values(g)
    a = congestion._laminar_best(g.n, sets, cuts, masks)
    b = congestion._lp_best(g.n, sets, cuts)
    inner = (masks > 0) & (masks < (1 << g.n) - 1)
    assert np.allclose(a[inner], np.asarray(b)[inner], rtol=1e-6, atol=1e-6)


def test_prefixes_of_a_path_give_quality_one():
    # on a tree, the edge cuts alone decide routability
    g = Graph.from_edges(4, [(0, 1, 1), (1, 2, 2), (2, 3, 1)])
    fam = family_from_sets(g, [[0], [0, 1], [0, 1, 2]])
    assert measure_quality(g, fam) == pytest.approx(1.0)
    fam = family_from_sets(g, [[0], [1], [2], [3]])
    assert measure_quality(g, fam) > 1.0


def test_empty_family_has_unbounded_quality():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    fam = family_from_sets(g, [])
    assert measure_quality(g, fam) == float("inf")


def test_exclude_sink_removes_t_everywhere():
    g = Graph.from_edges(5, [(i, i + 1, 1) for i in range(4)])
    fam = exclude_sink(build(g, seed=0), 2, g)
    assert not check_family(g, fam, t=2)


def test_is_laminar():
    assert is_laminar([[0, 1], [0], [2]])
    assert not is_laminar([[0, 1], [1, 2]])
