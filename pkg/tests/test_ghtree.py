import itertools

import numpy as np
import pytest

from faircut.ghtree import GHSteinerTree, check_tree, gh_step, gh_tree, query_mincut
from faircut.graph import Graph, GraphError, cut_value
from oracles import all_pairs_lambda, random_graph


def _fixture(seed, n_hi=9):
    return random_graph(np.random.default_rng(seed), n_lo=4, n_hi=n_hi, extra=None)


@pytest.mark.parametrize("seed", range(4))
def test_tree_answers_all_pairs(seed):
    g = _fixture(seed)
    tree = gh_tree(g, range(g.n), 0.3, seed=seed, rounds=1)
    assert check_tree(g, tree) == []
    lam = all_pairs_lambda(g)
    for (a, b), ref in lam.items():
        val, cut = query_mincut(tree, a, b, g)
        assert ref - 1e-9 <= val <= 1.3 * ref + 1e-9
        assert a in cut.side and b not in cut.side
        assert cut_value(g, cut.side) == val


def test_steiner_subset_and_json_round_trip():
    g = _fixture(11)
    terms = [0, 2, g.n - 1]
    tree = gh_tree(g, terms, 0.3, seed=0, rounds=1)
    assert sorted(tree.terminals) == terms
    back = GHSteinerTree.from_json(tree.to_json())
    assert back.edges == tree.edges
    assert np.array_equal(back.mapping, tree.mapping)
    lam = all_pairs_lambda(g)
    for a, b in itertools.combinations(terms, 2):
        assert query_mincut(back, a, b, g)[0] >= lam[(a, b)] - 1e-9


def test_tree_of_a_path_is_the_path():
    g = Graph.from_edges(4, [(0, 1, 3), (1, 2, 1), (2, 3, 2)])
    tree = gh_tree(g, range(4), 0.3, rounds=1)
    assert sorted(w for _, _, w in tree.edges) == [1, 2, 3]


def test_query_rejects_non_terminals():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    tree = gh_tree(g, [0, 2], 0.3, rounds=1)
    with pytest.raises(GraphError):
        query_mincut(tree, 0, 1)


def test_step_outputs_are_disjoint():
    g = _fixture(5)
    w0 = g.total_capacity()
    out = gh_step(g, list(range(g.n)), w0, 0, 0.05, seed=0, rounds=1)
    sides = [c.side for c in out.F.values()]
    for x, c in out.F.items():
        assert x in c.side and x != 0 and 0 not in c.side
        assert c.value <= 1.05 * w0
    for a, b in itertools.combinations(sides, 2):
        assert not a & b
