from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from faircut.flows import (
    FairnessCertificate, Infeasible, Refuted, check_fair_witness, compose, exact,
    feasible_flow_lower_bounds, max_flow_exact, path_decompose, route_demand,
    verify_fair_cut, verify_one_sided_fair,
)
from faircut.graph import Graph, GraphError
from oracles import brute_min_cut, graphs


def _pair(draw, n):
    s = draw(st.integers(0, n - 1))
    t = draw(st.integers(0, n - 1).filter(lambda x: x != s))
    return s, t


@given(graphs(), st.data())
def test_max_flow_matches_brute_force(g, data):
    s, t = _pair(data.draw, g.n)
    ref = brute_min_cut(g, s, t)
    val, f, cut = max_flow_exact(g, s, t, exact_mode=True)
    assert val == ref
    assert cut.value == ref and s in cut.side and t not in cut.side
    fv, _, _ = max_flow_exact(g, s, t)
    assert fv == pytest.approx(ref)
    net = f.net_out()
    assert net[s] == ref and net[t] == -ref
    assert all(x == 0 for v, x in enumerate(net) if v not in (s, t))
    assert all(abs(x) <= c for x, c in zip(f.values, g.cap))


@given(graphs(), st.data())
def test_path_decomposition_recomposes(g, data):
    s, t = _pair(data.draw, g.n)
    _, f, _ = max_flow_exact(g, s, t, exact_mode=True)
    pieces = path_decompose(f)
    back = compose(g, pieces, exact_mode=True)
    assert [x for x in back.values] == [x if u != v else 0 for x, (u, v, _) in zip(f.values, g.edges())]
    for verts, edges, signs, amt in pieces:
        assert amt > 0
        assert len(verts) == len(edges) + 1


def test_lower_bounds_infeasible_gives_violated_side():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    low = [Fraction(1), Fraction(0)]
    res = feasible_flow_lower_bounds(g, low, 0, 2, exact_mode=True)
    assert not isinstance(res, Infeasible)
    g2 = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)])
    # edge 2->0 must carry 1 toward s while 0->1 carries 1 out: still fine
    assert not isinstance(feasible_flow_lower_bounds(g2, [1, 0, 1], 0, 2, exact_mode=True), Infeasible)
    # require 1 into the sink over an edge that cannot be fed
    g3 = Graph.from_edges(4, [(0, 1, 1), (2, 3, 1)])
    res = feasible_flow_lower_bounds(g3, [0, 1], 0, 3, exact_mode=True)
    assert isinstance(res, Infeasible)


def test_path_through_source_fairness():
    # a - s - t, unit edges: {s} is not 1.5-fair, {a, s} is
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    assert isinstance(verify_fair_cut(g, 1, 2, [1], 1.5, strict=True), Refuted)
    cert = verify_fair_cut(g, 1, 2, [0, 1], 1.5, strict=True)
    assert isinstance(cert, FairnessCertificate)
    assert not check_fair_witness(g, 1, 2, [0, 1], Fraction(3, 2), cert.witness.values)


def test_fair_witness_checker_catches_tampering():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    cert = verify_fair_cut(g, 1, 2, [0, 1], 1.5, strict=True)
    vals = list(cert.witness.values)
    vals[1] = Fraction(1, 3)
    assert check_fair_witness(g, 1, 2, [0, 1], Fraction(3, 2), vals)


@given(graphs(n_min=3), st.data())
def test_min_cut_source_side_is_exactly_fair(g, data):
    s, t = _pair(data.draw, g.n)
    _, _, cut = max_flow_exact(g, s, t, exact_mode=True)
    assert isinstance(verify_fair_cut(g, s, t, cut, 1, strict=True), FairnessCertificate)
    assert isinstance(verify_one_sided_fair(g, s, cut, 1, strict=True), FairnessCertificate)


@given(graphs(n_min=3), st.data())
def test_strict_and_float_verification_agree(g, data):
    s, t = _pair(data.draw, g.n)
    side = data.draw(st.sets(st.integers(0, g.n - 1), max_size=g.n - 2)) | {s}
    side.discard(t)
    alpha = data.draw(st.sampled_from([1.0, 1.1, 1.5, 2.0]))
    a = verify_fair_cut(g, s, t, side, alpha, strict=True)
    b = verify_fair_cut(g, s, t, side, alpha, strict=False)
    assert isinstance(a, Refuted) == isinstance(b, Refuted)


def test_verify_rejects_misplaced_terminals():
    g = Graph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    with pytest.raises(GraphError):
        verify_fair_cut(g, 1, 2, [2], 1.5)
    with pytest.raises(GraphError):
        verify_fair_cut(g, 1, 2, [1], 0.5)


@given(graphs(), st.data())
def test_route_demand_cut_condition(g, data):
    s, t = _pair(data.draw, g.n)
    lam = brute_min_cut(g, s, t)
    d = [0] * g.n
    d[s], d[t] = lam, -lam
    f, bad = route_demand(g, d, exact_mode=True)
    assert f is not None
    d[s], d[t] = lam + 1, -lam - 1
    f, bad = route_demand(g, d, exact_mode=True)
    assert f is None and s in bad and t not in bad


def test_exact_conversion():
    assert exact(3.0) == 3
    assert exact(0.1) == Fraction(1, 10)
