"""Brute-force references. None of these call into the package's flow code."""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np
from hypothesis import strategies as st

from faircut.graph import Graph


def random_graph(rng, n_lo=4, n_hi=16, cap_hi=8, extra=None, connected=True):
    """Random weighted multigraph; a random spanning tree keeps it connected."""
    n = int(rng.integers(n_lo, n_hi + 1))
    edges = []
    if connected:
        edges = [(i, int(rng.integers(0, i)), int(rng.integers(1, cap_hi + 1))) for i in range(1, n)]
    k = int(rng.integers(0, 2 * n)) if extra is None else extra
    for _ in range(k):
        u, v = rng.choice(n, 2, replace=False)
        edges.append((int(u), int(v), int(rng.integers(1, cap_hi + 1))))
    if not edges:
        edges = [(0, 1, 1)]
    return Graph.from_edges(n, edges)


@st.composite
def graphs(draw, n_min=2, n_max=9, cap_max=8, connected=True):
    n = draw(st.integers(n_min, n_max))
    edges = []
    if connected:
        for i in range(1, n):
            edges.append((i, draw(st.integers(0, i - 1)), draw(st.integers(1, cap_max))))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1, cap_max))
    edges += draw(st.lists(pairs, max_size=2 * n))
    if not edges:
        edges = [(0, n - 1, 1)]
    return Graph.from_edges(n, edges)


def nx_graph(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    for u, v, c in g.edges():
        if u == v:
            continue
        if h.has_edge(u, v):
            h[u][v]["capacity"] += c
        else:
            h.add_edge(u, v, capacity=c)
    return h


def cut_of(g, side):
    side = set(side)
    return sum(c for u, v, c in g.edges() if (u in side) != (v in side))


def all_sides(n):
    """Every nonempty proper subset, one per complementary pair (vertex 0 inside)."""
    for bits in range((1 << (n - 1)) - 1):
        yield frozenset([0] + [i + 1 for i in range(n - 1) if bits >> i & 1])


def brute_min_cut(g, s, t):
    best = None
    for side in all_sides(g.n):
        if (s in side) == (t in side):
            continue
        val = cut_of(g, side)
        if best is None or val < best:
            best = val
    return best


def nx_min_cut(g, s, t):
    return nx.minimum_cut_value(nx_graph(g), s, t)


def all_pairs_lambda(g):
    h = nx_graph(g)
    return {(a, b): nx.minimum_cut_value(h, a, b) for a, b in itertools.combinations(range(g.n), 2)}


def min_isolating_value(g, x, terminals):
    """Exact minimum cut separating x from every other terminal."""
    h = nx_graph(g)
    others = [y for y in terminals if y != x]
    sink = "sink"
    h.add_node(sink)
    for y in others:
        h.add_edge(y, sink, capacity=float("inf"))
    return nx.minimum_cut_value(h, x, sink)


def brute_steiner(g, terminals):
    terms = set(terminals)
    best = None
    for side in all_sides(g.n):
        k = len(side & terms)
        if 0 < k < len(terms):
            val = cut_of(g, side)
            if best is None or val < best:
                best = val
    return best


def min_cut_side_avoiding(g, u, v, t):
    """lambda(u,v) and the side of one minimum (u,v)-cut that does not contain t."""
    lam, (a, b) = nx.minimum_cut(nx_graph(g), u, v)
    side = frozenset(b) if t in a else frozenset(a)
    return lam, side


def naive_conductance(g, side):
    side = set(side)
    deg = np.zeros(g.n)
    for u, v, c in g.edges():
        deg[u] += c
        deg[v] += c
    vs = sum(deg[list(side)])
    vr = deg.sum() - vs
    return cut_of(g, side) / min(vs, vr)


def min_conductance(g):
    return min(naive_conductance(g, s) for s in all_sides(g.n))


def part_conductance(g, part):
    """Conductance of ``part`` as a standalone graph where every vertex keeps its full degree."""
    part = sorted(part)
    deg = np.zeros(g.n)
    for u, v, c in g.edges():
        deg[u] += c
        deg[v] += c
    best = np.inf
    k = len(part)
    for bits in range(1, (1 << k) - 1):
        s = {part[i] for i in range(k) if bits >> i & 1}
        r = set(part) - s
        w = sum(c for u, v, c in g.edges() if (u in s and v in r) or (u in r and v in s))
        den = min(deg[list(s)].sum(), deg[list(r)].sum())
        if den > 0:
            best = min(best, w / den)
    return best
