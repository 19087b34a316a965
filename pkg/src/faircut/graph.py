"""Weighted undirected multigraphs with cut, volume and subgraph helpers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GraphError(ValueError):
    """Invalid graph input or a vertex set outside an operation's domain."""


class Graph:
    """Immutable undirected multigraph on vertices ``0..n-1``.

    Edges are stored as parallel arrays ``eu``, ``ev``, ``cap``; the storage
    order fixes the orientation used by flows. ``origin`` optionally records,
    per edge, the id of the edge it was derived from in some parent graph.
    """

    __slots__ = ("n", "eu", "ev", "cap", "origin", "_deg", "_csr")

    def __init__(self, n, eu, ev, cap, origin=None, max_ratio=None, check_ratio=False):
        eu = np.asarray(eu, dtype=np.int64).reshape(-1)
        ev = np.asarray(ev, dtype=np.int64).reshape(-1)
        cap = np.asarray(cap, dtype=np.float64).reshape(-1)
        if not (len(eu) == len(ev) == len(cap)):
            raise GraphError("edge arrays differ in length")
        if n < 0:
            raise GraphError("negative vertex count")
        if len(eu) and (eu.min() < 0 or ev.min() < 0 or max(eu.max(), ev.max()) >= n):
            raise GraphError("edge endpoint out of range")
        if len(cap) and not np.all(cap > 0):
            raise GraphError("capacities must be positive")
        if len(cap) and not np.all(np.isfinite(cap)):
            raise GraphError("capacities must be finite")
        if check_ratio and len(cap):
            bound = float(n) ** 6 if max_ratio is None else max_ratio
            if cap.max() / cap.min() > bound:
                raise GraphError(f"capacity ratio {cap.max() / cap.min():.3g} exceeds {bound:.3g}")
        self.n = int(n)
        self.eu, self.ev, self.cap = eu, ev, cap
        for arr in (eu, ev, cap):
            arr.setflags(write=False)
        self.origin = None if origin is None else np.asarray(origin, dtype=np.int64)
        self._deg = None
        self._csr = None

    @classmethod
    def from_edges(cls, n, edges, **kw):
        edges = list(edges)
        if not edges:
            return cls(n, [], [], [], **kw)
        u, v, c = zip(*edges)
        return cls(n, u, v, c, **kw)

    @property
    def m(self):
        return len(self.eu)

    def edges(self):
        return zip(self.eu.tolist(), self.ev.tolist(), self.cap.tolist())

    def degrees(self):
        """Weighted degrees; a self-loop adds its capacity twice."""
        if self._deg is None:
            d = np.bincount(self.eu, weights=self.cap, minlength=self.n)
            d += np.bincount(self.ev, weights=self.cap, minlength=self.n)
            d.setflags(write=False)
            self._deg = d
        return self._deg

    def csr(self):
        """Incidence lists as ``(indptr, edge_ids, neighbours)``."""
        if self._csr is None:
            ends = np.concatenate([self.eu, self.ev])
            other = np.concatenate([self.ev, self.eu])
            ids = np.concatenate([np.arange(self.m), np.arange(self.m)])
            order = np.argsort(ends, kind="stable")
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.add.at(indptr, ends + 1, 1)
            self._csr = (np.cumsum(indptr), ids[order], other[order])
        return self._csr

    def total_capacity(self):
        return float(self.cap.sum())

    def min_capacity(self):
        return float(self.cap.min()) if self.m else 0.0

    def components(self):
        """Component label per vertex."""
        parent = np.arange(self.n)

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in zip(self.eu.tolist(), self.ev.tolist()):
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        roots = np.array([find(x) for x in range(self.n)], dtype=np.int64)
        _, labels = np.unique(roots, return_inverse=True)
        return labels

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Cut:
    side: frozenset
    value: float

    def __contains__(self, v):
        return v in self.side


def as_mask(g, s):
    """Boolean membership mask for a vertex collection (or pass a mask through)."""
    if isinstance(s, np.ndarray) and s.dtype == bool:
        if s.shape != (g.n,):
            raise GraphError("mask has the wrong shape")
        return s
    mask = np.zeros(g.n, dtype=bool)
    idx = np.fromiter((int(v) for v in s), dtype=np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= g.n):
        raise GraphError("vertex out of range")
    mask[idx] = True
    return mask


def _crossing(g, mask):
    return mask[g.eu] != mask[g.ev]


def cut_value(g, s):
    """Total capacity of edges with exactly one endpoint in ``s``."""
    mask = as_mask(g, s)
    k = int(mask.sum())
    if k == 0 or k == g.n:
        raise GraphError("cut side must be a nonempty proper subset")
    return float(g.cap[_crossing(g, mask)].sum())


def boundary_capacity(g, s):
    """Like ``cut_value`` but defined (as 0) for the empty and full set."""
    mask = as_mask(g, s)
    return float(g.cap[_crossing(g, mask)].sum())


def cut_between(g, a, b):
    """Capacity of edges joining the disjoint sets ``a`` and ``b``."""
    ma, mb = as_mask(g, a), as_mask(g, b)
    sel = (ma[g.eu] & mb[g.ev]) | (mb[g.eu] & ma[g.ev])
    return float(g.cap[sel].sum())


def volume(g, s):
    mask = as_mask(g, s)
    return float(g.degrees()[mask].sum())


def make_cut(g, s):
    side = frozenset(int(v) for v in np.flatnonzero(as_mask(g, s)))
    return Cut(side, cut_value(g, side))


@dataclass
class BoundaryGraph:
    """Induced subgraph on ``interior`` with one pendant vertex per boundary edge.

    Interior vertex ``interior[i]`` becomes local vertex ``i``; the pendant for
    boundary edge ``boundary_map[j]`` is local vertex ``len(interior) + j``.
    ``graph.origin`` gives the base-graph edge behind every local edge.
    """

    base: Graph
    interior: np.ndarray
    graph: Graph
    boundary_map: np.ndarray
    local: np.ndarray = field(repr=False)

    @property
    def k(self):
        return len(self.interior)

    def pendant_of(self, j):
        return self.k + j


def boundary_graph(g, u):
    mask = as_mask(g, u)
    if not mask.any():
        raise GraphError("boundary graph needs a nonempty interior")
    interior = np.flatnonzero(mask)
    local = np.full(g.n, -1, dtype=np.int64)
    local[interior] = np.arange(len(interior))
    inside = mask[g.eu] & mask[g.ev]
    cross = mask[g.eu] != mask[g.ev]
    in_ids = np.flatnonzero(inside)
    bd_ids = np.flatnonzero(cross)
    k = len(interior)
    pend = k + np.arange(len(bd_ids))
    bu = np.where(mask[g.eu[bd_ids]], g.eu[bd_ids], g.ev[bd_ids])
    eu = np.concatenate([local[g.eu[in_ids]], pend])
    ev = np.concatenate([local[g.ev[in_ids]], local[bu]])
    cap = np.concatenate([g.cap[in_ids], g.cap[bd_ids]])
    origin = np.concatenate([in_ids, bd_ids])
    h = Graph(k + len(bd_ids), eu, ev, cap, origin=origin)
    return BoundaryGraph(g, interior, h, bd_ids, local)


@dataclass
class SelfLoopSubgraph:
    """Induced subgraph on ``vertices`` where each vertex keeps its full degree.

    Capacity leaving the set is folded into one self-loop per vertex of half
    that weight (self-loops count twice toward degree).
    """

    base: Graph
    vertices: np.ndarray
    graph: Graph


def self_loop_subgraph(g, s):
    mask = as_mask(g, s)
    verts = np.flatnonzero(mask)
    local = np.full(g.n, -1, dtype=np.int64)
    local[verts] = np.arange(len(verts))
    inside = mask[g.eu] & mask[g.ev]
    ids = np.flatnonzero(inside)
    lost = g.degrees()[verts] - np.bincount(
        np.concatenate([local[g.eu[ids]], local[g.ev[ids]]]),
        weights=np.concatenate([g.cap[ids], g.cap[ids]]),
        minlength=len(verts),
    )
    loops = np.flatnonzero(lost > 1e-12 * max(1.0, g.total_capacity()))
    eu = np.concatenate([local[g.eu[ids]], loops])
    ev = np.concatenate([local[g.ev[ids]], loops])
    cap = np.concatenate([g.cap[ids], lost[loops] / 2.0])
    origin = np.concatenate([ids, np.full(len(loops), -1)])
    return SelfLoopSubgraph(g, verts, Graph(len(verts), eu, ev, cap, origin=origin))


def contract(g, parts, keep_loops=False):
    """Merge each vertex set in ``parts`` into a single vertex.

    Uncontracted vertices come first in their original order, followed by one
    vertex per part. Parallel edges are kept. Returns ``(graph, vmap)``; the
    new graph's ``origin`` holds the surviving edge ids.
    """
    vmap = np.full(g.n, -1, dtype=np.int64)
    owner = np.full(g.n, -1, dtype=np.int64)
    for i, p in enumerate(parts):
        pm = as_mask(g, p)
        if np.any(owner[pm] >= 0):
            raise GraphError("contraction parts overlap")
        owner[pm] = i
    free = np.flatnonzero(owner < 0)
    vmap[free] = np.arange(len(free))
    hit = owner >= 0
    vmap[hit] = len(free) + owner[hit]
    nu, nv = vmap[g.eu], vmap[g.ev]
    internal = (owner[g.eu] >= 0) & (owner[g.eu] == owner[g.ev])
    keep = np.ones(g.m, dtype=bool) if keep_loops else ~internal
    ids = np.flatnonzero(keep)
    h = Graph(len(free) + len(parts), nu[ids], nv[ids], g.cap[ids], origin=ids)
    return h, vmap


def induced_subgraph(g, s):
    """Plain induced subgraph; returns ``(graph, vertices)``."""
    mask = as_mask(g, s)
    verts = np.flatnonzero(mask)
    local = np.full(g.n, -1, dtype=np.int64)
    local[verts] = np.arange(len(verts))
    ids = np.flatnonzero(mask[g.eu] & mask[g.ev])
    return Graph(len(verts), local[g.eu[ids]], local[g.ev[ids]], g.cap[ids], origin=ids), verts
