"""Flows, demands and the exact flow oracles used for construction and checking."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import Cut, Graph, GraphError, as_mask, boundary_capacity, make_cut
from .kernels import dinic, dinic_int

STRICT_EDGE_LIMIT = 200
FLOAT_SLACK = 1e-7


class FlowError(RuntimeError):
    """An oracle invariant failed (strong duality, conservation, ...)."""


def exact(x):
    """Exact rational for a float or number-like value (decimal repr for floats)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    x = float(x)
    if x.is_integer():
        return Fraction(int(x))
    return Fraction(repr(x))


class Flow:
    """Signed per-edge flow; positive values run ``eu[e] -> ev[e]``."""

    __slots__ = ("graph", "values")

    def __init__(self, graph, values=None):
        self.graph = graph
        if values is None:
            values = np.zeros(graph.m)
        self.values = values if isinstance(values, np.ndarray) else np.array(values, dtype=object)
        if len(self.values) != graph.m:
            raise GraphError("flow length does not match the edge count")

    @property
    def is_exact(self):
        return self.values.dtype == object

    def net_out(self):
        """Net flow leaving each vertex."""
        g = self.graph
        if self.is_exact:
            out = [Fraction(0)] * g.n
            for u, v, x in zip(g.eu.tolist(), g.ev.tolist(), self.values):
                out[u] += x
                out[v] -= x
            return np.array(out, dtype=object)
        return np.bincount(g.eu, weights=self.values, minlength=g.n) - np.bincount(
            g.ev, weights=self.values, minlength=g.n
        )

    def congestion(self):
        if self.graph.m == 0:
            return 0.0
        if self.is_exact:
            return max(abs(x) / exact(c) for x, c in zip(self.values, self.graph.cap))
        return float(np.max(np.abs(self.values) / self.graph.cap))

    def __add__(self, other):
        return Flow(self.graph, self.values + other.values)

    def __sub__(self, other):
        return Flow(self.graph, self.values - other.values)

    def scaled(self, k):
        return Flow(self.graph, self.values * k)


def net_flow(f, s):
    """Net flow leaving the vertex set ``s``."""
    mask = as_mask(f.graph, s)
    g = f.graph
    sign = mask[g.eu].astype(int) - mask[g.ev].astype(int)
    return sum(f.values[sign != 0] * sign[sign != 0]) if f.is_exact else float(f.values @ sign)


def excess(d, f):
    """Demand left over after ``f`` is applied: ``d(v) - f(v)``."""
    return np.asarray(d) - f.net_out()


@dataclass
class Infeasible:
    """Certificate that no flow meets the requested bounds."""

    side: frozenset
    shortfall: float


def _tolerance(g):
    return 1e-13 * max(1.0, float(g.cap.max()) if g.m else 1.0) * max(1, g.m)


def max_flow_exact(g, s, t, exact_mode=False):
    """Maximum (s,t)-flow value, the flow, and a minimum cut on the source side."""
    if s == t:
        raise GraphError("source and sink coincide")
    cap = [exact(c) for c in g.cap] if exact_mode else g.cap
    tol = 0 if exact_mode else _tolerance(g)
    value, flow, reach = dinic(g.n, g.eu, g.ev, cap, cap, s, t, tol, exact=exact_mode)
    reach = np.asarray(reach, dtype=bool)
    f = Flow(g, np.array(flow, dtype=object) if exact_mode else flow)
    side = frozenset(int(v) for v in np.flatnonzero(reach))
    cutv = boundary_capacity(g, reach)
    if exact_mode:
        if sum(exact(c) for c, x in zip(g.cap, reach[g.eu] != reach[g.ev]) if x) != value:
            raise FlowError("strong duality failed")
    elif abs(cutv - value) > 1e-9 * max(1.0, cutv):
        raise FlowError(f"strong duality failed: cut {cutv} vs flow {value}")
    return value, f, Cut(side, cutv)


def feasible_flow_lower_bounds(g, lower, s, t, exact_mode=False, cap=None):
    """Find an (s,t)-flow meeting per-edge directed lower bounds.

    ``lower[e] > 0`` forces at least that much along ``eu[e] -> ev[e]``;
    ``lower[e] < 0`` forces ``|lower[e]|`` the other way. ``cap`` overrides the
    graph capacities. Returns a ``Flow`` or an ``Infeasible`` naming a set whose
    forced inflow cannot get out.
    """
    cap = g.cap if cap is None else cap
    den = 1
    if exact_mode:
        # Work on integers scaled by the common denominator.
        cap = [exact(c) for c in cap]
        low = [exact(x) for x in lower]
        for x in cap + low:
            den = math.lcm(den, x.denominator)
        cap = [x.numerator * (den // x.denominator) for x in cap]
        low = [x.numerator * (den // x.denominator) for x in low]
        zero = 0
    else:
        cap = [float(c) for c in cap]
        low = [float(x) for x in lower]
        zero = 0.0
    n = g.n
    sigma, tau = n, n + 1
    eu, ev, cf, cb = [], [], [], []
    bal = [zero] * n
    for e, (u, v) in enumerate(zip(g.eu.tolist(), g.ev.tolist())):
        lo, c = low[e], cap[e]
        if abs(lo) > c:
            raise GraphError(f"lower bound exceeds capacity on edge {e}")
        eu.append(u)
        ev.append(v)
        if u == v:
            cf.append(zero)
            cb.append(zero)
        elif lo > 0:
            cf.append(c - lo)
            cb.append(zero)
            bal[v] += lo
            bal[u] -= lo
        elif lo < 0:
            cf.append(zero)
            cb.append(c + lo)
            bal[u] -= lo
            bal[v] += lo
        else:
            cf.append(c)
            cb.append(c)
    big = sum(cap) + sum(abs(x) for x in low) + 1
    eu.append(t)
    ev.append(s)
    cf.append(big)
    cb.append(zero)
    need = zero
    for v in range(n):
        if bal[v] > 0:
            eu.append(sigma)
            ev.append(v)
            cf.append(bal[v])
            cb.append(zero)
            need += bal[v]
        elif bal[v] < 0:
            eu.append(v)
            ev.append(tau)
            cf.append(-bal[v])
            cb.append(zero)
    if exact_mode:
        value, flow, reach = dinic_int(n + 2, eu, ev, cf, cb, sigma, tau)
        ok = value == need
    else:
        tol = 1e-13 * max(1.0, big)
        value, flow, reach = dinic(
            n + 2, np.array(eu), np.array(ev), np.array(cf), np.array(cb), sigma, tau, tol
        )
        ok = value >= need - 1e-9 * max(1.0, need)
    if not ok:
        side = frozenset(v for v in range(n) if reach[v])
        return Infeasible(side, Fraction(need - value, den) if exact_mode else need - value)
    vals = [low[e] + flow[e] if g.eu[e] != g.ev[e] else zero for e in range(g.m)]
    if exact_mode:
        return Flow(g, np.array([Fraction(x, den) for x in vals], dtype=object))
    return Flow(g, np.array(vals, dtype=float))


@dataclass
class FairnessCertificate:
    cut: Cut
    alpha: float
    witness: Flow
    s: int
    t: int | None = None

    @property
    def one_sided(self):
        return self.t is None


@dataclass
class Refuted:
    cut: Cut
    alpha: float
    violated: frozenset


def _strict_default(g, strict):
    return g.m <= STRICT_EDGE_LIMIT if strict is None else strict


def _as_cut(g, cut):
    return cut if isinstance(cut, Cut) else make_cut(g, cut)


def verify_fair_cut(g, s, t, cut, alpha, strict=None):
    """Decide whether ``cut`` is ``alpha``-fair for the pair ``(s, t)``."""
    cut = _as_cut(g, cut)
    if s not in cut.side or t in cut.side:
        raise GraphError("s must lie inside the cut side and t outside")
    if alpha < 1:
        raise GraphError("fairness parameter must be at least 1")
    strict = _strict_default(g, strict)
    mask = as_mask(g, cut.side)
    fwd = mask[g.eu] & ~mask[g.ev]
    bwd = mask[g.ev] & ~mask[g.eu]
    if strict:
        a = exact(alpha)
        lower = [
            exact(c) / a if f else (-exact(c) / a if b else Fraction(0))
            for c, f, b in zip(g.cap, fwd, bwd)
        ]
    else:
        lower = g.cap / alpha * (1 - FLOAT_SLACK) * (fwd.astype(float) - bwd.astype(float))
    res = feasible_flow_lower_bounds(g, lower, s, t, exact_mode=strict)
    if isinstance(res, Infeasible):
        return Refuted(cut, alpha, res.side)
    return FairnessCertificate(cut, alpha, res, s, t)


def verify_one_sided_fair(g, s, cut, alpha, strict=None):
    """Decide one-sided fairness: s routes c/alpha onto every boundary edge inside S."""
    cut = _as_cut(g, cut)
    if s not in cut.side:
        raise GraphError("s must lie inside the cut side")
    if alpha < 1:
        raise GraphError("fairness parameter must be at least 1")
    strict = _strict_default(g, strict)
    mask = as_mask(g, cut.side)
    verts = np.flatnonzero(mask)
    local = np.full(g.n, -1, dtype=np.int64)
    local[verts] = np.arange(len(verts))
    sink = len(verts)
    inside = np.flatnonzero(mask[g.eu] & mask[g.ev])
    cross = np.flatnonzero(mask[g.eu] != mask[g.ev])
    tail = np.where(mask[g.eu[cross]], g.eu[cross], g.ev[cross])
    aux = Graph(
        len(verts) + 1,
        np.concatenate([local[g.eu[inside]], local[tail]]),
        np.concatenate([local[g.ev[inside]], np.full(len(cross), sink)]),
        np.concatenate([g.cap[inside], g.cap[cross]]),
    )
    if strict:
        a = exact(alpha)
        lower = [Fraction(0)] * len(inside) + [exact(c) / a for c in g.cap[cross]]
    else:
        lower = np.concatenate([np.zeros(len(inside)), g.cap[cross] / alpha * (1 - FLOAT_SLACK)])
    res = feasible_flow_lower_bounds(aux, lower, int(local[s]), sink, exact_mode=strict)
    if isinstance(res, Infeasible):
        return Refuted(cut, alpha, frozenset(int(verts[v]) for v in res.side if v < len(verts)))
    vals = np.array([Fraction(0)] * g.m, dtype=object) if strict else np.zeros(g.m)
    k = len(inside)
    vals[inside] = res.values[:k]
    sign = np.where(mask[g.eu[cross]], 1, -1)
    vals[cross] = res.values[k:] * sign
    return FairnessCertificate(cut, alpha, Flow(g, vals), s, None)


def check_fair_witness(g, s, t, cut_side, alpha, values, slack=0):
    """Check a claimed fairness witness directly, exactly. Returns a list of problems.

    ``slack`` relaxes every bound by that relative amount (0 means exact).
    """
    problems = []
    a = exact(alpha)
    sl = exact(slack)
    vals = [exact(x) for x in values]
    if len(vals) != g.m:
        return ["witness length does not match the edge count"]
    mask = as_mask(g, cut_side)
    net = [Fraction(0)] * g.n
    for e, (u, v, c) in enumerate(g.edges()):
        x, c = vals[e], exact(c)
        if abs(x) > c * (1 + sl):
            problems.append(f"edge {e} over capacity")
        net[u] += x
        net[v] -= x
        need = c / a * (1 - sl)
        if mask[u] and not mask[v] and x < need:
            problems.append(f"edge {e} carries less than c/alpha across the cut")
        if mask[v] and not mask[u] and -x < need:
            problems.append(f"edge {e} carries less than c/alpha across the cut")
    scale = sl * sum(exact(c) for c in g.cap)
    for v in range(g.n):
        if v not in (s, t) and abs(net[v]) > scale:
            problems.append(f"conservation fails at vertex {v}")
    return problems


def path_decompose(f):
    """Split ``f`` into paths and cycles whose superposition is ``f``.

    Each item is ``(vertices, edges, signs, amount)``: a walk listed by vertex,
    the edge ids it uses, and whether each edge is traversed along (+1) or
    against (-1) its storage orientation. Cycles repeat their first vertex.
    """
    g = f.graph
    ex = f.is_exact
    zero = Fraction(0) if ex else 0.0
    tol = zero if ex else 1e-12 * max(1.0, float(np.max(np.abs(f.values))) if g.m else 1.0)
    rem, tail = {}, {}
    out = [dict() for _ in range(g.n)]
    for e, (u, v) in enumerate(zip(g.eu.tolist(), g.ev.tolist())):
        x = f.values[e]
        if u == v or abs(x) <= tol:
            continue
        a, b, sg = (u, v, 1) if x > 0 else (v, u, -1)
        rem[e] = abs(x)
        tail[e] = a
        out[a][e] = (b, sg)
    net = list(f.net_out())
    pieces = []

    def take(e, amt):
        rem[e] -= amt
        if rem[e] <= tol:
            del out[tail[e]][e]
            del rem[e]

    def walk(start, stop_at_sink):
        verts, edges, signs = [start], [], []
        pos = {start: 0}
        x = start
        while True:
            if stop_at_sink and len(edges) and (net[x] < -tol or not out[x]):
                return verts, edges, signs, False
            e, (y, sg) = next(iter(out[x].items()))
            verts.append(y)
            edges.append(e)
            signs.append(sg)
            if y in pos:
                i = pos[y]
                return verts[i:], edges[i:], signs[i:], True
            pos[y] = len(verts) - 1
            x = y

    for start in range(g.n):
        while net[start] > tol:
            verts, edges, signs, cyc = walk(start, True)
            amt = min(rem[e] for e in edges)
            if not cyc:
                amt = min(amt, net[start], -net[verts[-1]])
                net[start] -= amt
                net[verts[-1]] += amt
            for e in edges:
                take(e, amt)
            pieces.append((verts, edges, signs, amt))
    for start in range(g.n):
        while out[start]:
            verts, edges, signs, _ = walk(start, False)
            amt = min(rem[e] for e in edges)
            for e in edges:
                take(e, amt)
            pieces.append((verts, edges, signs, amt))
    return pieces


def compose(g, pieces, exact_mode=False):
    vals = np.array([Fraction(0)] * g.m, dtype=object) if exact_mode else np.zeros(g.m)
    for _, edges, signs, amt in pieces:
        for e, sg in zip(edges, signs):
            vals[e] += sg * amt
    return Flow(g, vals)


def remove_paths_through(f, forbidden, rule="endpoints"):
    """Drop decomposition paths that start or end in ``forbidden``.

    With ``rule="any"`` paths touching ``forbidden`` anywhere are dropped.
    Cycles are always kept under the endpoint rule.
    """
    bad = set(int(v) for v in forbidden)
    keep = []
    for piece in path_decompose(f):
        verts = piece[0]
        is_cycle = verts[0] == verts[-1] and len(verts) > 1
        if rule == "endpoints":
            drop = not is_cycle and (verts[0] in bad or verts[-1] in bad)
        elif rule == "any":
            drop = any(v in bad for v in verts)
        else:
            raise ValueError(f"unknown rule {rule!r}")
        if not drop:
            keep.append(piece)
    return compose(f.graph, keep, f.is_exact)


def route_demand(g, demand, scale=1.0, exact_mode=False):
    """Route ``demand`` (net outflow per vertex) with capacities ``scale * c``.

    Returns ``(Flow, None)`` on success or ``(None, violated_side)``.
    """
    n = g.n
    d = [exact(x) for x in demand] if exact_mode else np.asarray(demand, dtype=float)
    sc = exact(scale) if exact_mode else float(scale)
    caps = [exact(c) * sc for c in g.cap] if exact_mode else g.cap * sc
    sigma, tau = n, n + 1
    src = [v for v in range(n) if d[v] > 0]
    dst = [v for v in range(n) if d[v] < 0]
    eu = list(g.eu.tolist()) + [sigma] * len(src) + dst
    ev = list(g.ev.tolist()) + src + [tau] * len(dst)
    extra = [d[v] for v in src] + [-d[v] for v in dst]
    if exact_mode:
        cf = list(caps) + extra
        cb = list(caps) + [Fraction(0)] * len(extra)
        value, flow, reach = dinic(n + 2, eu, ev, cf, cb, sigma, tau, exact=True)
        need = sum(d[v] for v in src)
        ok = value == need
    else:
        cf = np.concatenate([caps, np.array(extra, dtype=float)])
        cb = np.concatenate([caps, np.zeros(len(extra))])
        need = float(sum(d[v] for v in src))
        tol = 1e-13 * max(1.0, float(cf.max()) if len(cf) else 1.0)
        value, flow, reach = dinic(n + 2, np.array(eu), np.array(ev), cf, cb, sigma, tau, tol)
        ok = value >= need - 1e-10 * max(1.0, need)
    if not ok:
        return None, frozenset(v for v in range(n) if reach[v])
    vals = flow[: g.m]
    vals = np.array(list(vals), dtype=object) if exact_mode else np.asarray(vals, dtype=float)
    return Flow(g, vals), None


def min_congestion_routing(g, demand, max_iter=200):
    """Flow satisfying ``demand`` with the smallest possible congestion.

    Uses a parametric search on the scale of the capacities: every failed
    routing exposes a set whose demand-to-cut ratio is a better lower bound.
    """
    d = np.asarray(demand, dtype=float)
    deg = g.degrees()
    nz = np.abs(d) > 0
    if not nz.any():
        return Flow(g), 0.0
    if np.any(deg[nz] == 0):
        raise FlowError("demand on an isolated vertex cannot be routed")
    lam = float(np.max(np.abs(d[nz]) / deg[nz]))
    for _ in range(max_iter):
        f, side = route_demand(g, d, lam)
        if f is not None:
            return f, lam
        mask = as_mask(g, side)
        cutv = boundary_capacity(g, mask)
        need = float(d[mask].sum())
        if cutv <= 0:
            raise FlowError("demand is not balanced on a component")
        lam = max(lam * (1 + 1e-12), need / cutv * (1 + 1e-12))
    raise FlowError("congestion search did not converge")
