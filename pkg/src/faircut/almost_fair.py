"""Pruning a vertex set until its boundary can be routed to a sink.

Given ``U`` containing ``t``, the routine splits ``U`` into a pruned part ``P``
and a kept part ``U'`` such that the cut shrinks by at least ``beta`` times the
pruned part's outer boundary, and a ``(1 - beta)`` fraction of every old
boundary edge of ``U'`` can be routed to ``t`` inside ``U'`` with congestion
``1 + eps`` (new boundary edges may carry anything up to capacity).

Two engines are available. The multiplicative-weights engine follows a laminar
cut family for ``T`` rounds. The exact engine answers the same question with a
single max-flow and has zero slack; it is used automatically when ``T`` would
be impractically large.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import congestion
from .config import DEFAULT, TRACE, child_rng, get_logger, make_rng
from .flows import Flow, exact, feasible_flow_lower_bounds, min_congestion_routing
from .graph import Graph, as_mask, boundary_graph, cut_between, boundary_capacity
from .kernels import dinic, sweep_profile

log = get_logger(__name__)


class AlmostFairError(RuntimeError):
    """Internal contract failure (for instance a family of insufficient quality)."""


@dataclass
class AlmostFairResult:
    pruned: frozenset
    kept: frozenset
    witness_demand: np.ndarray | None = None
    witness_flow: Flow | None = None
    kept_graph: object = None
    engine: str = "exact"
    rounds: int = 0
    alpha: float = 0.0
    max_rbar: float = 0.0
    trace: list = field(default_factory=list)


def _interior_values(g, umask):
    """Edge selectors for G restricted to U: internal edges and boundary edges."""
    inside = umask[g.eu] & umask[g.ev] & (g.eu != g.ev)
    cross = umask[g.eu] != umask[g.ev]
    return inside, cross


def exact_prune(g, u, t, beta, witness=False):
    """Zero-slack pruning by one max-flow from the boundary to ``t``.

    The pruned set is the interior part of the minimal source side of a minimum
    cut in ``G[U]`` plus a super-source feeding ``(1 - beta) c(e)`` into every
    boundary edge.
    """
    umask = as_mask(g, u)
    if not umask[t]:
        raise ValueError("t must belong to u")
    verts = np.flatnonzero(umask)
    local = np.full(g.n, -1, dtype=np.int64)
    local[verts] = np.arange(len(verts))
    k = len(verts)
    inside, cross = _interior_values(g, umask)
    in_ids = np.flatnonzero(inside)
    bd_ids = np.flatnonzero(cross)
    keep = max(0.0, 1.0 - beta)
    if keep <= 0 or len(bd_ids) == 0:
        res = AlmostFairResult(frozenset(), frozenset(int(v) for v in verts))
        if witness:
            gvals = np.zeros(g.m)
            gvals[bd_ids] = keep * g.cap[bd_ids]
            _attach_witness(g, umask, np.zeros(g.n, dtype=bool), gvals, beta, res)
        return res
    inner = np.where(umask[g.eu[bd_ids]], g.eu[bd_ids], g.ev[bd_ids])
    eu = np.concatenate([local[g.eu[in_ids]], np.full(len(bd_ids), k)])
    ev = np.concatenate([local[g.ev[in_ids]], local[inner]])
    cf = np.concatenate([g.cap[in_ids], keep * g.cap[bd_ids]])
    cb = np.concatenate([g.cap[in_ids], np.zeros(len(bd_ids))])
    tol = 1e-13 * max(1.0, float(g.cap.max())) * max(1, g.m)
    _, flow, reach = dinic(k + 1, eu, ev, cf, cb, k, int(local[t]), tol)
    pmask = np.zeros(g.n, dtype=bool)
    pmask[verts[reach[:k]]] = True
    res = AlmostFairResult(
        frozenset(int(v) for v in np.flatnonzero(pmask)),
        frozenset(int(v) for v in np.flatnonzero(umask & ~pmask)),
    )
    if witness:
        gvals = np.zeros(g.m)
        gvals[in_ids] = flow[: len(in_ids)]
        gvals[bd_ids] = flow[len(in_ids):]
        _attach_witness(g, umask, pmask, gvals, beta, res)
    return res


def _attach_witness(g, umask, pmask, gvals, beta, res, eps=0.0):
    """Restrict a flow on G{U} to G{U'} and read off the boundary demand.

    ``gvals`` holds, per base edge touching ``U``, the flow along the stored
    orientation for internal edges and the flow toward the interior endpoint
    for boundary edges.
    """
    kmask = umask & ~pmask
    bg = boundary_graph(g, kmask)
    h = bg.graph
    vals = np.zeros(h.m)
    n_in = h.m - len(bg.boundary_map)
    vals[:n_in] = gvals[h.origin[:n_in]]
    for j, e in enumerate(bg.boundary_map):
        e = int(e)
        inner = int(g.eu[e]) if kmask[g.eu[e]] else int(g.ev[e])
        other = int(g.ev[e]) if inner == g.eu[e] else int(g.eu[e])
        if umask[other]:
            vals[n_in + j] = gvals[e] if g.ev[e] == inner else -gvals[e]
        else:
            vals[n_in + j] = gvals[e]
    res.kept_graph = bg
    res.witness_flow = Flow(h, vals)
    res.witness_demand = res.witness_flow.net_out()


def _boundary_demand(h, k, keep):
    """Demand on the boundary graph: each pendant sends ``keep`` times its degree."""
    d = np.zeros(h.n)
    d[k:] = keep * h.degrees()[k:]
    return d


def _restricted(base, alive, tloc):
    d = np.where(alive, base, 0.0)
    d[tloc] = 0.0
    d[tloc] = -d.sum()
    return d


def _drop_orphans(d_new, deleted, pend_nbr, k):
    """Keep a deleted pendant only if its interior neighbour is deleted too."""
    out = d_new.copy()
    idx = np.flatnonzero(out[k:]) + k
    if len(idx):
        nb = pend_nbr[idx - k]
        orphan = ~(out[nb] | deleted[nb])
        out[idx[orphan]] = False
    return out


def init_active_set(h, d, fam, k, pend_nbr):
    """Delete every family set whose demand exceeds its cut, one pass."""
    alive = np.ones(h.n, dtype=bool)
    deleted = np.zeros(h.n, dtype=bool)
    for s, cut in zip(fam.sets, fam.cut):
        dem = d[s][alive[s]].sum()
        if dem > cut + 1e-12 * max(1.0, cut):
            rm = np.zeros(h.n, dtype=bool)
            rm[s] = True
            rm &= alive
            rm = _drop_orphans(rm, deleted, pend_nbr, k)
            alive &= ~rm
            deleted |= rm
    return alive, deleted


def potential_flow(h, phi):
    diff = phi[h.eu] - phi[h.ev]
    return Flow(h, np.sign(diff) * h.cap)


def deletion_set(h, phi, d_prev, f_net, tloc):
    """Threshold set ``{v : phi_v > x*}`` from the zero-crossing sweep, or empty.

    Returns ``(mask, x_star)``; the mask is all-false when the potential-weighted
    demand does not exceed the potential-weighted flow.
    """
    lhs = float(phi @ d_prev)
    rhs = float(phi @ f_net)
    none = np.zeros(h.n, dtype=bool)
    if lhs <= rhs:
        return none, None
    vals, prof = sweep_profile(phi, h.eu, h.ev, h.cap, d_prev)
    widths = np.diff(vals)
    integral = np.concatenate([[0.0], np.cumsum(prof[:-1] * widths)])
    nonpos = np.flatnonzero(integral <= 0)
    j = int(nonpos[-1])
    if j >= len(vals) - 1:
        return none, None
    slope = prof[j]
    x_star = vals[j] + (-integral[j]) / slope if slope > 0 else vals[j]
    mask = phi > vals[j]
    return mask, x_star


@dataclass
class MWUState:
    h: Graph
    k: int
    tloc: int
    fam: congestion.LaminarFamily
    member: np.ndarray
    alpha: float
    rounds: int
    base: np.ndarray
    pend_nbr: np.ndarray
    alive: np.ndarray
    deleted: np.ndarray
    excess_log: np.ndarray
    flow_sum: np.ndarray
    demand_sum: np.ndarray
    i: int = 0
    trace: list = field(default_factory=list)
    record: bool = False


def mwu_round(st):
    h = st.h
    a = st.alpha * st.excess_log
    top = float(np.max(np.abs(a))) if len(a) else 0.0
    coef = (np.exp(a - top) - np.exp(-a - top)) / st.fam.cut
    phi = st.member @ coef
    phi[st.tloc] = 0.0
    f = potential_flow(h, phi)
    f_net = f.net_out()
    d_prev = _restricted(st.base, st.alive, st.tloc)
    mask, x_star = deletion_set(h, phi, d_prev, f_net, st.tloc)
    tol = 1e-9 * max(1.0, float(np.abs(st.base).sum()))
    if mask.any():
        if x_star is None or x_star < -tol or mask[st.tloc]:
            raise AlmostFairError("sweep threshold violates its sign guarantee")
        dsum = float(d_prev[mask].sum())
        dcut = boundary_capacity(h, mask)
        if not dsum > dcut - tol:
            raise AlmostFairError("deletion set does not carry excess demand")
        rm = _drop_orphans(mask & st.alive, st.deleted, st.pend_nbr, st.k)
        st.alive &= ~rm
        st.deleted |= rm
    d_now = _restricted(st.base, st.alive, st.tloc)
    inner = float(phi @ d_now) - float(phi @ f_net)
    scale = max(1.0, float(np.abs(phi).sum()) * float(np.abs(st.base).sum()))
    if inner > 1e-9 * scale:
        raise AlmostFairError(f"potential inequality fails after deletion ({inner:.3g})")
    r = (st.member.T @ (d_now - f_net)) / st.fam.cut
    if np.any(np.abs(r) > 2 + 1e-9):
        raise AlmostFairError("relative excess outside [-2, 2]")
    st.excess_log += r
    st.flow_sum += f.values
    st.demand_sum += d_now
    st.i += 1
    if st.record:
        item = {"round": st.i, "gain_dot_w": inner, "deleted": int(mask.sum()), "max_r": float(np.max(np.abs(r)))}
        st.trace.append(item)
        log.log(TRACE, json.dumps(item))
    return st


def mwu_rounds(alpha, n_h, constants=DEFAULT):
    return math.ceil(constants.c_T * math.log(max(n_h, 2)) / alpha**2)


def almost_fair(g, u, t, eps, beta, fam=None, seed=0, constants=DEFAULT, engine="auto",
                witness=True, record=False):
    """Prune ``u`` so its remaining boundary can be routed to ``t``.

    ``fam`` is a laminar family over the boundary graph of ``u`` that avoids the
    local copy of ``t``; one is built when omitted. ``engine`` is ``"mwu"``,
    ``"exact"`` or ``"auto"``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    umask = as_mask(g, u)
    if not umask[t]:
        raise ValueError("t must belong to u")
    if engine == "exact":
        return exact_prune(g, umask, t, beta, witness=witness)
    rng = make_rng(seed)
    bg = boundary_graph(g, umask)
    h = bg.graph
    k = bg.k
    tloc = int(bg.local[t])
    keep = max(0.0, 1.0 - beta)
    if len(bg.boundary_map) == 0 or keep == 0:
        return exact_prune(g, umask, t, beta, witness=witness)
    if fam is None:
        fam = congestion.build(h, child_rng(rng), constants, measure=False)
        fam = congestion.exclude_sink(fam, tloc, h, constants, measure=h.n <= constants.quality_limit)
    good = fam.cut > 0
    gamma = fam.quality
    alpha = eps / gamma if math.isfinite(gamma) and gamma > 0 else 0.0
    rounds = mwu_rounds(alpha, h.n, constants) if alpha > 0 else math.inf
    if engine == "auto" and rounds > constants.mwu_max_rounds:
        log.info("mwu would need %s rounds; using the exact engine", rounds)
        return exact_prune(g, umask, t, beta, witness=witness)
    if not math.isfinite(rounds):
        raise AlmostFairError("family quality is unbounded; cannot run the weights engine")

    base = _boundary_demand(h, k, keep)
    base[tloc] = -base.sum()
    pend_nbr = h.ev[h.m - len(bg.boundary_map):]
    alive, deleted = init_active_set(h, base, fam, k, pend_nbr)
    if not good.all():
        log.warning("dropping %d family sets with empty cut", int((~good).sum()))
    kept_sets = [s for s, ok in zip(fam.sets, good) if ok]
    sub = congestion.LaminarFamily(fam.n, kept_sets, congestion.forest(kept_sets), fam.cut[good],
                                   fam.quality, fam.audited)
    st = MWUState(
        h, k, tloc, sub, sub.membership(), alpha, rounds, base, pend_nbr, alive, deleted,
        np.zeros(len(sub)), np.zeros(h.m), np.zeros(h.n), record=record,
    )
    if len(sub) == 0:
        st.rounds = 0
    while st.i < st.rounds:
        mwu_round(st)
    rbar = st.excess_log / max(st.rounds, 1)
    pmask = np.zeros(g.n, dtype=bool)
    pmask[bg.interior[st.deleted[:k]]] = True
    res = AlmostFairResult(
        frozenset(int(v) for v in np.flatnonzero(pmask)),
        frozenset(int(v) for v in np.flatnonzero(umask & ~pmask)),
        engine="mwu", rounds=st.rounds, alpha=alpha,
        max_rbar=float(np.max(np.abs(rbar))) if len(rbar) else 0.0, trace=st.trace,
    )
    if witness:
        extract_witness(st, g, bg, umask, pmask, beta, eps, res)
    return res


def extract_witness(st, g, bg, umask, pmask, beta, eps, res):
    """Average the round flows, patch the residual demand, restrict to G{U'}."""
    h = st.h
    if st.rounds:
        fbar = Flow(h, st.flow_sum / st.rounds)
        dbar = st.demand_sum / st.rounds
    else:
        fbar = Flow(h)
        dbar = _restricted(st.base, st.alive, st.tloc)
    resid = dbar - fbar.net_out()
    aug, lam = min_congestion_routing(h, resid)
    if lam > eps * (1 + 1e-9) + 1e-12:
        raise AlmostFairError(
            f"residual demand needs congestion {lam:.4g} > eps={eps:.4g}; family quality too optimistic"
        )
    total = fbar.values + aug.values
    gvals = np.zeros(g.m)
    gvals[h.origin] = total
    _attach_witness(g, umask, pmask, gvals, beta, res, eps)


def check_almost_fair(g, u, t, beta, eps, res, strict=True):
    """Independent contract check; returns a list of problems (empty when sound)."""
    problems = []
    umask = as_mask(g, u)
    kept = as_mask(g, res.kept)
    pruned = as_mask(g, res.pruned)
    if not kept[t]:
        problems.append("t was pruned")
    if np.any(kept & pruned) or np.any((kept | pruned) != umask):
        problems.append("pruned and kept do not partition u")
    if strict:
        cap = [exact(c) for c in g.cap]
        b = exact(beta)

        def dlt(a, bmask):
            return sum((cap[e] for e in np.flatnonzero((a[g.eu] & bmask[g.ev]) | (bmask[g.eu] & a[g.ev]))),
                       Fraction(0))

        lhs = dlt(kept, ~kept)
        rhs = dlt(umask, ~umask) - b * dlt(pruned, ~umask)
        if lhs > rhs:
            problems.append(f"cut inequality fails: {float(lhs)} > {float(rhs)}")
    else:
        lhs = boundary_capacity(g, kept)
        rhs = boundary_capacity(g, umask) - beta * cut_between(g, pruned, ~umask)
        if lhs > rhs + 1e-9 * max(1.0, rhs):
            problems.append("cut inequality fails")
    if not _witness_exists(g, umask, kept, t, beta, eps, strict):
        problems.append("no routing of the kept boundary exists")
    return problems


def _witness_exists(g, umask, kept, t, beta, eps, strict):
    """Is there a flow in G{U'} (capacities (1+eps)c) sending exactly (1-beta)c on
    every old boundary edge toward ``t`` while new boundary edges are free?"""
    verts = np.flatnonzero(kept)
    local = np.full(g.n, -1, dtype=np.int64)
    local[verts] = np.arange(len(verts))
    src = len(verts)
    tl = int(local[t])
    eu, ev, cap, low = [], [], [], []
    one_eps = exact(1) + exact(eps) if strict else 1 + eps
    keep = exact(1) - exact(beta) if strict else 1 - beta
    keep = max(keep, 0)
    for e, (a, b, c) in enumerate(g.edges()):
        ka, kb = kept[a], kept[b]
        c = exact(c) if strict else c
        if ka and kb:
            if a != b:
                eu.append(local[a]); ev.append(local[b]); cap.append(c * one_eps); low.append(0)
        elif ka or kb:
            inner, other = (a, b) if ka else (b, a)
            if umask[other]:
                eu.append(tl); ev.append(local[inner]); cap.append(c * one_eps); low.append(0)
            elif keep > 0:
                eu.append(src); ev.append(local[inner]); cap.append(c * keep); low.append(c * keep)
    aux = Graph(len(verts) + 1, eu, ev, [float(x) for x in cap]) if eu else Graph(len(verts) + 1, [], [], [])
    if not eu:
        return True
    out = feasible_flow_lower_bounds(aux, low, src, tl, exact_mode=strict, cap=cap)
    return isinstance(out, Flow)
