"""Iterative driver that turns repeated pruning into an approximately fair cut."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .almost_fair import almost_fair, mwu_rounds
from .config import DEFAULT, get_logger, make_rng
from .flows import (
    FairnessCertificate,
    Flow,
    FlowError,
    Refuted,
    remove_paths_through,
    verify_fair_cut,
)
from .graph import GraphError, as_mask, boundary_capacity, cut_between, make_cut

log = get_logger(__name__)


class FairCutError(RuntimeError):
    """The driver broke one of its own invariants."""


@dataclass
class DriverState:
    j: int
    side: np.ndarray  # mask of S; T is the complement
    k: int
    defbar: float
    beta: float
    eps: float
    s: int
    t: int
    c_min: float
    total: float
    case_log: list = field(default_factory=list)
    flow: Flow | None = None
    done: bool = False

    @property
    def source_side(self):
        return frozenset(int(v) for v in np.flatnonzero(self.side))


def _deficit(g, side, f, keep):
    """Shortfall of ``f`` below ``keep * c`` summed over S->T edges."""
    out = side[g.eu] & ~side[g.ev]
    inn = side[g.ev] & ~side[g.eu]
    along = np.where(out, f.values, -f.values)
    sel = out | inn
    return float(np.maximum(0.0, keep * g.cap[sel] - along[sel]).sum())


def _surgery(g, st, res_s, res_t, p_s, p_t):
    """Flow update for a small-pruning step, used only to audit the analysis invariants.

    The source-side witness is reversed so it leaves ``s``; the sink-side
    witness is used as is. Edges shared by the two kept sides carry the common
    boundary value. Paths ending in a pruned part are then dropped.
    """
    sp = as_mask(g, res_s.kept)
    tp = as_mask(g, res_t.kept)
    vals = np.zeros(g.m)
    for res, mask, sign, partner in ((res_s, sp, -1.0, None), (res_t, tp, 1.0, sp)):
        bg = res.kept_graph
        w = res.witness_flow.values
        h = bg.graph
        n_in = h.m - len(bg.boundary_map)
        vals[h.origin[:n_in]] = sign * w[:n_in]
        for j, e in enumerate(bg.boundary_map.tolist()):
            inner = int(g.eu[e]) if mask[g.eu[e]] else int(g.ev[e])
            other = int(g.ev[e]) if inner == g.eu[e] else int(g.eu[e])
            if partner is not None and partner[other]:
                continue
            outward = -sign * w[n_in + j]
            vals[e] = outward if g.eu[e] == inner else -outward
    both = p_s | p_t
    vals[both[g.eu] & both[g.ev]] = 0.0
    f = remove_paths_through(Flow(g, vals), np.flatnonzero(both), "endpoints")
    return Flow(g, np.clip(f.values, -g.cap, g.cap))


def _check_analysis(g, st):
    f = st.flow
    keep = 1.0 - st.k * st.beta
    dval = _deficit(g, st.side, f, keep)
    if dval > st.defbar * (1 + 1e-9) + 1e-9:
        raise FairCutError(f"deficit {dval} exceeds its bound {st.defbar}")
    net = f.net_out()
    others = np.ones(g.n, dtype=bool)
    others[[st.s, st.t]] = False
    scale = max(1.0, g.total_capacity())
    if np.any(np.abs(net[others]) > 1e-9 * scale):
        raise FairCutError("maintained flow is not an (s,t)-flow")


def driver_iteration(state, g, fam_s=None, fam_t=None, engine="exact", constants=DEFAULT,
                     analysis=False, fast_forward=True):
    """One pass of the driver loop: prune both sides, then either halve the deficit
    bound (pruning was small) or move the larger pruned set across the cut."""
    st = state
    if st.defbar <= st.beta * st.c_min:
        st.done = True
        return st
    b = (st.k + 1) * st.beta
    S = st.side
    T = ~S
    res_s = almost_fair(g, S, st.s, st.eps, b, fam=fam_s, engine=engine, constants=constants,
                        witness=analysis)
    res_t = almost_fair(g, T, st.t, st.eps, b, fam=fam_t, engine=engine, constants=constants,
                        witness=analysis)
    p_s = as_mask(g, res_s.pruned)
    p_t = as_mask(g, res_t.pruned)
    a = cut_between(g, p_s, T)
    c = cut_between(g, p_t, S)
    limit = st.defbar / 40.0
    if max(a, c) <= limit:
        if fast_forward and not p_s.any() and not p_t.any():
            # Nothing to prune now means nothing to prune for any larger step either.
            steps = max(1, math.ceil(math.log2(st.defbar / (st.beta * st.c_min))))
            if analysis:
                st.flow = _surgery(g, st, res_s, res_t, p_s, p_t)
            st.k += steps
            st.defbar /= 2.0**steps
            st.j += steps
            st.case_log.append(("1*", steps))
        else:
            if analysis:
                st.flow = _surgery(g, st, res_s, res_t, p_s, p_t)
            st.k += 1
            st.defbar /= 2.0
            st.side = S | p_t
            st.j += 1
            st.case_log.append(("1", int(p_t.sum())))
    else:
        st.defbar *= 1.0 - st.beta / 80.0
        if a > limit:
            st.side = S & ~p_s
            st.case_log.append(("2s", int(p_s.sum())))
        else:
            st.side = S | p_t
            st.case_log.append(("2t", int(p_t.sum())))
        st.j += 1
    if not st.side[st.s] or st.side[st.t]:
        raise FairCutError("driver moved s or t across the cut")
    if st.defbar > (1 - st.beta / 80.0) ** st.j * st.total * (1 + 1e-9):
        raise FairCutError("deficit bound is above its geometric envelope")
    if analysis:
        _check_analysis(g, st)
    st.done = st.defbar <= st.beta * st.c_min
    return st


@dataclass
class FairCutRun:
    cut: object
    certificate: FairnessCertificate
    state: DriverState
    engine: str


def fair_cut(g, s, t, alpha, seed=0, constants=DEFAULT, strict=None, engine="auto",
             analysis=False, fast_forward=True):
    """Approximately fair (s,t)-cut with an independently checked certificate."""
    run = fair_cut_run(g, s, t, alpha, seed, constants, strict, engine, analysis, fast_forward)
    return run.cut, run.certificate


def fair_cut_run(g, s, t, alpha, seed=0, constants=DEFAULT, strict=None, engine="auto",
                 analysis=False, fast_forward=True):
    if s == t:
        raise GraphError("s and t must differ")
    if not 0 < alpha:
        raise GraphError("alpha must be positive")
    alpha = min(float(alpha), 1.0)
    make_rng(seed)
    labels = g.components()
    if labels[s] != labels[t]:
        side = labels == labels[s]
        cut = make_cut(g, side)
        cert = verify_fair_cut(g, s, t, cut, 1 + alpha, strict=strict)
        st = DriverState(0, side, 0, 0.0, 0.0, 0.0, s, t, 0.0, 0.0, done=True)
        return FairCutRun(cut, cert, st, "none")
    n = g.n
    beta = alpha / (constants.c_beta * math.log(n))
    eps = beta / 16.0
    c_min = g.min_capacity()
    total = g.total_capacity()
    if engine == "auto":
        engine = "exact" if mwu_rounds(eps, n, constants) > constants.mwu_max_rounds else "mwu"
    side = np.zeros(n, dtype=bool)
    side[s] = True
    st = DriverState(0, side, 0, boundary_capacity(g, side), beta, eps, s, t, c_min, total)
    if analysis:
        st.flow = Flow(g)
    ratio = total / c_min
    budget = math.ceil(constants.c_iter * math.log(ratio / beta) / beta)
    k_cap = constants.c_k * math.log2(ratio / beta) + 1
    while not st.done and st.defbar > beta * c_min:
        driver_iteration(st, g, engine=engine, constants=constants, analysis=analysis,
                         fast_forward=fast_forward)
        if st.j > budget:
            raise FairCutError(f"iteration budget {budget} exceeded; cases {st.case_log[-10:]}")
        if st.k > k_cap:
            raise FairCutError(f"counter k={st.k} exceeds {k_cap:.1f}")
    cut = make_cut(g, st.side)
    cert = verify_fair_cut(g, s, t, cut, 1 + alpha, strict=strict)
    if isinstance(cert, Refuted):
        raise FairCutError(f"final cut failed certification; violated set {sorted(cert.violated)}")
    log.info("fair cut: value %.6g after %d iterations (k=%d)", cut.value, st.j, st.k)
    return FairCutRun(cut, cert, st, engine)


def fair_flow_witness(g, cut, alpha, s, t, strict=None):
    """Feasible (s,t)-flow putting at least c/(1+alpha) on each cut edge."""
    cert = verify_fair_cut(g, s, t, cut, 1 + alpha, strict=strict)
    if isinstance(cert, Refuted):
        raise FlowError(f"cut is not fair; violated set {sorted(cert.violated)}")
    return cert.witness
