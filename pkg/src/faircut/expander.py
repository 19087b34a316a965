"""Expander decomposition driven by fair cuts: trimming, cut-matching, recursion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, child_rng, clog2, get_logger, make_rng
from .fair_cut import fair_cut
from .flows import path_decompose
from .graph import Cut, Graph, GraphError, as_mask, boundary_capacity, contract, self_loop_subgraph

log = get_logger(__name__)

MATCH_ALPHA = 0.1
EXACT_LIMIT = 20  # hard cap for subset enumeration


# ---------------------------------------------------------------- conductance


def conductance(g, s):
    """Cut capacity over the smaller side's volume."""
    mask = as_mask(g, s)
    k = int(mask.sum())
    if k == 0 or k == g.n:
        raise GraphError("conductance needs a nonempty proper subset")
    deg = g.degrees()
    small = min(float(deg[mask].sum()), float(deg[~mask].sum()))
    cut = boundary_capacity(g, mask)
    if small <= 0:
        if cut > 0:
            return math.inf
        raise GraphError("both volume and cut are zero")
    return cut / small


def _subset_table(g, members=None):
    """Cut and volume of every subset of ``members`` (all vertices by default)."""
    members = np.arange(g.n) if members is None else np.asarray(members)
    k = len(members)
    if k > EXACT_LIMIT:
        raise GraphError(f"enumeration supports at most {EXACT_LIMIT} vertices")
    pos = np.full(g.n, -1, dtype=np.int64)
    pos[members] = np.arange(k)
    masks = np.arange(1 << k, dtype=np.int64)
    cut = np.zeros(1 << k)
    for u, v, c in g.edges():
        if u == v:
            continue
        bu = (masks >> pos[u]) & 1 if pos[u] >= 0 else np.zeros_like(masks)
        bv = (masks >> pos[v]) & 1 if pos[v] >= 0 else np.zeros_like(masks)
        cut += c * (bu ^ bv)
    deg = g.degrees()[members]
    vol = np.zeros(1 << k)
    for i in range(k):
        vol += deg[i] * ((masks >> i) & 1)
    return masks, cut, vol


def exact_conductance(g):
    """Minimum conductance over all cuts, with a minimising side. Small graphs only."""
    if g.n < 2:
        return math.inf, None
    masks, cut, vol = _subset_table(g)
    total = float(g.degrees().sum())
    inner = (masks > 0) & (masks < (1 << g.n) - 1)
    small = np.minimum(vol, total - vol)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(small > 0, cut / np.where(small > 0, small, 1.0), np.where(cut > 0, np.inf, np.nan))
    ratio = np.where(inner, ratio, np.inf)
    if np.any(np.isnan(ratio)):
        return 0.0, int(masks[np.flatnonzero(np.isnan(ratio))[0]])
    j = int(np.argmin(ratio))
    return float(ratio[j]), int(masks[j])


def is_nearly_expander(g, a, phi):
    """Every S inside A with at most half of A's volume has boundary >= phi vol(S) in g."""
    members = np.flatnonzero(as_mask(g, a))
    masks, cut, vol = _subset_table(g, members)
    half = float(g.degrees()[members].sum()) / 2
    sel = (masks > 0) & (vol <= half * (1 + 1e-12))
    return bool(np.all(cut[sel] >= phi * vol[sel] * (1 - 1e-12)))


def _mask_to_set(mask_bits, n):
    return np.array([(mask_bits >> i) & 1 for i in range(n)], dtype=bool)


# ------------------------------------------------------------- subdivision


@dataclass
class Subdivision:
    """Original vertices ``0..n-1`` then one split node per edge (``n + e``)."""

    graph: Graph
    n_orig: int
    split_cap: np.ndarray

    def split_node(self, e):
        return self.n_orig + int(e)


def subdivision_graph(g):
    n, m = g.n, g.m
    x = n + np.arange(m)
    eu = np.concatenate([g.eu, g.ev])
    ev = np.concatenate([x, x])
    cap = np.concatenate([g.cap, g.cap])
    origin = np.concatenate([np.arange(m), np.arange(m)])
    return Subdivision(Graph(n + m, eu, ev, cap, origin=origin), n, g.cap.copy())


# ---------------------------------------------------------------- trimming


@dataclass
class TrimReport:
    kept: frozenset
    vol_before: float
    vol_after: float
    boundary_before: float
    boundary_after: float
    certified: float | None  # exact conductance of the kept part when small


def trimming(g, a, phi, seed=0, constants=DEFAULT, strict=None):
    """Shrink a nearly phi-expander A so the self-loop graph on what is kept expands."""
    return trimming_report(g, a, phi, seed, constants, strict).kept


def trimming_report(g, a, phi, seed=0, constants=DEFAULT, strict=None):
    if not 0 < phi < 1:
        raise GraphError("phi must lie in (0, 1)")
    amask = as_mask(g, a).copy()
    if not amask.any():
        raise GraphError("trimming needs a nonempty set")
    deg = g.degrees()
    vol_a = float(deg[amask].sum())
    bnd = boundary_capacity(g, amask)
    if bnd > phi * vol_a / 10 * (1 + 1e-12):
        raise GraphError(f"boundary {bnd:.6g} exceeds phi vol(A)/10 = {phi * vol_a / 10:.6g}")
    if bnd == 0:
        kept = amask
    else:
        h, vmap = contract(g, [~amask])
        src = h.n - 1
        sink = h.n
        inside = np.flatnonzero(amask & (deg > 0))
        eu = np.concatenate([h.eu, vmap[inside]])
        ev = np.concatenate([h.ev, np.full(len(inside), sink)])
        cap = np.concatenate([h.cap * (3.0 / phi), deg[inside]])
        aux = Graph(h.n + 1, eu, ev, cap)
        cut, _ = fair_cut(aux, src, sink, constants.trim_alpha, seed=seed, constants=constants,
                          strict=strict)
        sside = np.zeros(aux.n, dtype=bool)
        sside[list(cut.side)] = True
        kept = amask & ~sside[vmap]
    vol_k = float(deg[kept].sum())
    bnd_k = boundary_capacity(g, kept)
    tol = 1e-9 * max(1.0, vol_a)
    if vol_k < vol_a - 4 * bnd / phi - tol:
        raise AssertionError("trimming lost more volume than allowed")
    if bnd_k > 2 * bnd + tol:
        raise AssertionError("trimming more than doubled the boundary")
    certified = None
    if 2 <= kept.sum() <= constants.certify_limit:
        certified, _ = exact_conductance(self_loop_subgraph(g, kept).graph)
    return TrimReport(frozenset(int(v) for v in np.flatnonzero(kept)), vol_a, vol_k, bnd, bnd_k, certified)


# ----------------------------------------------------------- matching step


@dataclass
class MatchingResult:
    case: int
    flow: np.ndarray  # per subdivision edge, at scale U
    pairs: list  # (source split node, target split node, amount)
    cut: frozenset | None = None  # original vertices on the source side when routing failed
    cut_conductance: float | None = None


def _split_mass(sub, nodes):
    return float(sum(sub.split_cap[x - sub.n_orig] for x in nodes))


def _trimmed_paths(pieces, s, t, quota):
    """Keep s-t paths so each source edge carries exactly its quota."""
    left = dict(quota)
    out = []
    for verts, edges, signs, amt in pieces:
        if verts[0] != s or verts[-1] != t or verts[0] == verts[-1]:
            continue
        x = verts[1]
        if x not in left or left[x] <= 0:
            continue
        take = min(amt, left[x])
        left[x] -= take
        out.append((verts, edges, signs, take))
    return out, left


def matching_flow_step(sub, a_l, a_r, phi, u_scale, seed=0, constants=DEFAULT, strict=False):
    """Route c(x) from every source split node toward the targets, or find a sparse cut."""
    g = sub.graph
    a_l = sorted(int(x) for x in a_l)
    a_r = sorted(int(x) for x in a_r)
    total = float(sub.split_cap.sum())
    if _split_mass(sub, a_l) > total / 8 * (1 + 1e-12):
        raise GraphError("source split nodes exceed 1/8 of the split capacity")
    if _split_mass(sub, a_r) < total / 2 * (1 - 1e-12):
        raise GraphError("target split nodes carry less than 1/2 of the split capacity")
    if set(a_l) & set(a_r):
        raise GraphError("sources and targets overlap")
    if not a_l:
        return MatchingResult(1, np.zeros(g.m), [])
    alpha = MATCH_ALPHA
    s, t = g.n, g.n + 1
    cl = np.array([sub.split_cap[x - sub.n_orig] for x in a_l])
    cr = np.array([sub.split_cap[x - sub.n_orig] for x in a_r])
    eu = np.concatenate([g.eu, np.full(len(a_l), s), a_r])
    ev = np.concatenate([g.ev, a_l, np.full(len(a_r), t)])
    cap = np.concatenate([g.cap * (u_scale / (1 + alpha)), cl, cr / (1 + alpha)])
    h = Graph(g.n + 2, eu, ev, cap)
    cut, cert = fair_cut(h, s, t, alpha, seed=seed, constants=constants, strict=strict)
    pieces = path_decompose(cert.witness)
    side = np.zeros(h.n, dtype=bool)
    side[list(cut.side)] = True
    routed = [x for x in a_l if not side[x]]
    quota = {x: sub.split_cap[x - sub.n_orig] / (1 + alpha) for x in routed}
    paths, left = _trimmed_paths(pieces, s, t, quota)
    short = max((v / quota[x] for x, v in left.items()), default=0.0)
    if short > 1e-6:
        raise AssertionError("fair-cut witness underfills a source edge")
    vals = np.zeros(h.m)
    pairs = []
    for verts, edges, signs, amt in paths:
        for e, sg in zip(edges, signs):
            vals[e] += sg * amt
        pairs.append((verts[1], verts[-2], amt * (1 + alpha)))
    flow = vals[: g.m] * (1 + alpha)
    if np.any(np.abs(flow) > u_scale * g.cap * (1 + 1e-9) + 1e-12):
        raise AssertionError("matching flow exceeds the scaled capacities")
    if not side[:g.n].any():
        return MatchingResult(1, flow, pairs)
    orig = frozenset(int(v) for v in np.flatnonzero(side[: sub.n_orig]))
    return MatchingResult(2, flow, pairs, orig)


# ----------------------------------------------------------- cut-matching


@dataclass
class Certified:
    rounds: int
    method: str = "cut-matching"


@dataclass
class BalancedCut:
    cut: Cut  # the removed side R


@dataclass
class NearExpanderCut:
    cut: Cut  # the removed side R; its complement is a nearly expander


def _cut_player(emb, caps, rng):
    k = len(caps)
    r = rng.standard_normal(emb.shape[1])
    proj = emb @ r
    order = np.argsort(proj, kind="stable")
    total = caps.sum()
    a_l, mass = [], 0.0
    for i in order:
        if mass + caps[i] > total / 8:
            break
        a_l.append(int(i))
        mass += caps[i]
    if not a_l and k:
        lightest = int(np.argmin(caps))
        if caps[lightest] <= total / 8:
            a_l = [lightest]
    taken = set(a_l)
    a_r, mass = [], 0.0
    for i in order[::-1]:
        if mass >= total / 2:
            break
        if int(i) not in taken:
            a_r.append(int(i))
            mass += caps[i]
    return a_l, a_r


def cut_matching(g, phi, seed=0, constants=DEFAULT, strict=False, vol_total=None):
    """Certify expansion, or return a balanced sparse cut, or a small cut off a nearly expander."""
    if not 0 < phi < 1:
        raise GraphError("phi must lie in (0, 1)")
    rng = make_rng(seed)
    lg = max(1, clog2(max(g.m, 2)))
    u_scale = max(1.0 / (phi * lg * lg), 1.0)
    rounds = max(1, int(math.ceil(constants.c_rounds * lg * lg)))
    deg = g.degrees()
    vol = float(deg.sum()) if vol_total is None else vol_total
    balanced_at = vol / (10 * constants.c_0 * lg * lg)
    alive = np.ones(g.n, dtype=bool)
    emb = None
    for rnd in range(rounds):
        cur = self_loop_subgraph(g, alive)
        if cur.graph.m == 0:
            break
        sub = subdivision_graph(cur.graph)
        k = cur.graph.m
        if emb is None or emb.shape[0] != k:
            emb = np.eye(k)
        a_l, a_r = _cut_player(emb, sub.split_cap, rng)
        res = matching_flow_step(sub, [sub.n_orig + i for i in a_l], [sub.n_orig + i for i in a_r],
                                 phi, u_scale, child_rng(rng), constants, strict)
        if res.case == 2 and 0 < len(res.cut) < cur.graph.n:
            removed = cur.vertices[sorted(res.cut)]
            if float(deg[removed].sum()) > float(deg[alive].sum()) / 2:
                removed = np.setdiff1d(cur.vertices, removed)
            alive[removed] = False
            emb = None
            gone = ~alive
            if float(deg[gone].sum()) >= balanced_at:
                side = frozenset(int(v) for v in np.flatnonzero(gone))
                return BalancedCut(Cut(side, boundary_capacity(g, gone)))
            continue
        mix = np.eye(k)
        for x, y, amt in res.pairs:
            i, j = x - sub.n_orig, y - sub.n_orig
            w = amt / max(sub.split_cap[i], sub.split_cap[j]) / 2
            mix[i, i] -= w
            mix[j, j] -= w
            mix[i, j] += w
            mix[j, i] += w
        emb = mix @ emb
    if alive.all():
        return Certified(rounds)
    gone = ~alive
    side = frozenset(int(v) for v in np.flatnonzero(gone))
    return NearExpanderCut(Cut(side, boundary_capacity(g, gone)))


# ------------------------------------------------------------ decomposition


@dataclass
class ExpanderPartition:
    parts: list  # sorted vertex lists
    certificates: list  # one dict per part
    crossing_weight: float
    phi: float
    log: list = field(default_factory=list)

    def to_json(self):
        return {"parts": self.parts, "crossing_weight": self.crossing_weight,
                "certificates": self.certificates, "phi": self.phi}


def _certificate(g, verts, phi, constants, how):
    sl = self_loop_subgraph(g, verts).graph
    cert = {"method": how, "size": len(verts)}
    if len(verts) < 2:
        cert["method"] = "trivial"
        return cert, True
    if len(verts) <= constants.certify_limit:
        val, _ = exact_conductance(sl)
        cert["exact_conductance"] = val
        cert["method"] = "enumeration"
        return cert, val >= phi / 6
    lower, upper = _spectral_bounds(sl)
    cert["cheeger_lower"] = lower
    cert["sweep_upper"] = upper
    return cert, True


def _spectral_bounds(g):
    """Cheeger lower bound and best sweep cut from the normalised Laplacian."""
    deg = g.degrees()
    n = g.n
    adj = np.zeros((n, n))
    np.add.at(adj, (g.eu, g.ev), g.cap)
    np.add.at(adj, (g.ev, g.eu), g.cap)
    d = np.where(deg > 0, deg, 1.0)
    dm = 1.0 / np.sqrt(d)
    lap = np.eye(n) - dm[:, None] * adj * dm[None, :]
    vals, vecs = np.linalg.eigh(lap)
    lam2 = float(vals[1]) if n > 1 else 0.0
    order = np.argsort(vecs[:, 1] * dm)
    best = math.inf
    mask = np.zeros(n, dtype=bool)
    for i in order[:-1]:
        mask[i] = True
        try:
            best = min(best, conductance(g, mask))
        except GraphError:
            pass
    return lam2 / 2, best


def expander_decomposition(g, phi, seed=0, constants=DEFAULT, strict=False):
    """Partition the vertices so every part induces an expander (self-loop sense)."""
    if not 0 < phi < 1:
        raise GraphError("phi must lie in (0, 1)")
    rng = make_rng(seed)
    deg = g.degrees()
    parts, certs, trail = [], [], []

    def finish(verts, how):
        cert, ok = _certificate(g, verts, phi, constants, how)
        if not ok:
            return False
        parts.append(sorted(int(v) for v in verts))
        certs.append(cert)
        return True

    stack = [np.arange(g.n)]
    while stack:
        verts = stack.pop()
        if len(verts) == 0:
            continue
        if len(verts) == 1 or deg[verts].sum() == 0:
            for v in verts:
                finish([v], "trivial")
            continue
        sl = self_loop_subgraph(g, verts)
        h = sl.graph
        plain = Graph(h.n, h.eu[h.eu != h.ev], h.ev[h.eu != h.ev], h.cap[h.eu != h.ev])
        labels = plain.components()
        if labels.max() > 0:
            trail.append(("components", len(verts)))
            for c in range(labels.max() + 1):
                stack.append(verts[labels == c])
            continue
        res = cut_matching(h, phi, child_rng(rng), constants, strict)
        if isinstance(res, Certified):
            if finish(verts, "cut-matching"):
                trail.append(("certified", len(verts)))
                continue
            # The game's guarantee carries constants; fall back to the exact sparsest cut.
            _, bits = exact_conductance(h)
            side = _mask_to_set(bits, h.n)
            trail.append(("exact-split", len(verts)))
            stack += [verts[side], verts[~side]]
            continue
        rmask = as_mask(h, res.cut.side)
        if isinstance(res, BalancedCut):
            trail.append(("balanced", len(verts)))
            stack += [verts[rmask], verts[~rmask]]
            continue
        try:
            rep = trimming_report(h, ~rmask, phi, child_rng(rng), constants, strict)
        except GraphError:
            trail.append(("untrimmable", len(verts)))
            stack += [verts[rmask], verts[~rmask]]
            continue
        kept = as_mask(h, rep.kept)
        trail.append(("trimmed", len(verts), int(kept.sum())))
        if not finish(verts[kept], "trimming"):
            stack.append(verts[kept])
        stack.append(verts[~kept])
    order = np.argsort([p[0] for p in parts])
    parts = [parts[i] for i in order]
    certs = [certs[i] for i in order]
    label = np.empty(g.n, dtype=np.int64)
    for i, p in enumerate(parts):
        label[p] = i
    if sorted(v for p in parts for v in p) != list(range(g.n)):
        raise AssertionError("parts do not partition the vertex set")
    crossing = float(g.cap[label[g.eu] != label[g.ev]].sum())
    lg = max(1, clog2(max(g.m, 2)))
    bound = constants.c_cross * phi * float(deg.sum()) * lg**3
    if crossing > bound * (1 + 1e-12):
        raise AssertionError(f"crossing weight {crossing} exceeds {bound}")
    return ExpanderPartition(parts, certs, crossing, phi, trail)
