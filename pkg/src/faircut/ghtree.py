"""Approximate Gomory-Hu Steiner trees built from isolating cuts and fair cuts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, child_rng, clog2, get_logger, make_rng
from .graph import Cut, Graph, GraphError, as_mask, contract, cut_value
from .isolating import isolating_cuts, steiner_mincut

log = get_logger(__name__)

RESCALED_EPS_CAP = 0.0099


class GHTreeError(RuntimeError):
    """Recursion guard tripped; carries the Steiner-mincut trajectory."""

    def __init__(self, msg, trace):
        super().__init__(msg)
        self.trace = trace


@dataclass
class CutThresholdOutput:
    D: frozenset
    R: list
    F: dict  # terminal -> Cut, pairwise disjoint
    threshold: float


@dataclass
class GHSteinerTree:
    terminals: list
    edges: list  # (u, v, weight)
    mapping: np.ndarray  # vertex -> terminal
    trace: list = field(default_factory=list)

    def adjacency(self):
        adj = {u: [] for u in self.terminals}
        for i, (a, b, _) in enumerate(self.edges):
            adj[a].append((b, i))
            adj[b].append((a, i))
        return adj

    def path_edges(self, a, b):
        """Edge ids on the tree path from ``a`` to ``b``."""
        adj = self.adjacency()
        prev = {a: None}
        stack = [a]
        while stack:
            x = stack.pop()
            for y, i in adj[x]:
                if y not in prev:
                    prev[y] = (x, i)
                    stack.append(y)
        if b not in prev:
            raise GraphError("terminals are not connected in the tree")
        out = []
        while prev[b] is not None:
            b, i = prev[b]
            out.append(i)
        return out

    def side_of(self, edge_id, root):
        """Terminals on ``root``'s side after deleting one tree edge."""
        adj = self.adjacency()
        seen = {root}
        stack = [root]
        while stack:
            x = stack.pop()
            for y, i in adj[x]:
                if i != edge_id and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def preimage(self, terms):
        terms = set(terms)
        return np.array([int(t) in terms for t in self.mapping], dtype=bool)

    def to_json(self):
        return {
            "terminals": [int(u) for u in self.terminals],
            "edges": [[int(a), int(b), float(w)] for a, b, w in self.edges],
            "mapping": [[v, int(t)] for v, t in enumerate(self.mapping.tolist())],
        }

    @classmethod
    def from_json(cls, obj):
        mapping = np.array([t for _, t in sorted(obj["mapping"])], dtype=np.int64)
        return cls(list(obj["terminals"]), [tuple(e) for e in obj["edges"]], mapping)


def check_tree(g, tree):
    """Structural checks plus exact edge weights; returns a list of problems."""
    problems = []
    terms = list(tree.terminals)
    if len(tree.edges) != len(terms) - 1:
        problems.append("tree does not have |U|-1 edges")
    for u in terms:
        if tree.mapping[u] != u:
            problems.append(f"terminal {u} does not map to itself")
    if terms:
        if len(tree.side_of(-1, terms[0])) != len(terms):
            problems.append("tree is not connected")
    if problems:
        return problems
    for i, (a, b, w) in enumerate(tree.edges):
        side = tree.preimage(tree.side_of(i, a))
        if cut_value(g, side) != w:
            problems.append(f"edge ({a},{b}) weight {w} differs from its cut {cut_value(g, side)}")
    return problems


def query_mincut(tree, a, b, g=None):
    """Lightest edge on the tree path and the cut it induces (the side holding ``a``)."""
    if a not in set(tree.terminals) or b not in set(tree.terminals):
        raise GraphError("query vertices must be terminals")
    if a == b:
        raise GraphError("query needs two distinct terminals")
    ids = tree.path_edges(a, b)
    best = min(ids, key=lambda i: tree.edges[i][2])
    side = tree.preimage(tree.side_of(best, a))
    value = tree.edges[best][2]
    if g is not None and cut_value(g, side) != value:
        raise AssertionError("tree edge weight differs from its cut")
    return value, Cut(frozenset(int(v) for v in np.flatnonzero(side)), value)


def approx_steiner_mincut_for_lambda(g, u_set, eps, seed=0, constants=DEFAULT, strict=None):
    """Value lam with the exact Steiner mincut inside [(1-eps) lam, lam]."""
    return steiner_mincut(g, u_set, eps, seed, constants, strict).value


def cut_threshold_step(g, u_set, w_thresh, s, gamma, seed=0, constants=DEFAULT, strict=None):
    """Sampled isolating cuts at every density level; keep the level covering most terminals."""
    terms = sorted(set(int(x) for x in u_set))
    if s not in terms:
        raise GraphError("source must be a terminal")
    rng = make_rng(seed)
    others = [x for x in terms if x != s]
    lg = max(1, clog2(len(terms)))
    umask = as_mask(g, terms)
    best = CutThresholdOutput(frozenset(), [], {}, w_thresh)
    for i in range(int(math.floor(math.log2(len(terms)))) + 1):
        keep = rng.random(len(others)) < 0.5**i
        sample = [s] + [x for x, k in zip(others, keep) if k]
        if len(sample) < 2:
            continue
        res = isolating_cuts(g, sample, gamma / (2 * lg), child_rng(rng), constants, strict=strict)
        fam = {v: c for v, c in res.cuts.items() if v != s and c.value <= (1 + gamma) * w_thresh}
        cover = set()
        for c in fam.values():
            cover |= set(c.side) & set(np.flatnonzero(umask).tolist())
        if len(cover) > len(best.D):
            best = CutThresholdOutput(frozenset(cover), sorted(fam), fam, w_thresh)
    return best


def gh_step(g, u0, w0, s, gamma, seed=0, constants=DEFAULT, rounds=None, strict=None):
    """Repeated threshold steps over geometric thresholds; one output picked at random."""
    rng = make_rng(seed)
    if rounds is None:
        rounds = int(constants.gh_iter_factor * max(1, clog2(g.n)) ** 3)
    live = set(int(x) for x in u0)
    outputs = []
    for _ in range(rounds):
        if len(live - {s}) == 0:
            break  # every further call would return an empty output
        lg = max(1, clog2(len(live)))
        step = gamma / (2 * lg)
        removed = set()
        for j in range(lg):
            out = cut_threshold_step(g, live, (1 + step) ** j * w0, s, step, child_rng(rng),
                                     constants, strict)
            outputs.append(out)
            removed |= out.D
        live -= removed
    if not outputs:
        return CutThresholdOutput(frozenset(), [], {}, w0)
    pick = outputs[int(rng.integers(len(outputs)))]
    for c in pick.F.values():
        if c.value > (1 + gamma) * w0 * (1 + 1e-12):
            raise AssertionError("threshold-step cut exceeds (1+gamma) W0")
    return pick


@dataclass
class _Ctx:
    g: Graph
    eps: float
    gamma: float
    depth_guard: int
    rounds: int | None
    constants: object
    strict: object
    rng: np.random.Generator
    trace: list
    dropped: int = 0


def _with_star(h, s, terms, weight):
    others = [u for u in terms if u != s]
    if weight <= 0 or not others:
        return h
    eu = np.concatenate([h.eu, np.full(len(others), s)])
    ev = np.concatenate([h.ev, others])
    cap = np.concatenate([h.cap, np.full(len(others), weight)])
    return Graph(h.n, eu, ev, cap)


def _pick_sets(ctx, h, terms, lam):
    s = int(terms[int(ctx.rng.integers(len(terms)))])
    hp = _with_star(h, s, terms, 18 * ctx.eps * lam / len(terms))
    w0 = (1 + 10 * ctx.eps) * lam
    out = gh_step(hp, terms, w0, s, ctx.gamma, child_rng(ctx.rng), ctx.constants, ctx.rounds, ctx.strict)
    umask = as_mask(h, terms)
    sets = []
    for v in out.R:
        side = as_mask(h, out.F[v].side)
        if cut_value(h, side) > (1 + ctx.gamma) * w0 * (1 + 1e-12):
            raise AssertionError("chosen set exceeds its cut bound")
        if np.count_nonzero(side & umask) > 2 * len(terms) / 3:
            # Possible only when the Steiner estimate missed its bound.
            ctx.dropped += 1
            continue
        sets.append((v, side))
    return sets


def _inverse(vmap, mask, size):
    inv = np.full(size, -1, dtype=np.int64)
    idx = np.flatnonzero(mask)
    inv[vmap[idx]] = idx
    return inv


def _solve(ctx, h, terms, to_h):
    """Tree edges (in ``h`` ids) and the vertex map for terminal set ``terms`` of ``h``."""
    frames = []
    chain = 0
    while len(terms) > 1:
        chain += 1
        if chain > ctx.depth_guard:
            raise GHTreeError(f"more than {ctx.depth_guard} contraction steps in a row", ctx.trace)
        lam = approx_steiner_mincut_for_lambda(h, terms, ctx.eps, child_rng(ctx.rng), ctx.constants,
                                               ctx.strict)
        ctx.trace.append(lam)
        sets = _pick_sets(ctx, h, terms, lam)
        if not sets:
            continue
        subs = []
        for v, side in sets:
            hv, vm = contract(h, [~side])
            sub_terms = sorted(int(vm[x]) for x in terms if side[x])
            e_v, f_v = _solve(ctx, hv, sub_terms, vm[to_h])
            subs.append((side, vm, e_v, f_v, hv.n - 1))
        hl, vml = contract(h, [side for _, side in sets])
        covered = np.zeros(h.n, dtype=bool)
        for _, side in sets:
            covered |= side
        frames.append((h, to_h, subs, vml, covered))
        terms = sorted(int(vml[x]) for x in terms if not covered[x])
        h, to_h = hl, vml[to_h]
    f = np.full(h.n, terms[0], dtype=np.int64)
    edges = []
    for h0, to0, subs, vml, covered in reversed(frames):
        inv_l = _inverse(vml, ~covered, h.n)
        f0 = np.empty(h0.n, dtype=np.int64)
        free = ~covered
        f0[free] = inv_l[f[vml[free]]]
        new = [(int(inv_l[a]), int(inv_l[b]), w) for a, b, w in edges]
        for side, vm, e_v, f_v, x_v in subs:
            inv_v = _inverse(vm, side, len(f_v))
            f0[side] = inv_v[f_v[vm[side]]]
            new += [(int(inv_v[a]), int(inv_v[b]), w) for a, b, w in e_v]
            y_v = int(vml[np.flatnonzero(side)[0]])
            w = cut_value(ctx.g, side[to0])
            new.append((int(inv_v[f_v[x_v]]), int(inv_l[f[y_v]]), w))
        f, edges, h = f0, new, h0
    return edges, f


def gh_tree(g, u_set, eps, seed=0, constants=DEFAULT, rounds=None, strict=None, check=True):
    """Approximate Gomory-Hu Steiner tree on terminals ``u_set``.

    ``eps`` is the target accuracy; it is rescaled internally by the recursion
    depth. ``rounds`` overrides the outer iteration count of each step.
    """
    terms = sorted(set(int(x) for x in u_set))
    if not terms:
        raise GraphError("terminal set must be nonempty")
    if not 0 < eps < 1:
        raise GraphError("eps must lie in (0, 1)")
    if min(terms) < 0 or max(terms) >= g.n:
        raise GraphError("terminal out of range")
    lg = max(1, clog2(g.n))
    inner = min(eps / (2 * lg), RESCALED_EPS_CAP)
    gamma = max(inner**2 / lg**6, constants.gh_gamma_floor)
    guard = int(math.ceil(constants.gh_depth_factor * lg**6 / inner))
    ctx = _Ctx(g, inner, gamma, guard, rounds, constants, strict, make_rng(seed), [])
    edges, f = _solve(ctx, g, terms, np.arange(g.n))
    tree = GHSteinerTree(terms, edges, f, ctx.trace)
    if ctx.dropped:
        log.info("gh tree: dropped %d oversized sets", ctx.dropped)
    if check:
        problems = check_tree(g, tree)
        if problems:
            raise AssertionError("; ".join(problems))
    return tree
