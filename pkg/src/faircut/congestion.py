"""Laminar cut families used to steer the multiplicative-weights pruning.

A family is built by recursive spectral bisection. Its quality, the factor by
which feasibility on the family's cuts can understate the true congestion, is
measured exactly on small graphs and estimated otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .config import DEFAULT, clog2, get_logger, make_rng
from .graph import GraphError, as_mask, boundary_capacity, induced_subgraph

log = get_logger(__name__)


@dataclass
class LaminarFamily:
    n: int
    sets: list
    parent: list
    cut: np.ndarray
    quality: float
    audited: bool

    def __len__(self):
        return len(self.sets)

    def membership(self):
        """Dense 0/1 matrix, vertices by sets."""
        mat = np.zeros((self.n, len(self.sets)))
        for j, s in enumerate(self.sets):
            mat[s, j] = 1.0
        return mat

    def depth(self):
        counts = np.zeros(self.n, dtype=np.int64)
        for s in self.sets:
            counts[s] += 1
        return int(counts.max()) if self.n else 0

    def to_json(self):
        return {"sets": [sorted(int(v) for v in s) for s in self.sets], "parent": list(self.parent),
                "quality": self.quality, "audited": self.audited}


def _bits(s):
    out = 0
    for v in s:
        out |= 1 << int(v)
    return out


def is_laminar(sets):
    masks = [_bits(s) for s in sets]
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            inter = masks[i] & masks[j]
            if inter not in (0, masks[i], masks[j]):
                return False
    return True


def forest(sets):
    """Parent index per set (smallest strict-or-equal superset placed earlier)."""
    masks = [_bits(s) for s in sets]
    order = sorted(range(len(sets)), key=lambda i: (-len(sets[i]), i))
    parent = [-1] * len(sets)
    placed = []
    for i in order:
        best = -1
        for j in placed:
            if masks[i] & masks[j] == masks[i] and (best < 0 or len(sets[j]) <= len(sets[best])):
                best = j
        parent[i] = best
        placed.append(i)
    return parent


def _fiedler_order(sub, rng, iters=200, tol=1e-8):
    """Vertices of a connected graph sorted along an approximate second eigenvector."""
    n = sub.n
    deg = sub.degrees().copy()
    deg[deg <= 0] = 1e-12
    adj = sp.coo_matrix(
        (np.concatenate([sub.cap, sub.cap]), (np.concatenate([sub.eu, sub.ev]), np.concatenate([sub.ev, sub.eu]))),
        shape=(n, n),
    ).tocsr()
    dinv = 1.0 / np.sqrt(deg)
    top = np.sqrt(deg)
    top /= np.linalg.norm(top)
    x = rng.standard_normal(n)
    x -= (top @ x) * top
    x /= np.linalg.norm(x) or 1.0
    for _ in range(iters):
        y = 0.5 * (x + dinv * (adj @ (dinv * x)))
        y -= (top @ y) * top
        norm = np.linalg.norm(y)
        if norm == 0:
            break
        y /= norm
        done = np.linalg.norm(y - x) < tol
        x = y
        if done:
            break
    return np.argsort(x * dinv, kind="stable")


def _balanced_sweep(sub, order):
    """Prefix of ``order`` with least conductance among prefixes keeping both sides >= n/4."""
    n = sub.n
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    a = np.minimum(rank[sub.eu], rank[sub.ev])
    b = np.maximum(rank[sub.eu], rank[sub.ev])
    diff = np.zeros(n + 1)
    np.add.at(diff, a + 1, sub.cap)
    np.add.at(diff, b + 1, -sub.cap)
    cut = np.cumsum(diff)[1:]  # cut[k-1] = crossing weight of the first k vertices
    vol = np.cumsum(sub.degrees()[order])
    total = vol[-1]
    lo = max(1, math.ceil(n / 4))
    ks = np.arange(lo, n - lo + 1)
    small = np.minimum(vol[ks - 1], total - vol[ks - 1])
    small[small <= 0] = 1e-300
    phi = cut[ks - 1] / small
    k = int(ks[np.argmin(phi)])
    return order[:k], order[k:]


def _split_components(sub):
    labels = sub.components()
    groups = [np.flatnonzero(labels == c) for c in range(labels.max() + 1)]
    groups.sort(key=len, reverse=True)
    left, right = [], []
    for grp in groups:
        (left if sum(map(len, left)) <= sum(map(len, right)) else right).append(grp)
    return np.concatenate(left), np.concatenate(right)


def build(g, seed=0, constants=DEFAULT, measure=True):
    """Laminar family from recursive spectral bisection of each component."""
    rng = make_rng(seed)
    labels = g.components() if g.n else np.zeros(0, dtype=np.int64)
    comps = [np.flatnonzero(labels == c) for c in range(labels.max() + 1)] if g.n else []
    sets = []
    stack = []
    for comp in comps:
        if len(comps) > 1:
            sets.append(comp)
        stack.append(comp)
    while stack:
        cluster = stack.pop()
        if len(cluster) <= 1:
            continue
        sub, verts = induced_subgraph(g, cluster)
        if sub.m == 0 or sub.components().max() > 0:
            left, right = _split_components(sub)
        else:
            left, right = _balanced_sweep(sub, _fiedler_order(sub, rng))
        for part in (left, right):
            part = np.sort(verts[part])
            sets.append(part)
            stack.append(part)
    fam = _finish(g, sets)
    if g.n >= 2 and fam.depth() > constants.c_depth * clog2(g.n) + 1:
        raise GraphError("laminar family is deeper than the configured bound")
    _set_quality(g, fam, constants, measure)
    return fam


def _finish(g, sets):
    cut = np.array([boundary_capacity(g, s) for s in sets]) if sets else np.zeros(0)
    return LaminarFamily(g.n, sets, forest(sets), cut, math.nan, False)


def _set_quality(g, fam, constants, measure):
    if measure and g.n <= constants.quality_limit:
        fam.quality = measure_quality(g, fam, constants)
        fam.audited = True
    else:
        fam.quality = constants.c_gamma * max(1.0, math.log2(max(g.n, 2))) ** 4
        fam.audited = False


def exclude_sink(fam, t, g=None, constants=DEFAULT, measure=False):
    """Complement every set that contains ``t``; sets that would vanish are dropped."""
    every = np.arange(fam.n)
    sets = []
    for s in fam.sets:
        if t in set(s.tolist()):
            s = np.setdiff1d(every, s)
        if len(s):
            sets.append(s)
    if g is None:
        out = LaminarFamily(fam.n, sets, forest(sets), np.zeros(len(sets)), fam.quality, False)
        return out
    out = _finish(g, sets)
    if measure:
        _set_quality(g, out, constants, True)
    else:
        out.quality, out.audited = fam.quality, False
    return out


def _all_cut_values(g):
    n = g.n
    masks = np.arange(1 << n, dtype=np.int64)
    cut = np.zeros(1 << n)
    for u, v, c in g.edges():
        if u != v:
            cut += c * (((masks >> u) ^ (masks >> v)) & 1)
    return masks, cut


def measure_quality(g, fam, constants=DEFAULT):
    """Smallest quality factor valid for every demand and every vertex set.

    For each ``R`` this finds the largest ``d(R)`` over demands with
    ``|d(S)| <= cut(S)`` on every family set, and compares it with ``cut(R)``.
    Laminar families are handled by a tree recursion evaluated for all ``R`` at
    once; other families fall back to one linear program per ``R``.
    """
    n = g.n
    if n > constants.quality_limit:
        raise GraphError(f"quality measurement supports at most {constants.quality_limit} vertices")
    if n < 2:
        return 1.0
    sets = [np.asarray(s) for s in fam.sets]
    cuts = np.array([boundary_capacity(g, s) for s in sets])
    masks, cutR = _all_cut_values(g)
    if is_laminar(sets):
        best = _laminar_best(n, sets, cuts, masks)
    else:
        best = _lp_best(n, sets, cuts)
    inner = (masks > 0) & (masks < (1 << n) - 1)
    val = best[inner]
    den = cutR[inner]
    if np.any(np.isinf(val)) or np.any((den <= 1e-12) & (val > 1e-9)):
        return math.inf
    ok = den > 1e-12
    return float(max(1.0, np.max(val[ok] / den[ok]))) if ok.any() else 1.0


def _laminar_best(n, sets, cuts, masks):
    k = len(sets)
    parent = forest(sets)
    children = [[] for _ in range(k + 1)]
    for i, p in enumerate(parent):
        children[k if p < 0 else p].append(i)
    bits = [_bits(s) for s in sets] + [(1 << n) - 1]
    order = sorted(range(k), key=lambda i: (len(sets[i]), -i))
    size = 1 << n
    lo = np.zeros(k + 1)
    hi = np.zeros(k + 1)
    base = [None] * (k + 1)
    ones = [None] * (k + 1)

    def own_of(i):
        rest = bits[i]
        for c in children[i]:
            rest &= ~bits[c]
        return [v for v in range(n) if rest >> v & 1]

    for i in order + [k]:
        own = own_of(i)
        if len(own) > 1:
            return np.full(size, math.inf)
        l = sum(lo[c] for c in children[i])
        h = sum(hi[c] for c in children[i])
        b = np.zeros(size)
        one = np.zeros(size)
        for c in children[i]:
            b += base[c]
            one += ones[c]
        if i == k:
            if own:
                sig = ((masks >> own[0]) & 1).astype(float)
                return sig * (b - l) + (1 - sig) * (b + one)
            return b + np.minimum(0.0 - l, one)
        d = cuts[i]
        if own:
            sig = ((masks >> own[0]) & 1).astype(float)
            lo[i], hi[i] = -d, d
            base[i] = sig * (-d + b - l) + (1 - sig) * (b + one)
            ones[i] = sig * (2 * d)
        else:
            nl, nh = max(l, -d), min(h, d)
            shift = nl - l
            lo[i], hi[i] = nl, nh
            base[i] = b + np.minimum(shift, one)
            ones[i] = np.clip(one - shift, 0.0, nh - nl)
    raise AssertionError("unreachable")


def _lp_best(n, sets, cuts):
    from scipy.optimize import linprog

    rows, rhs = [], []
    for s, c in zip(sets, cuts):
        row = np.zeros(n)
        row[s] = 1.0
        rows += [row, -row]
        rhs += [c, c]
    a_ub = np.array(rows) if rows else None
    b_ub = np.array(rhs) if rhs else None
    size = 1 << n
    out = np.zeros(size)
    for r in range(1, size - 1):
        obj = -np.array([(r >> v) & 1 for v in range(n)], dtype=float)
        res = linprog(obj, A_ub=a_ub, b_ub=b_ub, A_eq=np.ones((1, n)), b_eq=[0.0],
                      bounds=[(None, None)] * n, method="highs")
        out[r] = math.inf if res.status == 3 else -res.fun
    return out


def check_family(g, fam, t=None, constants=DEFAULT):
    """Invariant checks; returns a list of problems."""
    problems = []
    if not is_laminar(fam.sets):
        problems.append("family is not laminar")
    if len(fam.sets) > 2 * max(g.n, 1):
        problems.append("family has more than 2n sets")
    if g.n >= 2 and fam.depth() > 2 * constants.c_depth * clog2(g.n) + 1:
        problems.append("membership depth too large")
    if t is not None and any(t in set(s.tolist()) for s in fam.sets):
        problems.append("a set contains the sink")
    return problems


def family_from_sets(g, sets, constants=DEFAULT, measure=True):
    """Family over explicit sets (test and debugging helper)."""
    sets = [np.sort(np.flatnonzero(as_mask(g, s))) for s in sets]
    fam = _finish(g, sets)
    _set_quality(g, fam, constants, measure)
    return fam
