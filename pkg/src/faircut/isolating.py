"""Approximate minimum isolating cuts and Steiner mincut by terminal sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, child_rng, clog2, get_logger, make_rng
from .fair_cut import fair_cut
from .flows import Refuted, verify_one_sided_fair
from .graph import GraphError, as_mask, contract, make_cut

log = get_logger(__name__)


@dataclass
class IsolatingCutsResult:
    cuts: dict  # terminal -> Cut
    gamma: float
    phase_one: list = field(default_factory=list)  # (ones, zeros, side mask)
    work: int = 0  # vertices plus edges over all per-terminal graphs


def _bit_cut(g, ones, zeros, gamma, rng, constants, strict):
    """Fair cut separating two terminal groups, by contracting each group."""
    h, vmap = contract(g, [ones, zeros])
    a, b = h.n - 2, h.n - 1
    cut, _ = fair_cut(h, a, b, gamma, seed=child_rng(rng), constants=constants, strict=strict)
    side = np.zeros(h.n, dtype=bool)
    side[list(cut.side)] = True
    return side[vmap]


def _components_without(g, removed):
    keep = ~removed
    labels = np.arange(g.n)

    def find(x):
        while labels[x] != x:
            labels[x] = labels[labels[x]]
            x = labels[x]
        return x

    for u, v in zip(g.eu[keep].tolist(), g.ev[keep].tolist()):
        ru, rv = find(u), find(v)
        if ru != rv:
            labels[ru] = rv
    return np.array([find(x) for x in range(g.n)])


def isolating_cuts(g, terminals, eps, seed=0, constants=DEFAULT, check=True, strict=None):
    """Approximately minimum cut isolating each terminal from all the others.

    The returned sides are disjoint, each holds exactly one terminal and each
    admits a one-sided fair flow from its terminal.
    """
    terms = sorted(set(int(x) for x in terminals))
    if len(terms) < 2:
        raise GraphError("need at least two terminals")
    if not 0 < eps < 1:
        raise GraphError("eps must lie in (0, 1)")
    rng = make_rng(seed)
    bits = clog2(len(terms))
    gamma = eps / (4 * bits)
    crossing = np.zeros(g.m, dtype=bool)
    phase_one = []
    for i in range(bits):
        ones = [x for r, x in enumerate(terms, start=1) if (r >> i) & 1]
        zeros = [x for r, x in enumerate(terms, start=1) if not (r >> i) & 1]
        if not ones or not zeros:
            continue
        side = _bit_cut(g, ones, zeros, gamma, rng, constants, strict)
        phase_one.append((ones, zeros, side))
        crossing |= side[g.eu] != side[g.ev]
    labels = _components_without(g, crossing)
    tmask = as_mask(g, terms)
    cuts, work = {}, 0
    for x in terms:
        comp = labels == labels[x]
        if np.count_nonzero(comp & tmask) != 1:
            raise GraphError("phase one failed to separate the terminals")
        if comp.sum() == 1:
            cuts[x] = make_cut(g, comp)
            continue
        h, vmap = contract(g, [~comp])
        work += h.n + h.m
        cut, _ = fair_cut(h, int(vmap[x]), h.n - 1, gamma, seed=child_rng(rng), constants=constants,
                          strict=strict)
        side = np.zeros(h.n, dtype=bool)
        side[list(cut.side)] = True
        cuts[x] = make_cut(g, side[vmap] & comp)
    if work > 2 * (g.m + g.n) + 2 * len(terms):
        raise AssertionError("per-terminal graphs exceed the size budget")
    res = IsolatingCutsResult(cuts, gamma, phase_one, work)
    if check:
        problems = check_isolating(g, terms, res, strict)
        if problems:
            raise AssertionError("; ".join(problems))
    return res


def check_isolating(g, terms, res, strict=None):
    problems = []
    seen = np.zeros(g.n, dtype=bool)
    tset = set(terms)
    for x, cut in res.cuts.items():
        m = as_mask(g, cut.side)
        if np.any(seen & m):
            problems.append("isolating cuts overlap")
        seen |= m
        if set(cut.side) & tset != {x}:
            problems.append(f"cut of terminal {x} holds other terminals")
        cert = verify_one_sided_fair(g, x, cut, 1 + res.gamma, strict=strict)
        if isinstance(cert, Refuted):
            problems.append(f"cut of terminal {x} is not one-sided fair")
    return problems


def steiner_mincut(g, terminals, eps, seed=0, constants=DEFAULT, strict=None):
    """Approximate minimum cut splitting the terminal set, via sampled isolating cuts."""
    terms = sorted(set(int(x) for x in terminals))
    if len(terms) < 2:
        raise GraphError("need at least two terminals")
    rng = make_rng(seed)
    best = None
    reps = max(1, math.ceil(math.log(max(g.n, 2)) / math.log(8 / 7)))
    for i in range(1, clog2(len(terms)) + 1):
        for _ in range(reps):
            keep = rng.random(len(terms)) < 0.5**i
            sample = [x for x, k in zip(terms, keep) if k]
            if len(sample) < 2:
                continue
            res = isolating_cuts(g, sample, eps, child_rng(rng), constants, False, strict)
            for cut in res.cuts.values():
                if best is None or cut.value < best.value:
                    best = cut
    if best is None:
        res = isolating_cuts(g, terms, eps, child_rng(rng), constants, False, strict)
        best = min(res.cuts.values(), key=lambda c: c.value)
    return best
