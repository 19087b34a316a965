"""Pure-Python kernels.

These mirror the compiled versions in ``_core.pyx``. The max-flow routine is
written without numpy so it also runs over ``fractions.Fraction`` values, which
is what the strict verification mode relies on.
"""

from collections import deque

import numpy as np


def dinic(n, eu, ev, cap_f, cap_b, s, t, tol=0.0):
    """Blocking-flow max-flow on an edge list.

    Edge ``e`` joins ``eu[e]`` and ``ev[e]`` with capacity ``cap_f[e]`` in the
    stored direction and ``cap_b[e]`` against it. Returns ``(value, flow,
    reach)`` where ``flow[e]`` is the signed flow along the stored direction and
    ``reach[v]`` marks the source side of a minimum cut (residual reachability).
    """
    m = len(eu)
    res = [None] * (2 * m)
    to = [0] * (2 * m)
    adj = [[] for _ in range(n)]
    for e in range(m):
        u, v = int(eu[e]), int(ev[e])
        res[2 * e] = cap_f[e]
        res[2 * e + 1] = cap_b[e]
        to[2 * e] = v
        to[2 * e + 1] = u
        adj[u].append(2 * e)
        adj[v].append(2 * e + 1)

    def bfs():
        level = [-1] * n
        level[s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for a in adj[x]:
                y = to[a]
                if level[y] < 0 and res[a] > tol:
                    level[y] = level[x] + 1
                    q.append(y)
        return level

    total = 0
    while True:
        level = bfs()
        if level[t] < 0:
            break
        it = [0] * n
        path = []
        x = s
        while True:
            if x == t:
                push = min(res[a] for a in path)
                for a in path:
                    res[a] -= push
                    res[a ^ 1] += push
                total += push
                cut = next(i for i, a in enumerate(path) if res[a] <= tol)
                x = to[path[cut] ^ 1]
                del path[cut:]
                continue
            arcs = adj[x]
            while it[x] < len(arcs):
                a = arcs[it[x]]
                y = to[a]
                if res[a] > tol and level[y] == level[x] + 1:
                    break
                it[x] += 1
            else:
                if x == s:
                    break
                level[x] = -1
                a = path.pop()
                x = to[a ^ 1]
                it[x] += 1
                continue
            path.append(a)
            x = to[a]

    level = bfs()
    reach = [lv >= 0 for lv in level]
    flow = [cap_f[e] - res[2 * e] for e in range(m)]
    return total, flow, reach


def sweep_profile(phi, eu, ev, cap, dem):
    """Threshold profile used by the deletion-set sweep.

    With ``vals`` the sorted distinct potentials, entry ``j`` of the returned
    array is ``dem(X_j) - cut(X_j)`` for ``X_j = {v : phi[v] > vals[j]}``.
    """
    vals, rank = np.unique(phi, return_inverse=True)
    k = len(vals)
    above = np.bincount(rank, weights=dem, minlength=k)
    above = np.cumsum(above[::-1])[::-1]
    above = np.append(above[1:], 0.0)
    a = np.minimum(rank[eu], rank[ev])
    b = np.maximum(rank[eu], rank[ev])
    diff = np.zeros(k + 1)
    np.add.at(diff, a, cap)
    np.add.at(diff, b, -cap)
    cut = np.cumsum(diff)[:k]
    return vals, above - cut
