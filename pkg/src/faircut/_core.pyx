# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: float max-flow and the deletion sweep profile."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64


cdef bint _bfs(Py_ssize_t n, i64[:] start, i64[:] arcs, i64[:] to, double[:] res,
               i64[:] level, i64[:] queue, Py_ssize_t s, Py_ssize_t t, double tol):
    cdef Py_ssize_t head = 0, tail = 0, x, y, k, a
    for x in range(n):
        level[x] = -1
    level[s] = 0
    queue[tail] = s
    tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        for k in range(start[x], start[x + 1]):
            a = arcs[k]
            y = to[a]
            if level[y] < 0 and res[a] > tol:
                level[y] = level[x] + 1
                queue[tail] = y
                tail += 1
    return level[t] >= 0


def dinic(Py_ssize_t n, eu_in, ev_in, cap_f_in, cap_b_in, Py_ssize_t s, Py_ssize_t t, double tol=0.0):
    cdef const i64[:] eu = np.ascontiguousarray(eu_in, dtype=np.int64)
    cdef const i64[:] ev = np.ascontiguousarray(ev_in, dtype=np.int64)
    cdef const double[:] cap_f = np.ascontiguousarray(cap_f_in, dtype=np.float64)
    cdef const double[:] cap_b = np.ascontiguousarray(cap_b_in, dtype=np.float64)
    cdef Py_ssize_t m = eu.shape[0]
    cdef Py_ssize_t e, x, y, a, k, plen, cut
    cdef double push, total = 0.0

    res_arr = np.empty(2 * m, dtype=np.float64)
    to_arr = np.empty(2 * m, dtype=np.int64)
    cdef double[:] res = res_arr
    cdef i64[:] to = to_arr
    start_arr = np.zeros(n + 1, dtype=np.int64)
    cdef i64[:] start = start_arr
    for e in range(m):
        res[2 * e] = cap_f[e]
        res[2 * e + 1] = cap_b[e]
        to[2 * e] = ev[e]
        to[2 * e + 1] = eu[e]
        start[eu[e] + 1] += 1
        start[ev[e] + 1] += 1
    for x in range(n):
        start[x + 1] += start[x]
    fill_arr = start_arr[:n].copy()
    cdef i64[:] fill = fill_arr
    arcs_arr = np.empty(2 * m, dtype=np.int64)
    cdef i64[:] arcs = arcs_arr
    for e in range(m):
        arcs[fill[eu[e]]] = 2 * e
        fill[eu[e]] += 1
        arcs[fill[ev[e]]] = 2 * e + 1
        fill[ev[e]] += 1

    level_arr = np.empty(n, dtype=np.int64)
    queue_arr = np.empty(n, dtype=np.int64)
    it_arr = np.empty(n, dtype=np.int64)
    path_arr = np.empty(n + 1, dtype=np.int64)
    cdef i64[:] level = level_arr
    cdef i64[:] queue = queue_arr
    cdef i64[:] it = it_arr
    cdef i64[:] path = path_arr

    while _bfs(n, start, arcs, to, res, level, queue, s, t, tol):
        for x in range(n):
            it[x] = start[x]
        plen = 0
        x = s
        while True:
            if x == t:
                push = res[path[0]]
                for k in range(1, plen):
                    if res[path[k]] < push:
                        push = res[path[k]]
                for k in range(plen):
                    res[path[k]] -= push
                    res[path[k] ^ 1] += push
                total += push
                cut = 0
                for k in range(plen):
                    if res[path[k]] <= tol:
                        cut = k
                        break
                x = to[path[cut] ^ 1]
                plen = cut
                continue
            a = -1
            while it[x] < start[x + 1]:
                a = arcs[it[x]]
                y = to[a]
                if res[a] > tol and level[y] == level[x] + 1:
                    break
                it[x] += 1
                a = -1
            if a < 0:
                if x == s:
                    break
                level[x] = -1
                plen -= 1
                x = to[path[plen] ^ 1]
                it[x] += 1
                continue
            path[plen] = a
            plen += 1
            x = to[a]

    _bfs(n, start, arcs, to, res, level, queue, s, t, tol)
    reach = level_arr >= 0
    flow = np.asarray(cap_f) - res_arr[0::2]
    return total, flow, reach


def sweep_profile(phi_in, eu_in, ev_in, cap_in, dem_in):
    cdef const double[:] phi = np.ascontiguousarray(phi_in, dtype=np.float64)
    cdef const i64[:] eu = np.ascontiguousarray(eu_in, dtype=np.int64)
    cdef const i64[:] ev = np.ascontiguousarray(ev_in, dtype=np.int64)
    cdef const double[:] cap = np.ascontiguousarray(cap_in, dtype=np.float64)
    cdef const double[:] dem = np.ascontiguousarray(dem_in, dtype=np.float64)
    cdef Py_ssize_t n = phi.shape[0], m = eu.shape[0]
    cdef Py_ssize_t i, j, k, e, a, b
    order_arr = np.argsort(phi_in, kind="stable").astype(np.int64)
    cdef i64[:] order = order_arr
    rank_arr = np.empty(n, dtype=np.int64)
    cdef i64[:] rank = rank_arr
    vals_arr = np.empty(n, dtype=np.float64)
    cdef double[:] vals = vals_arr
    k = 0
    for i in range(n):
        if i == 0 or phi[order[i]] != vals[k - 1]:
            vals[k] = phi[order[i]]
            k += 1
        rank[order[i]] = k - 1
    prof_arr = np.zeros(k + 1, dtype=np.float64)
    cdef double[:] prof = prof_arr
    for i in range(n):
        prof[rank[i]] += dem[i]
    cdef double acc = 0.0, tmp
    for j in range(k - 1, -1, -1):
        tmp = prof[j]
        prof[j] = acc
        acc += tmp
    diff_arr = np.zeros(k + 1, dtype=np.float64)
    cdef double[:] diff = diff_arr
    for e in range(m):
        a = rank[eu[e]]
        b = rank[ev[e]]
        if a > b:
            a, b = b, a
        diff[a] += cap[e]
        diff[b] -= cap[e]
    acc = 0.0
    for j in range(k):
        acc += diff[j]
        prof[j] -= acc
    return vals_arr[:k].copy(), prof_arr[:k].copy()
