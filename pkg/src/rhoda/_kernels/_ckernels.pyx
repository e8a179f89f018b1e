# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels.

Every function here has a numpy twin in ``_pykernels`` with the same
signature and the same results (bit-for-bit for integer outputs, up to
floating-point summation order for loads).  Node indices are 0-based.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def bfs_all_pairs(cnp.int64_t[::1] indptr, cnp.int32_t[::1] indices, Py_ssize_t n):
    """Unit-weight all-pairs distances; -1 marks unreachable pairs."""
    dist_arr = np.full((n, n), -1, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] dist = dist_arr
    cdef cnp.int32_t[::1] queue = np.empty(n, dtype=np.int32)
    cdef Py_ssize_t s, head, tail, u, v, e
    cdef cnp.int32_t du
    for s in range(n):
        dist[s, s] = 0
        queue[0] = <cnp.int32_t>s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[s, u]
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if dist[s, v] < 0:
                    dist[s, v] = du + 1
                    queue[tail] = <cnp.int32_t>v
                    tail += 1
    return dist_arr


def next_hops(cnp.int64_t[::1] indptr, cnp.int32_t[::1] indices, cnp.int32_t[:, ::1] dist):
    """Smallest-id successor on a shortest path from u towards t (-1 if none).

    ``indices`` must be sorted within each row so that the first match is the
    smallest id.
    """
    cdef Py_ssize_t n = dist.shape[0]
    nh_arr = np.full((n, n), -1, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] nh = nh_arr
    cdef Py_ssize_t u, t, e, v
    cdef cnp.int32_t want
    for u in range(n):
        for t in range(n):
            if t == u or dist[u, t] <= 0:
                continue
            want = dist[u, t] - 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if dist[v, t] == want:
                    nh[u, t] = <cnp.int32_t>v
                    break
    return nh_arr


def push_loads(cnp.int32_t[:, ::1] dist, cnp.int32_t[:, ::1] nh, double[:, ::1] demand):
    """Route ``demand[u, t]`` along next-hop trees and accumulate loads.

    Returns ``(node_load, edge_load)``.  A node is charged for traffic that
    arrives at it, never for traffic it originates.
    """
    cdef Py_ssize_t n = dist.shape[0]
    node_arr = np.zeros(n, dtype=np.float64)
    edge_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[::1] node_load = node_arr
    cdef double[:, ::1] edge_load = edge_arr
    cdef double[::1] carry = np.zeros(n, dtype=np.float64)
    cdef cnp.int64_t[::1] counts = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] start = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int32_t[::1] order = np.empty(n, dtype=np.int32)
    cdef Py_ssize_t t, u, v, i, dmax
    cdef cnp.int32_t du
    cdef double c
    for t in range(n):
        for i in range(n + 1):
            counts[i] = 0
        dmax = 0
        for u in range(n):
            carry[u] = 0.0
            du = dist[u, t]
            if du > 0:
                counts[du] += 1
                if du > dmax:
                    dmax = du
        if dmax == 0:
            continue
        # bucket nodes by distance, farthest bucket first
        start[dmax] = 0
        for i in range(dmax - 1, 0, -1):
            start[i] = start[i + 1] + counts[i + 1]
        for u in range(n):
            du = dist[u, t]
            if du > 0:
                order[start[du]] = <cnp.int32_t>u
                start[du] += 1
        for i in range(start[1]):
            u = order[i]
            c = carry[u] + demand[u, t]
            if c != 0.0:
                v = nh[u, t]
                edge_load[u, v] += c
                node_load[v] += c
                carry[v] += c
    return node_arr, edge_arr


def hungarian(double[:, ::1] cost):
    """Minimum-cost assignment (shortest augmenting path, O(n^3)).

    Returns an array ``col`` with ``col[row]`` the assigned column.
    """
    cdef Py_ssize_t n = cost.shape[0]
    cdef double[::1] u = np.zeros(n + 1)
    cdef double[::1] v = np.zeros(n + 1)
    cdef double[::1] minv = np.empty(n + 1)
    cdef cnp.int64_t[::1] p = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] way = np.zeros(n + 1, dtype=np.int64)
    cdef unsigned char[::1] used = np.zeros(n + 1, dtype=np.uint8)
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef double delta, cur
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        for j in range(n + 1):
            minv[j] = INFINITY
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = p[j0]
            delta = INFINITY
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    col = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        col[p[j] - 1] = j - 1
    return col


def greedy_add_edges(cnp.int64_t[::1] order, Py_ssize_t n, int cap,
                     cnp.int32_t[::1] out_deg, cnp.int32_t[::1] in_deg,
                     cnp.uint8_t[:, ::1] adj):
    """Scan flat candidate indices ``u*n+v`` in order, adding each directed
    edge that keeps both endpoint degrees within ``cap``.

    ``out_deg``, ``in_deg`` and ``adj`` are updated in place.  Returns the
    flat indices of the added edges, in insertion order.
    """
    added_arr = np.empty(order.shape[0], dtype=np.int64)
    cdef cnp.int64_t[::1] added = added_arr
    cdef Py_ssize_t i, m = 0, u, v
    cdef Py_ssize_t room = 0
    for u in range(n):
        room += cap - out_deg[u] if out_deg[u] < cap else 0
    for i in range(order.shape[0]):
        if room == 0:
            break
        u = order[i] // n
        v = order[i] % n
        if u == v or adj[u, v]:
            continue
        if out_deg[u] >= cap or in_deg[v] >= cap:
            continue
        adj[u, v] = 1
        out_deg[u] += 1
        in_deg[v] += 1
        added[m] = order[i]
        m += 1
        room -= 1
    return added_arr[:m].copy()
