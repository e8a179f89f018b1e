"""Numpy implementations of the graph kernels.

Used when the compiled extension is unavailable, or when
``RHODA_PURE_PYTHON=1`` is set.  Signatures and results match ``_ckernels``.
"""

from __future__ import annotations

import numpy as np


def bfs_all_pairs(indptr: np.ndarray, indices: np.ndarray, n: int) -> np.ndarray:
    # Level-synchronous BFS from every source at once; frontier rows are sources.
    adj = np.zeros((n, n), dtype=np.float32)
    rows = np.repeat(np.arange(n), np.diff(indptr))
    adj[rows, indices] = 1.0
    dist = np.full((n, n), -1, dtype=np.int32)
    frontier = np.eye(n, dtype=np.float32)
    visited = np.eye(n, dtype=bool)
    dist[visited] = 0
    level = 0
    while frontier.any():
        level += 1
        reach = (frontier @ adj) > 0
        reach &= ~visited
        dist[reach] = level
        visited |= reach
        frontier = reach.astype(np.float32)
    return dist


def next_hops(indptr: np.ndarray, indices: np.ndarray, dist: np.ndarray) -> np.ndarray:
    n = dist.shape[0]
    nh = np.full((n, n), -1, dtype=np.int32)
    for u in range(n):
        nbrs = indices[indptr[u]:indptr[u + 1]]
        if nbrs.size == 0:
            continue
        want = dist[u] - 1
        ok = dist[nbrs] == want[None, :]
        ok &= (dist[u] > 0)[None, :]
        hit = ok.any(axis=0)
        first = ok.argmax(axis=0)
        nh[u, hit] = nbrs[first[hit]]
    return nh


def push_loads(dist: np.ndarray, nh: np.ndarray, demand: np.ndarray):
    n = dist.shape[0]
    node_load = np.zeros(n)
    edge_load = np.zeros((n, n))
    carry = np.where(dist > 0, demand, 0.0).astype(np.float64)
    dmax = int(dist.max()) if n else 0
    for level in range(dmax, 0, -1):
        us, ts = np.nonzero(dist == level)
        c = carry[us, ts]
        keep = c != 0.0
        us, ts, c = us[keep], ts[keep], c[keep]
        vs = nh[us, ts]
        np.add.at(carry, (vs, ts), c)
        np.add.at(node_load, vs, c)
        np.add.at(edge_load, (us, vs), c)
    return node_load, edge_load


def hungarian(cost: np.ndarray) -> np.ndarray:
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = cost[i0 - 1] - u[i0] - v[1:]
            cur = np.concatenate(([np.inf], cur))
            better = free & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            masked = np.where(free, minv, np.inf)
            j1 = int(masked.argmin())
            delta = masked[j1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
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
    col[p[1:] - 1] = np.arange(n)
    return col


def greedy_add_edges(order, n, cap, out_deg, in_deg, adj):
    added = []
    room = int(np.clip(cap - out_deg, 0, None).sum())
    for flat in order.tolist():
        if room == 0:
            break
        u, v = divmod(flat, n)
        if u == v or adj[u, v]:
            continue
        if out_deg[u] >= cap or in_deg[v] >= cap:
            continue
        adj[u, v] = 1
        out_deg[u] += 1
        in_deg[v] += 1
        added.append(flat)
        room -= 1
    return np.asarray(added, dtype=np.int64)
