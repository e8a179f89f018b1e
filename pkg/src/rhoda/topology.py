"""Intra- and inter-cluster logical topology design and wavelength plans."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .model import Level, LogicalTopology


class TopologyError(RuntimeError):
    pass


class InfeasibleMatching(TopologyError):
    pass


def greedy_traffic_cycle(sym_weights) -> list[int]:
    """Visit order (1-based) of a heaviest-neighbour cycle.

    Starts at the node with the largest total weight and keeps stepping to
    the unvisited node most heavily connected to the last one.  Ties go to
    the smallest id.  The returned list does not repeat the start node; the
    cycle closes from the last entry back to the first.
    """
    w = np.asarray(sym_weights, dtype=float)
    n = w.shape[0]
    if n < 2:
        raise ValueError(f"a cycle needs at least 2 nodes, got {n}")
    totals = w.sum(axis=1) - np.diag(w)
    cur = int(np.argmax(totals))
    visited = np.zeros(n, dtype=bool)
    visited[cur] = True
    order = [cur]
    for _ in range(n - 1):
        row = np.where(visited, -np.inf, w[cur])
        cur = int(np.argmax(row))
        visited[cur] = True
        order.append(cur)
    return [x + 1 for x in order]


def cycle_edges(order: list[int]) -> list[tuple[int, int]]:
    return list(zip(order, order[1:] + order[:1]))


def configure_intra_topology(local_t, t_intra: int) -> LogicalTopology:
    """Directed rack topology inside one cluster.

    A traffic cycle comes first so that every rack reaches every other.
    The remaining transceivers are spent on the heaviest directed pairs,
    keeping every rack's out- and in-degree at most ``t_intra``.
    """
    return _degree_bounded_topology(local_t, t_intra, Level.RACK)


def _degree_bounded_topology(rates, cap: int, level: Level) -> LogicalTopology:
    rates = np.asarray(rates, dtype=float)
    n = rates.shape[0]
    if cap < 1:
        raise ValueError(f"degree cap must be >= 1, got {cap}")
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    order = greedy_traffic_cycle(rates + rates.T)
    ring = cycle_edges(order)
    adj = np.zeros((n, n), dtype=np.uint8)
    out_deg = np.zeros(n, dtype=np.int32)
    in_deg = np.zeros(n, dtype=np.int32)
    for u, v in ring:
        adj[u - 1, v - 1] = 1
        out_deg[u - 1] += 1
        in_deg[v - 1] += 1
    flat = rates.ravel()
    cand = np.argsort(-flat, kind="stable").astype(np.int64)
    added = _kernels.greedy_add_edges(cand, n, int(cap), out_deg, in_deg, adj)
    extra = [(int(f // n), int(f % n)) for f in added]
    _complete_degrees(extra, adj, out_deg, in_deg, cap)
    edges = ring + [(u + 1, v + 1) for u, v in extra]
    return LogicalTopology.from_edges(n, edges, level)


def _complete_degrees(extra, adj, out_deg, in_deg, cap) -> None:
    """Fill degree budgets the greedy left open at a dead end.

    The greedy can strand a node whose only admissible partner is itself or
    an existing neighbour.  Such a pair (u, v) is closed by swapping out the
    lightest greedy edge (x, y) for (x, v) and (u, y); cycle edges are never
    touched.  0-based, in place.
    """
    while True:
        us = np.flatnonzero(out_deg < cap)
        vs = np.flatnonzero(in_deg < cap)
        if us.size == 0 or vs.size == 0:
            return
        progress = False
        for u in us.tolist():
            for v in vs.tolist():
                if u != v and not adj[u, v]:
                    extra.append((u, v))
                    adj[u, v] = 1
                    out_deg[u] += 1
                    in_deg[v] += 1
                    progress = True
                    break
                for idx in range(len(extra) - 1, -1, -1):
                    x, y = extra[idx]
                    if x != v and y != u and not adj[x, v] and not adj[u, y]:
                        adj[x, y] = 0
                        adj[x, v] = adj[u, y] = 1
                        extra[idx] = (x, v)
                        extra.append((u, y))
                        out_deg[u] += 1
                        in_deg[v] += 1
                        progress = True
                        break
                if progress:
                    break
            if progress:
                break
        if not progress:
            return


def awgr_output_port(i: int, p: int, k: int) -> int:
    """Port that wavelength ``i`` entering port ``p`` leaves from."""
    return (i + p - 2) % k + 1


def awgr_wavelengths(p: int, q: int, k: int, w_intra: int) -> list[int]:
    """Wavelengths in 1..w_intra that an AWGR routes from port p to port q."""
    if not (1 <= p <= k and 1 <= q <= k):
        raise ValueError(f"port out of range 1..{k}: p={p}, q={q}")
    i0 = (q - p) % k + 1
    return list(range(i0, w_intra + 1, k))


def dmux_port(w: int, k: int) -> int:
    """DMUX output port of wavelength ``w``: ceil(w / k)."""
    if w < 1:
        raise ValueError(f"wavelength index must be >= 1, got {w}")
    return -(-w // k)


@dataclass(frozen=True, eq=False)
class MatchingProblem:
    weights: np.ndarray
    forbidden: frozenset = field(default_factory=frozenset)  # 1-based (row, col)
    forbid_diagonal: bool = True

    def mask(self) -> np.ndarray:
        n = self.weights.shape[0]
        m = np.zeros((n, n), dtype=bool)
        if self.forbid_diagonal:
            np.fill_diagonal(m, True)
        for r, c in self.forbidden:
            m[r - 1, c - 1] = True
        return m


def max_weight_perfect_matching(prob: MatchingProblem) -> list[int]:
    """Permutation maximising total weight while avoiding forbidden cells.

    Returns ``sigma`` as a 1-based list with ``sigma[x - 1]`` the column
    matched to row ``x``.  Solved as a min-cost assignment on negated
    weights, forbidden cells carrying a cost that outweighs any feasible
    total.
    """
    w = np.asarray(prob.weights, dtype=float)
    n = w.shape[0]
    if n < 1 or w.shape != (n, n):
        raise ValueError(f"weights must be a non-empty square matrix, got {w.shape}")
    forbidden = prob.mask()
    big = float(np.abs(w).max()) if w.size else 0.0
    sentinel = 2.0 * n * big + 1.0
    cost = np.where(forbidden, sentinel, -w)
    col = _kernels.hungarian(np.ascontiguousarray(cost))
    if forbidden[np.arange(n), col].any():
        raise InfeasibleMatching(f"no perfect matching avoids the {int(forbidden.sum())} forbidden pairs (n={n})")
    return [int(c) + 1 for c in col]


def configure_inter_topology(ct, d: int) -> LogicalTopology:
    """Cluster-level topology with out- and in-degree exactly ``d``.

    A traffic cycle gives connectivity; each of the ``d - 1`` further rounds
    adds the max-traffic perfect matching that avoids self-loops and edges
    already chosen, then zeroes the traffic it covered.
    """
    ct = np.asarray(ct, dtype=float)
    C = ct.shape[0]
    if C < 2:
        raise ValueError(f"need at least 2 clusters, got {C}")
    if d < 1 or d > C - 1:
        raise ValueError(f"d must lie in [1, C-1] = [1, {C - 1}], got {d}")
    edges = cycle_edges(greedy_traffic_cycle(ct + ct.T))
    chosen = set(edges)
    residual = ct.copy()
    np.fill_diagonal(residual, 0.0)
    for rnd in range(1, d):
        try:
            sigma = max_weight_perfect_matching(MatchingProblem(residual, frozenset(chosen)))
        except InfeasibleMatching as exc:
            raise TopologyError(f"matching round {rnd} infeasible (C={C}, d={d})") from exc
        for x, y in enumerate(sigma, 1):
            chosen.add((x, y))
            edges.append((x, y))
            residual[x - 1, y - 1] = 0.0
    return LogicalTopology.from_edges(C, edges, Level.CLUSTER)


def split_largest_remainder(total: int, weights: Iterable[float]) -> list[int]:
    """Integer split of ``total`` proportional to ``weights``, each part >= 1.

    Floors of the exact quotas are topped up by largest fractional part
    (ties to the lower index).  All-zero weights split evenly.
    """
    w = np.asarray(list(weights), dtype=float)
    n = w.size
    if n == 0:
        return []
    if total < n:
        raise ValueError(f"cannot give {n} parts at least 1 each from {total}")
    if w.sum() <= 0:
        w = np.ones(n)
    quota = total * w / w.sum()
    base = np.floor(quota).astype(np.int64)
    frac = quota - base
    bumped = base == 0
    base[bumped] = 1
    left = total - int(base.sum())
    if left > 0:
        order = sorted(np.flatnonzero(~bumped).tolist(), key=lambda i: (-frac[i], i))
        for i in order[:left]:
            base[i] += 1
    while left < 0:
        # take back from the largest parts, smallest remainder first
        donors = [i for i in range(n) if base[i] > 1]
        i = min(donors, key=lambda i: (-base[i], frac[i], i))
        base[i] -= 1
        left += 1
    return base.tolist()


@dataclass(frozen=True, eq=False)
class WavelengthPlan:
    """Intra edges map (cluster, p, q) to AWGR wavelength indices; inter
    edges map (x, y) to a wavelength count."""

    intra: dict
    inter: dict


def allocate_inter_wavelengths(topo: LogicalTopology, traffic, w_inter: int) -> dict[tuple[int, int], int]:
    """Split each cluster's egress wavelengths over its out-edges.

    ``traffic[x-1, y-1]`` is the demand used for edge (x, y): routed edge
    load, or the raw cluster traffic as a pre-routing estimate.
    """
    traffic = np.asarray(traffic, dtype=float)
    out: dict[int, list[tuple[int, int]]] = {}
    for (x, y) in topo.edges:
        out.setdefault(x, []).append((x, y))
    plan = {}
    for x, es in out.items():
        if len(es) > w_inter:
            raise ValueError(f"cluster {x} has out-degree {len(es)} > w_inter={w_inter}")
        counts = split_largest_remainder(w_inter, [traffic[a - 1, b - 1] for a, b in es])
        plan.update(zip(es, counts))
    return plan


def intra_wavelength_plan(intra: dict[int, LogicalTopology], k: int, w_intra: int) -> dict:
    """Lowest admissible AWGR wavelength for every intra-cluster edge."""
    plan = {}
    for c, topo in intra.items():
        for (p, q) in topo.edges:
            plan[(c, p, q)] = awgr_wavelengths(p, q, k, w_intra)[:topo.edges[(p, q)]]
    return plan
