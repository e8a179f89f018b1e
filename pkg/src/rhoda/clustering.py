"""Cluster membership configuration from a rack traffic matrix."""

from __future__ import annotations

import numpy as np

from .model import ClusterAssignment, DcnParams, TrafficMatrix, validate_params


class ClusteringError(RuntimeError):
    pass


def sorted_pairs(weights: np.ndarray, positive_only: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Unordered pairs (i < j, 0-based) by non-increasing weight, ties by (i, j)."""
    n = weights.shape[0]
    iu, ju = np.triu_indices(n, 1)
    w = weights[iu, ju]
    if positive_only:
        keep = w > 0
        iu, ju, w = iu[keep], ju[keep], w[keep]
    order = np.argsort(-w, kind="stable")  # triu order is already lexicographic
    return iu[order], ju[order]


def configure_clusters(t: TrafficMatrix, p: DcnParams) -> ClusterAssignment:
    """Group racks with heavy mutual traffic.

    Pairs are taken by decreasing mutual traffic.  The l-th pair with both
    racks still free goes to cluster ``(l mod C) + 1``, or to the lowest-id
    cluster with two free slots if that one is short.  A pair with one rack
    already placed pulls the other rack into the same cluster when there is
    room.  Racks left over fill the remaining slots in id order, and a
    repair pass then enforces the CCS limit.
    """
    validate_params(p)
    if t.M != p.M:
        raise ValueError(f"traffic is {t.M}x{t.M}, params say M={p.M}")
    M, k, C = p.M, p.k, p.C
    if C == 1:
        return ClusterAssignment(np.ones(M, dtype=np.int64), 1)

    mutual = t.mutual()
    cluster = np.zeros(M, dtype=np.int64)  # 0 = unassigned
    free = np.full(C + 1, k, dtype=np.int64)
    free[0] = 0
    unassigned = M
    placed = 0  # l
    iu, ju = sorted_pairs(mutual)
    for i, j in zip(iu.tolist(), ju.tolist()):
        ci, cj = cluster[i], cluster[j]
        if ci and cj:
            continue
        if ci or cj:
            target = ci or cj
            if free[target] > 0:
                cluster[j if ci else i] = target
                free[target] -= 1
                unassigned -= 1
        else:
            target = (placed + 1) % C + 1
            if free[target] < 2:
                roomy = np.flatnonzero(free >= 2)
                if roomy.size == 0:
                    continue
                target = int(roomy[0])
            cluster[i] = cluster[j] = target
            free[target] -= 2
            unassigned -= 2
            placed += 1
        if unassigned == 0:
            break

    if unassigned:
        slots = np.repeat(np.arange(1, C + 1), free[1:])
        cluster[cluster == 0] = slots

    a = ClusterAssignment(cluster, C)
    if p.alpha_ccs < k:
        a = repair_ccs(a, mutual, p)
    a.check(p)
    return a


def repair_ccs(a: ClusterAssignment, mutual: np.ndarray, p: DcnParams) -> ClusterAssignment:
    """Move racks until every (CCS group, cluster) count is at most alpha_ccs.

    A group holds alpha_ccs*C racks, so a valid assignment places exactly
    alpha_ccs of them in each cluster and groups can be rebalanced one at a
    time.  From an over-full cell the racks with the least traffic to their
    cluster mates leave first; each goes to the short cluster it talks to
    most.  Cluster sizes come out at k because every group ends balanced.
    """
    alpha, C = p.alpha_ccs, p.C
    cluster = a.cluster_of.copy()
    group = np.arange(p.M) // (alpha * C)
    counts = a.ccs_counts(alpha)

    def affinity(r: int, c: int) -> float:
        return float(mutual[r, cluster == c].sum())

    for g in range(counts.shape[0]):
        movers = []
        for c0 in np.flatnonzero(counts[g] > alpha).tolist():
            rs = np.flatnonzero((group == g) & (cluster == c0 + 1)).tolist()
            rs.sort(key=lambda x: (affinity(x, c0 + 1), x))
            movers += rs[: counts[g, c0] - alpha]
        room = {c + 1: alpha - int(counts[g, c]) for c in range(C) if counts[g, c] < alpha}
        for r in movers:
            dest = min(room, key=lambda c: (-affinity(r, c), c))
            cluster[r] = dest
            room[dest] -= 1
            if room[dest] == 0:
                del room[dest]
    out = ClusterAssignment(cluster, C)
    if out.ccs_counts(alpha).max() > alpha:
        raise ClusteringError(f"CCS repair left a (group, cluster) count above alpha_ccs={alpha}")
    return out
