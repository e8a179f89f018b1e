"""Comparison fabrics: FatTree, WaveCube (hypercube) and an OSA-like mesh."""

from __future__ import annotations

import numpy as np

from .model import Level, LogicalTopology, TrafficMatrix
from .topology import _degree_bounded_topology


def fattree_beta(M: int, rule: str = "even") -> int:
    """Switch port count for a fat-tree holding ``M`` racks.

    ``even``: smallest even beta with beta^3/4 >= M.
    ``pow2``: smallest power-of-two beta with beta^3/4 >= M.
    """
    if M < 1:
        raise ValueError(f"M must be positive, got {M}")
    beta = 2
    step = (lambda b: b + 2) if rule == "even" else (lambda b: b * 2) if rule == "pow2" else None
    if step is None:
        raise ValueError(f"unknown beta rule {rule!r} (use 'even' or 'pow2')")
    while beta ** 3 // 4 < M:
        beta = step(beta)
    return beta


def fattree_switch_count(beta: int) -> int:
    return 5 * beta * beta // 4


def fattree_hops(rack_u: int, rack_v: int, beta: int) -> int:
    """Switch traversals between two racks: 2 (same edge), 4 (same pod), else 6."""
    cap = beta ** 3 // 4
    for r in (rack_u, rack_v):
        if not 1 <= r <= cap:
            raise ValueError(f"rack {r} outside fat-tree capacity 1..{cap} (beta={beta})")
    if rack_u == rack_v:
        return 0
    half = beta // 2
    eu, ev = (rack_u - 1) // half, (rack_v - 1) // half
    if eu == ev:
        return 2
    if eu // half == ev // half:
        return 4
    return 6


def fattree_topology(M: int, beta: int) -> LogicalTopology:
    """Explicit fat-tree graph: racks 1..M, then edge, aggregation and core
    switches.  Every link is bidirectional."""
    half = beta // 2
    if M > beta ** 3 // 4:
        raise ValueError(f"{M} racks exceed fat-tree capacity {beta ** 3 // 4} (beta={beta})")
    n_edge = beta * half
    edge0 = M + 1
    agg0 = edge0 + n_edge
    core0 = agg0 + n_edge
    links = []
    for r in range(1, M + 1):
        links.append((r, edge0 + (r - 1) // half))
    for pod in range(beta):
        for e in range(half):
            for j in range(half):
                links.append((edge0 + pod * half + e, agg0 + pod * half + j))
        for j in range(half):
            for i in range(half):
                links.append((agg0 + pod * half + j, core0 + j * half + i))
    n = M + fattree_switch_count(beta)
    pairs = links + [(v, u) for u, v in links]
    return LogicalTopology.from_edges(n, pairs, Level.BASELINE)


def _check_pow2(M: int) -> int:
    if M < 2 or M & (M - 1):
        raise ValueError(f"WaveCube needs M to be a power of two, got {M}")
    return M.bit_length() - 1


def wavecube_topology(M: int) -> LogicalTopology:
    """Hypercube over racks: labels (id - 1) differing in one bit are linked."""
    n = _check_pow2(M)
    pairs = [(u + 1, (u ^ (1 << b)) + 1) for u in range(M) for b in range(n)]
    return LogicalTopology.from_edges(M, pairs, Level.BASELINE)


def wavecube_hops(u: int, v: int) -> int:
    """Hamming distance between rack labels (bit-fixing route length)."""
    return bin((u - 1) ^ (v - 1)).count("1")


def osa_configure(t: TrafficMatrix, degree: int = 4) -> LogicalTopology:
    """Flat reconfigurable mesh over all racks.

    Same construction as an intra-cluster topology, applied to the whole
    fabric: a traffic cycle for connectivity, then the heaviest directed
    pairs within the per-rack degree budget.
    """
    if degree < 2:
        raise ValueError(f"OSA degree must be >= 2, got {degree}")
    if t.M < degree + 1:
        raise ValueError(f"OSA needs M >= degree + 1 ({t.M} < {degree + 1})")
    return _degree_bounded_topology(t.rates, degree, Level.BASELINE)


def hop_histogram(hops: np.ndarray) -> dict[int, int]:
    off = hops[~np.eye(hops.shape[0], dtype=bool)]
    vals, counts = np.unique(off, return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))
