"""Shortest-path routing over logical topologies and the hop/load metrics."""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .model import (
    ClusterAssignment,
    FlowSet,
    LogicalTopology,
    MetricsReport,
    TrafficMatrix,
    aggregate_cluster_traffic,
    as_matrix,
)


class RoutingError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class ShortestPaths:
    """Unit-weight distances and smallest-id next hops (0-based arrays)."""

    topo: LogicalTopology
    dist: np.ndarray
    next_hop: np.ndarray

    def path(self, u: int, v: int) -> list[int]:
        """Lexicographically smallest shortest path, 1-based node ids."""
        if self.dist[u - 1, v - 1] < 0:
            raise RoutingError(f"node {v} unreachable from {u}")
        out = [u]
        while u != v:
            u = int(self.next_hop[u - 1, v - 1]) + 1
            out.append(u)
        return out

    def loads(self, demand: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return _kernels.push_loads(self.dist, self.next_hop, np.ascontiguousarray(demand, dtype=np.float64))


_sp_cache: "weakref.WeakKeyDictionary[LogicalTopology, ShortestPaths]" = weakref.WeakKeyDictionary()


def shortest_paths(topo: LogicalTopology) -> ShortestPaths:
    sp = _sp_cache.get(topo)
    if sp is None:
        indptr, indices = topo.csr
        dist = _kernels.bfs_all_pairs(indptr, indices, topo.node_count)
        nh = _kernels.next_hops(indptr, indices, dist)
        sp = ShortestPaths(topo, dist, nh)
        _sp_cache[topo] = sp
    return sp


def all_pairs_hops(topo: LogicalTopology) -> np.ndarray:
    """Minimum directed edge count between every ordered node pair.

    Edges have unit weight, so this is breadth-first search from each node.
    """
    dist = shortest_paths(topo).dist
    if (dist < 0).any():
        u, v = np.argwhere(dist < 0)[0] + 1
        raise RoutingError(f"topology not strongly connected: {v} unreachable from {u}")
    return dist


@dataclass(frozen=True, eq=False)
class RoutePlan:
    """Routing outcome for every rack pair.

    ``hop_matrix`` gives the hop count of each rack pair; ``path(src, dst)``
    rebuilds the switch sequence on demand.  ``edge_traffic`` holds routed
    Gbps per logical edge, keyed by topology name.
    """

    hop_matrix: np.ndarray
    path_fn: Callable[[int, int], list[int]] = field(repr=False)
    edge_traffic: dict = field(default_factory=dict, repr=False)

    def path(self, src: int, dst: int) -> list[int]:
        return self.path_fn(src, dst)

    def hops(self, src: int, dst: int) -> int:
        return int(self.hop_matrix[src - 1, dst - 1])


def avg_hops(traffic: TrafficMatrix | FlowSet, plan: RoutePlan) -> float:
    """Traffic-weighted mean hop count."""
    if isinstance(traffic, FlowSet):
        total = float(traffic.rate.sum())
        weighted = float((traffic.rate * plan.hop_matrix[traffic.src - 1, traffic.dst - 1]).sum())
    else:
        total = traffic.total
        weighted = float((traffic.rates * plan.hop_matrix).sum())
    if total <= 0:
        raise ValueError("average hops undefined for zero total traffic")
    return weighted / total


def switch_loads(loads: np.ndarray, switch_count: int) -> tuple[np.ndarray, float, float]:
    """(load vector, max, average over ``switch_count``)."""
    loads = np.asarray(loads, dtype=float)
    mx = float(loads.max()) if loads.size else 0.0
    return loads, mx, float(loads.sum()) / switch_count


def _report(tm: TrafficMatrix, hop_matrix: np.ndarray, loads: np.ndarray, switch_count: int) -> MetricsReport:
    total = tm.total
    if total <= 0:
        raise ValueError("cannot compute metrics for zero total traffic")
    ah = float((tm.rates * hop_matrix).sum()) / total
    loads, mx, _ = switch_loads(loads, switch_count)
    return MetricsReport(
        avg_hops=ah,
        hop_matrix=hop_matrix,
        switch_loads_gbps=loads,
        max_switch_load_gbps=mx,
        avg_switch_load_gbps=ah * total / switch_count,
        total_ingress_gbps=total,
        switch_count=switch_count,
        traffic=tm,
    )


def route_rhoda(
    traffic: TrafficMatrix | FlowSet,
    a: ClusterAssignment,
    intra: dict[int, LogicalTopology],
    inter: LogicalTopology,
) -> tuple[RoutePlan, MetricsReport]:
    """Route every flow through the two-level RHODA fabric.

    Flows inside a cluster follow that cluster's rack topology.  A flow
    between clusters goes ToR -> source grooming switch -> ... -> destination
    grooming switch -> ToR, so it costs two hops plus the cluster distance.
    Switch ids: ToR r is r, grooming switch of cluster c is M + c.
    """
    M, C = a.M, a.C
    tm = as_matrix(traffic, M)
    rates = tm.rates
    cl = a.cluster_of - 1
    members = [m - 1 for m in a.members]

    hop = np.zeros((M, M), dtype=np.int64)
    loads = np.zeros(M + C)
    edge_traffic: dict = {"intra": {}, "inter": None}

    intra_sp = {}
    for c in range(1, C + 1):
        m = members[c - 1]
        if m.size < 2:
            continue
        topo = intra[c]
        if topo.node_count != m.size:
            raise RoutingError(f"cluster {c} topology has {topo.node_count} nodes, cluster has {m.size} racks")
        sp = shortest_paths(topo)
        if (sp.dist < 0).any():
            raise RoutingError(f"intra-cluster topology of cluster {c} is not strongly connected")
        intra_sp[c] = sp
        block = np.ix_(m, m)
        node_l, edge_l = sp.loads(rates[block])
        loads[m] += node_l
        edge_traffic["intra"][c] = edge_l

    if C > 1:
        csp = shortest_paths(inter)
        if (csp.dist < 0).any():
            raise RoutingError("inter-cluster topology is not strongly connected")
        hop[:] = 2 + csp.dist[cl[:, None], cl[None, :]]
        ct = aggregate_cluster_traffic(tm, a, C)
        gs_arrive, edge_c = csp.loads(ct)
        loads[M:] = ct.sum(axis=1) + gs_arrive
        cross = cl[:, None] != cl[None, :]
        loads[:M] += np.where(cross, rates, 0.0).sum(axis=0)
        edge_traffic["inter"] = edge_c
    else:
        csp = None
    for c, sp in intra_sp.items():
        m = members[c - 1]
        hop[np.ix_(m, m)] = sp.dist
    np.fill_diagonal(hop, 0)

    local = a.local_index

    def path(src: int, dst: int) -> list[int]:
        if not (1 <= src <= M and 1 <= dst <= M):
            raise RoutingError(f"flow endpoint outside 1..{M}: ({src}, {dst})")
        cs, cd = int(cl[src - 1]) + 1, int(cl[dst - 1]) + 1
        if cs == cd:
            if src == dst:
                return [src]
            grp = members[cs - 1]
            local_path = intra_sp[cs].path(int(local[src - 1]), int(local[dst - 1]))
            return [int(grp[i - 1]) + 1 for i in local_path]
        gs = csp.path(cs, cd)
        return [src] + [M + g for g in gs] + [dst]

    if isinstance(traffic, FlowSet) and len(traffic):
        lo = min(traffic.src.min(), traffic.dst.min())
        hi = max(traffic.src.max(), traffic.dst.max())
        if lo < 1 or hi > M:
            raise RoutingError(f"flow endpoint outside 1..{M}")

    plan = RoutePlan(hop, path, edge_traffic)
    return plan, _report(tm, hop, loads, M + C)


def route_fabric(
    traffic: TrafficMatrix | FlowSet,
    topo: LogicalTopology,
    M: int,
    switch_count: int,
) -> tuple[RoutePlan, MetricsReport]:
    """Route over a single flat graph whose nodes 1..M are the racks.

    Nodes beyond M (e.g. fat-tree switches) are transit-only.
    """
    tm = as_matrix(traffic, M)
    sp = shortest_paths(topo)
    n = topo.node_count
    dist = sp.dist[:M, :M]
    if (dist < 0).any():
        u, v = np.argwhere(dist < 0)[0] + 1
        raise RoutingError(f"rack {v} unreachable from rack {u}")
    demand = np.zeros((n, n))
    demand[:M, :M] = tm.rates
    node_l, edge_l = sp.loads(demand)
    plan = RoutePlan(dist.astype(np.int64), sp.path, {"fabric": edge_l})
    return plan, _report(tm, plan.hop_matrix, node_l, switch_count)


@dataclass(frozen=True)
class WavelengthDemand:
    """Wavelengths each edge needs versus what it was given."""

    demand: dict
    allocated: dict
    violations: list

    @property
    def total(self) -> int:
        return int(sum(self.demand.values()))


def _edge_demand(edge_load: np.ndarray, topo: LogicalTopology, cap: float, key=lambda e: e):
    demand, alloc, bad = {}, {}, []
    for (u, v), w in topo.edges.items():
        need = math.ceil(edge_load[u - 1, v - 1] / cap - 1e-12) if edge_load[u - 1, v - 1] > 0 else 0
        kk = key((u, v))
        demand[kk] = need
        alloc[kk] = w
        if need > w:
            bad.append(kk)
    return demand, alloc, bad


def wavelength_demand(plan: RoutePlan, topologies: dict, wl_capacity_gbps: float) -> WavelengthDemand:
    """Per-edge wavelength demand ``ceil(edge traffic / capacity)``.

    ``topologies`` mirrors ``plan.edge_traffic``: either ``{"fabric": topo}``
    or ``{"intra": {c: topo}, "inter": topo}``.  Capacity never blocks
    routing; edges whose demand exceeds their allocation are only reported.
    """
    demand, alloc, bad = {}, {}, []
    et = plan.edge_traffic
    if "fabric" in et:
        d, a, b = _edge_demand(et["fabric"], topologies["fabric"], wl_capacity_gbps)
        demand.update(d), alloc.update(a), bad.extend(b)
    else:
        for c, load in et["intra"].items():
            d, a, b = _edge_demand(load, topologies["intra"][c], wl_capacity_gbps, key=lambda e, c=c: ("intra", c) + e)
            demand.update(d), alloc.update(a), bad.extend(b)
        if et["inter"] is not None:
            d, a, b = _edge_demand(et["inter"], topologies["inter"], wl_capacity_gbps, key=lambda e: ("inter",) + e)
            demand.update(d), alloc.update(a), bad.extend(b)
    return WavelengthDemand(demand, alloc, bad)
