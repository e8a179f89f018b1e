"""Shared domain types for the RHODA simulator.

All rack, cluster, port and wavelength ids are 1-based.  Dense matrices are
stored 0-based, so ``rates[i - 1, j - 1]`` is the demand from rack ``i`` to
rack ``j``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np


class ParamsError(ValueError):
    """A DcnParams invariant does not hold."""


@dataclass(frozen=True)
class DcnParams:
    M: int
    k: int
    C: int
    m: int = 64
    d: int = 4
    alpha_ccs: int | None = None  # defaults to k (fully flexible CMN)
    t_intra: int = 2
    t_inter: int = 2
    w_intra: int = 128
    w_inter: int = 128
    wl_capacity_gbps: float = 100.0

    def __post_init__(self):
        if self.alpha_ccs is None:
            object.__setattr__(self, "alpha_ccs", self.k)

    @classmethod
    def for_racks(cls, M: int, k: int, **kw) -> DcnParams:
        if k <= 0 or M % k:
            raise ParamsError(f"M != k*C: k={k} does not divide M={M}")
        return cls(M=M, k=k, C=M // k, **kw)

    @property
    def ccs_groups(self) -> int:
        return self.k // self.alpha_ccs

    @property
    def ccs_size(self) -> int:
        """Port count V of one cluster configuration switch."""
        return self.alpha_ccs * self.C


def validate_params(p: DcnParams) -> DcnParams:
    """Return ``p`` unchanged if every structural invariant holds.

    Raises ParamsError naming the first violated invariant.
    """
    for name in ("M", "k", "C", "m", "d", "alpha_ccs", "t_intra", "t_inter", "w_intra", "w_inter"):
        val = getattr(p, name)
        if not isinstance(val, (int, np.integer)) or val < 1:
            raise ParamsError(f"{name} must be a positive integer, got {val!r}")
    if not p.wl_capacity_gbps > 0:
        raise ParamsError("wl_capacity_gbps must be positive")
    if p.M != p.k * p.C:
        raise ParamsError(f"M != k*C ({p.M} != {p.k}*{p.C})")
    if not 1 <= p.alpha_ccs <= p.k:
        raise ParamsError(f"alpha_ccs must lie in [1, k], got {p.alpha_ccs}")
    if p.k % p.alpha_ccs:
        raise ParamsError(f"alpha_ccs must divide k ({p.alpha_ccs} does not divide {p.k})")
    if p.w_intra < p.k:
        raise ParamsError(f"w_intra < k ({p.w_intra} < {p.k})")
    if p.C > 1 and p.d > p.C - 1:
        raise ParamsError(f"d > C-1 ({p.d} > {p.C - 1})")
    return p


@dataclass(frozen=True, eq=False)
class TrafficMatrix:
    """Dense rack-to-rack demand in Gbps."""

    rates: np.ndarray

    def __post_init__(self):
        r = np.array(self.rates, dtype=np.float64)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError(f"traffic matrix must be square, got shape {r.shape}")
        if not np.all(np.isfinite(r)):
            raise ValueError("traffic matrix has non-finite entries")
        if np.any(r < 0):
            raise ValueError("traffic matrix has negative entries")
        if np.any(np.diag(r) != 0):
            raise ValueError("traffic matrix diagonal must be zero")
        r.setflags(write=False)
        object.__setattr__(self, "rates", r)

    @property
    def M(self) -> int:
        return self.rates.shape[0]

    @property
    def total(self) -> float:
        return float(self.rates.sum())

    @classmethod
    def zeros(cls, M: int) -> TrafficMatrix:
        return cls(np.zeros((M, M)))

    def mutual(self) -> np.ndarray:
        return self.rates + self.rates.T


@dataclass(frozen=True, eq=False)
class FlowSet:
    """Individual flows as parallel arrays of (src, dst, rate)."""

    src: np.ndarray
    dst: np.ndarray
    rate: np.ndarray

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64).ravel()
        dst = np.asarray(self.dst, dtype=np.int64).ravel()
        rate = np.asarray(self.rate, dtype=np.float64).ravel()
        if not (src.shape == dst.shape == rate.shape):
            raise ValueError("src, dst and rate must have equal length")
        if np.any(src == dst):
            i = int(np.argmax(src == dst))
            raise ValueError(f"self-flow at rack {src[i]}")
        if np.any(~np.isfinite(rate)) or np.any(rate <= 0):
            raise ValueError("flow rates must be finite and positive")
        for a in (src, dst, rate):
            a.setflags(write=False)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "rate", rate)

    @classmethod
    def from_records(cls, records: Iterable[tuple[int, int, float]]) -> FlowSet:
        recs = list(records)
        if not recs:
            return cls(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0))
        s, d, r = zip(*recs)
        return cls(np.array(s), np.array(d), np.array(r, dtype=float))

    def __len__(self) -> int:
        return self.src.shape[0]

    def __iter__(self) -> Iterator[tuple[int, int, float]]:
        return zip(self.src.tolist(), self.dst.tolist(), self.rate.tolist())


def matrix_from_flows(flows: FlowSet, M: int) -> TrafficMatrix:
    """Sum flows by (src, dst) into a dense matrix."""
    if len(flows):
        lo = min(flows.src.min(), flows.dst.min())
        hi = max(flows.src.max(), flows.dst.max())
        if lo < 1 or hi > M:
            raise ValueError(f"rack id out of range [1, {M}]")
    rates = np.zeros((M, M))
    np.add.at(rates, (flows.src - 1, flows.dst - 1), flows.rate)
    return TrafficMatrix(rates)


def flows_from_matrix(t: TrafficMatrix) -> FlowSet:
    """One flow per non-zero entry, in row-major order."""
    i, j = np.nonzero(t.rates)
    return FlowSet(i + 1, j + 1, t.rates[i, j])


def as_matrix(traffic: TrafficMatrix | FlowSet, M: int) -> TrafficMatrix:
    if isinstance(traffic, FlowSet):
        return matrix_from_flows(traffic, M)
    if traffic.M != M:
        raise ValueError(f"traffic is {traffic.M}x{traffic.M}, expected {M}x{M}")
    return traffic


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """Rack-to-cluster mapping; ``cluster_of[r - 1]`` is rack r's cluster."""

    cluster_of: np.ndarray
    C: int

    def __post_init__(self):
        c = np.asarray(self.cluster_of, dtype=np.int64).copy()
        if c.size and (c.min() < 1 or c.max() > self.C):
            raise ValueError(f"cluster ids must lie in [1, {self.C}]")
        c.setflags(write=False)
        object.__setattr__(self, "cluster_of", c)

    @property
    def M(self) -> int:
        return self.cluster_of.shape[0]

    def __getitem__(self, rack: int) -> int:
        return int(self.cluster_of[rack - 1])

    def sizes(self) -> np.ndarray:
        return np.bincount(self.cluster_of, minlength=self.C + 1)[1:]

    @cached_property
    def members(self) -> tuple[np.ndarray, ...]:
        """Sorted 1-based rack ids per cluster; index 0 is cluster 1."""
        order = np.argsort(self.cluster_of, kind="stable")
        bounds = np.cumsum(self.sizes())[:-1]
        return tuple(g + 1 for g in np.split(order, bounds))

    @cached_property
    def local_index(self) -> np.ndarray:
        """1-based position of each rack inside its cluster (its AWGR port)."""
        loc = np.empty(self.M, dtype=np.int64)
        for group in self.members:
            loc[group - 1] = np.arange(1, group.size + 1)
        return loc

    def ccs_counts(self, alpha_ccs: int) -> np.ndarray:
        """Rack counts per (CCS group, cluster), shape (k/alpha, C)."""
        group = (np.arange(self.M) // (alpha_ccs * self.C))
        n_groups = int(group.max()) + 1 if self.M else 0
        counts = np.zeros((n_groups, self.C), dtype=np.int64)
        np.add.at(counts, (group, self.cluster_of - 1), 1)
        return counts

    def check(self, p: DcnParams) -> None:
        """Raise ValueError unless sizes are k and the CCS rule holds."""
        if self.M != p.M or self.C != p.C:
            raise ValueError("assignment does not match params")
        sizes = self.sizes()
        if np.any(sizes != p.k):
            bad = int(np.argmax(sizes != p.k)) + 1
            raise ValueError(f"cluster {bad} has {sizes[bad - 1]} racks, expected {p.k}")
        counts = self.ccs_counts(p.alpha_ccs)
        if np.any(counts > p.alpha_ccs):
            g, c = np.argwhere(counts > p.alpha_ccs)[0]
            raise ValueError(
                f"CCS group {g + 1} places {counts[g, c]} racks in cluster {c + 1} "
                f"(alpha_ccs={p.alpha_ccs})"
            )


def aggregate_cluster_traffic(t: TrafficMatrix, a: ClusterAssignment, C: int) -> np.ndarray:
    """C×C inter-cluster demand; the diagonal is forced to zero."""
    if a.M != t.M:
        raise ValueError(f"assignment covers {a.M} racks, traffic has {t.M}")
    if a.C != C:
        raise ValueError(f"assignment has {a.C} clusters, expected {C}")
    onehot = np.zeros((t.M, C))
    onehot[np.arange(t.M), a.cluster_of - 1] = 1.0
    ct = onehot.T @ t.rates @ onehot
    np.fill_diagonal(ct, 0.0)
    return ct


class Level(str, enum.Enum):
    RACK = "rack-level"
    CLUSTER = "cluster-level"
    BASELINE = "baseline"


@dataclass(frozen=True, eq=False)
class LogicalTopology:
    """Directed graph over nodes 1..node_count, edge -> wavelength count."""

    node_count: int
    edges: Mapping[tuple[int, int], int]
    level: Level = Level.RACK

    def __post_init__(self):
        edges = dict(sorted((tuple(map(int, e)), int(w)) for e, w in dict(self.edges).items()))
        for (u, v), w in edges.items():
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (1 <= u <= self.node_count and 1 <= v <= self.node_count):
                raise ValueError(f"edge ({u}, {v}) outside 1..{self.node_count}")
            if w < 1:
                raise ValueError(f"edge ({u}, {v}) has wavelength count {w}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[tuple[int, int]], level=Level.RACK, wavelengths: int = 1):
        return cls(n, {(u, v): wavelengths for u, v in pairs}, level)

    def __contains__(self, edge) -> bool:
        return tuple(edge) in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def out_degree(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=np.int64)
        for u, _ in self.edges:
            deg[u - 1] += 1
        return deg

    def in_degree(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=np.int64)
        for _, v in self.edges:
            deg[v - 1] += 1
        return deg

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """0-based (indptr, indices) with each row's neighbours ascending."""
        n = self.node_count
        if self.edges:
            arr = np.array(list(self.edges), dtype=np.int64) - 1
        else:
            arr = np.empty((0, 2), dtype=np.int64)
        # edges are already sorted by (u, v)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, arr[:, 0] + 1, 1)
        indptr = np.cumsum(indptr)
        return indptr, np.ascontiguousarray(arr[:, 1], dtype=np.int32)

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.node_count, self.node_count), dtype=bool)
        for u, v in self.edges:
            adj[u - 1, v - 1] = True
        return adj

    def with_wavelengths(self, counts: Mapping[tuple[int, int], int]) -> LogicalTopology:
        return LogicalTopology(self.node_count, {e: int(counts.get(e, w)) for e, w in self.edges.items()}, self.level)

    def is_strongly_connected(self) -> bool:
        if self.node_count == 1:
            return True
        indptr, indices = self.csr
        # forward reachability from node 1, then on the reversed graph
        rev = LogicalTopology(self.node_count, {(v, u): 1 for u, v in self.edges}, self.level)
        for ip, ix in ((indptr, indices), rev.csr):
            seen = np.zeros(self.node_count, dtype=bool)
            stack = [0]
            seen[0] = True
            while stack:
                u = stack.pop()
                for v in ix[ip[u]:ip[u + 1]]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(int(v))
            if not seen.all():
                return False
        return True


@dataclass(frozen=True, eq=False)
class MetricsReport:
    """Hop and switch-load figures for one routed scenario.

    ``hop_matrix[i-1, j-1]`` is the hop count of rack i -> rack j and is
    meaningful wherever traffic is non-zero.  ``switch_loads_gbps`` is indexed
    by switch id - 1; ids 1..M are ToRs and any further ids are the
    architecture's other switches (grooming switches for RHODA).
    """

    avg_hops: float
    hop_matrix: np.ndarray
    switch_loads_gbps: np.ndarray
    max_switch_load_gbps: float
    avg_switch_load_gbps: float
    total_ingress_gbps: float
    switch_count: int
    traffic: TrafficMatrix = field(repr=False, default=None)

    def per_flow_hops(self, flows: FlowSet | None = None) -> dict[tuple[int, int], int]:
        if flows is None:
            flows = flows_from_matrix(self.traffic)
        return {(s, d): int(self.hop_matrix[s - 1, d - 1]) for s, d, _ in flows}

    def load_identity_error(self) -> float:
        """Relative gap between summed loads and avg_hops * total ingress."""
        lhs = float(self.switch_loads_gbps.sum())
        rhs = self.avg_hops * self.total_ingress_gbps
        return abs(lhs - rhs) / max(abs(rhs), 1e-300)
