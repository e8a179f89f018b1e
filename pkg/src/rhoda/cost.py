"""Power / CapEx model for FatTree, WaveCube and RHODA, plus the scalability
calculator.

Traffic quantities are in Gbps; transceiver counts are in units of one
100 Gbps transceiver and stay fractional unless ``integer_transceivers`` is
set.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .baselines import fattree_beta

ARCHITECTURES = ("fattree", "wavecube", "rhoda")


@dataclass(frozen=True)
class ComponentUnit:
    name: str
    power_watts_per_unit: float
    cost_dollars_per_unit: float


def load_units(path: str | Path | None = None) -> dict[str, ComponentUnit]:
    """Read a ``component,watts,dollars`` table (defaults to the shipped one)."""
    if path is None:
        fh = resources.files("rhoda").joinpath("data/table1.csv").open(newline="")
    else:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"unit table not found: {path}")
        fh = path.open(newline="")
    units = {}
    with fh:
        for row in csv.DictReader(fh):
            u = ComponentUnit(row["component"].strip(), float(row["watts"]), float(row["dollars"]))
            if u.power_watts_per_unit < 0 or u.cost_dollars_per_unit < 0:
                raise ValueError(f"negative unit value for {u.name}")
            units[u.name] = u
    return units


@dataclass(frozen=True)
class CostScenario:
    M: int
    servers_per_rack: int = 64
    R: float = 640.0  # per-rack egress, Gbps
    export_fraction: float = 0.10
    d: int = 4
    k: int = 16
    intra_degree: int = 2
    beta_rule: str = "pow2"
    wl_capacity_gbps: float = 100.0
    integer_transceivers: bool = False

    def __post_init__(self):
        # zero is accepted as the no-traffic corner case
        if not 0 <= self.export_fraction <= 1:
            raise ValueError(f"export_fraction must lie in [0, 1], got {self.export_fraction}")
        if self.M < 2:
            raise ValueError(f"M must be >= 2, got {self.M}")

    @property
    def C(self) -> int:
        if self.M % self.k:
            raise ValueError(f"k={self.k} does not divide M={self.M}")
        return self.M // self.k

    @property
    def beta(self) -> int:
        return fattree_beta(self.M, self.beta_rule)

    def _count(self, x: float) -> float:
        return float(math.ceil(x - 1e-9)) if self.integer_transceivers else x


def hypercube_avg_hops(n: int) -> float:
    """Mean distance between distinct nodes of an n-cube: n 2^(n-1) / (2^n - 1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return n * 2 ** (n - 1) / (2 ** n - 1)


def shufflenet_avg_hops(a: int, b: int) -> float:
    """Mean hop distance of an (a, b) unidirectional ShuffleNet."""
    if a < 2:
        raise ValueError(f"ShuffleNet formula needs a >= 2, got {a}")
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b}")
    ab = a ** b
    num = b * ab * (a - 1) * (3 * b - 1) - 2 * b * (ab - 1)
    return num / (2 * (a - 1) * (b * ab - 1))


def shufflenet_columns(population: int, a: int) -> int:
    """Smallest column count b whose (a, b) ShuffleNet has >= population nodes."""
    b = 1
    while b * a ** b < population:
        b += 1
    return b


@dataclass(frozen=True)
class FatTreeLoads:
    beta: int
    t_up_edge: float
    t_up_agg: float
    t_core: float
    t_down_agg: float
    t_down_edge: float
    n_ft: float


def fattree_transceivers(s: CostScenario) -> FatTreeLoads:
    beta, M = s.beta, s.M
    if beta ** 3 // 4 < M:
        raise ValueError(f"beta={beta} too small for M={M}")
    aR = s.export_fraction * s.R
    per_pair = aR / (M - 1)
    total = aR * M
    up_edge = (total - per_pair * (beta / 2 - 1) * M) / (beta ** 2 / 2)
    up_agg = (total - per_pair * (beta ** 2 / 2 - 1) * M) / (beta ** 2 / 2)
    core = (total - per_pair * (beta ** 2 / 2 - 1) * M) / (beta ** 2 / 4)
    down_agg = (total - per_pair * (beta / 2 - 1) * M) / (beta ** 2 / 2)
    down_edge = aR * beta / 2
    n_ft = (beta ** 2 / 2) * (up_edge + up_agg + core / 2 + down_agg + down_edge) / s.wl_capacity_gbps
    return FatTreeLoads(beta, up_edge, up_agg, core, down_agg, down_edge, s._count(n_ft))


def fattree_counts(s: CostScenario) -> dict[str, float]:
    n_ft = fattree_transceivers(s).n_ft
    return {"switch_port": n_ft, "nic": n_ft}


def wavecube_counts(s: CostScenario) -> dict[str, float]:
    M = s.M
    if M & (M - 1):
        raise ValueError(f"WaveCube needs M to be a power of two, got {M}")
    n = M.bit_length() - 1
    load = s.export_fraction * s.R * hypercube_avg_hops(n)
    n_wc = s._count(M * max(load / s.wl_capacity_gbps, n))
    deg = math.ceil(math.log2(M))
    return {
        "sfp_transceiver": n_wc,
        "circulator": deg * M,
        "coupler": M,
        "mux_port": 2 * n_wc,
        "wss_port": deg * M,
    }


@dataclass(frozen=True)
class RhodaLoads:
    h_intra: float
    h_inter: float
    t_intra: float
    t_inter: float
    t_gs: float
    n_r: float
    n_gs: float


def rhoda_loads(s: CostScenario) -> RhodaLoads:
    M, k, C = s.M, s.k, s.C
    per_pair = s.export_fraction * s.R / (M - 1)
    h_intra = shufflenet_avg_hops(s.intra_degree, shufflenet_columns(k, s.intra_degree))
    h_inter = shufflenet_avg_hops(s.d, shufflenet_columns(C, s.d))
    t_intra = per_pair * (k - 1) * h_intra
    t_inter = per_pair * (M - k)
    t_gs = per_pair * (M - k) * k * h_inter
    cap = s.wl_capacity_gbps
    n_r = s._count(M * (t_intra / cap + t_inter / cap))
    n_gs = s._count(C * max(t_gs / cap, s.d))
    return RhodaLoads(h_intra, h_inter, t_intra, t_inter, t_gs, n_r, n_gs)


def rhoda_counts(s: CostScenario) -> dict[str, float]:
    M, k, C, d = s.M, s.k, s.C, s.d
    lo = rhoda_loads(s)
    return {
        "sfp_transceiver": lo.n_r + M + lo.n_gs,
        "circulator": M,
        "mems_port": M + d * C,
        "awgr_port": M,
        "mux_port": (2 * k + d + 1) * C,
        "wss_port": (d + 2) * C + 2 * M,
    }


COUNTERS = {"fattree": fattree_counts, "wavecube": wavecube_counts, "rhoda": rhoda_counts}


@dataclass(frozen=True)
class CostReport:
    watts: float
    dollars: float
    breakdown: dict = field(default_factory=dict)  # name -> (count, watts, dollars)


def bill(counts: Mapping[str, float], units: Mapping[str, ComponentUnit] | None = None) -> CostReport:
    """Total power and CapEx of a component count table."""
    if units is None:
        units = load_units()
    watts = dollars = 0.0
    breakdown = {}
    for name, n in counts.items():
        try:
            u = units[name]
        except KeyError:
            raise KeyError(f"unknown component {name!r}") from None
        w, c = n * u.power_watts_per_unit, n * u.cost_dollars_per_unit
        breakdown[name] = (n, w, c)
        watts += w
        dollars += c
    return CostReport(watts, dollars, breakdown)


def architecture_cost(arch: str, s: CostScenario, units=None) -> CostReport:
    try:
        counter = COUNTERS[arch]
    except KeyError:
        raise ValueError(f"unknown architecture {arch!r}; choose from {ARCHITECTURES}") from None
    return bill(counter(s), units)


def savings(s: CostScenario, units=None) -> dict[str, float]:
    """Fractional RHODA savings in power and dollars versus each baseline."""
    reports = {a: architecture_cost(a, s, units) for a in ARCHITECTURES}
    r = reports["rhoda"]
    out = {}
    for a in ("fattree", "wavecube"):
        out[f"power_vs_{a}"] = 1 - r.watts / reports[a].watts
        out[f"cost_vs_{a}"] = 1 - r.dollars / reports[a].dollars
    return out


def scalability_max_servers(
    W: int | None,
    servers_per_rack: int = 64,
    server_rate_gbps: float = 10.0,
    local_fraction: float = 0.9,
    awgr_limit: int = 512,
    osw_limit: int = 1024,
    wl_capacity_gbps: float = 100.0,
) -> int:
    """Largest server count for ``W`` wavelengths (``None`` = unlimited).

    Rack egress is ``servers_per_rack * server_rate_gbps``; the local share
    bounds W from below, the exported share caps the racks per cluster.
    """
    rack_rate = servers_per_rack * server_rate_gbps
    exported = round(rack_rate * (1 - local_fraction), 9)
    if W is None:
        k = awgr_limit
    else:
        need = math.ceil(round(rack_rate * local_fraction / wl_capacity_gbps, 9))
        if W < need:
            raise ValueError(f"W={W} below the intra-cluster bound of {need} wavelengths")
        k = awgr_limit if exported <= 0 else min(math.floor(round(wl_capacity_gbps * W / exported, 9)), awgr_limit)
    return servers_per_rack * k * osw_limit
