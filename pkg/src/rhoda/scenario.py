"""End-to-end pipelines: configure -> route -> measure, plus the two-phase
reconfigurability ablation and the baseline fabrics."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import baselines
from .clustering import configure_clusters
from .model import (
    ClusterAssignment,
    DcnParams,
    FlowSet,
    LogicalTopology,
    MetricsReport,
    TrafficMatrix,
    aggregate_cluster_traffic,
    as_matrix,
    validate_params,
)
from .routing import RoutePlan, WavelengthDemand, route_fabric, route_rhoda, shortest_paths, wavelength_demand
from .topology import (
    WavelengthPlan,
    allocate_inter_wavelengths,
    configure_inter_topology,
    configure_intra_topology,
    intra_wavelength_plan,
)

MODES = ("full", "no-mr", "no-tr", "no-mtr")
ARCHITECTURES = ("rhoda", "fattree", "wavecube", "osa")


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class RhodaConfig:
    """One complete RHODA configuration."""

    params: DcnParams
    assignment: ClusterAssignment
    intra: dict[int, LogicalTopology]
    inter: LogicalTopology | None
    wavelengths: WavelengthPlan

    def topologies(self) -> dict:
        return {"intra": self.intra, "inter": self.inter}


def configure_rhoda(
    traffic: TrafficMatrix | FlowSet,
    p: DcnParams,
    assignment: ClusterAssignment | None = None,
    inter: LogicalTopology | None = None,
) -> RhodaConfig:
    """Configure RHODA for ``traffic``.

    Passing ``assignment`` or ``inter`` freezes that part (as in the
    ablations); intra-cluster topologies are always rebuilt.  A frozen inter
    topology keeps its wavelength allocation.
    """
    validate_params(p)
    tm = as_matrix(traffic, p.M)
    a = assignment if assignment is not None else configure_clusters(tm, p)
    a.check(p)
    intra = {}
    if p.k >= 2:
        for c, m in enumerate(a.members, 1):
            idx = m - 1
            intra[c] = configure_intra_topology(tm.rates[np.ix_(idx, idx)], p.t_intra)
    if p.C >= 2 and inter is None:
        ct = aggregate_cluster_traffic(tm, a, p.C)
        topo = configure_inter_topology(ct, p.d)
        _, edge_load = shortest_paths(topo).loads(ct)
        inter = topo.with_wavelengths(allocate_inter_wavelengths(topo, edge_load, p.w_inter))
    plan = WavelengthPlan(
        intra=intra_wavelength_plan(intra, p.k, p.w_intra),
        inter=dict(inter.edges) if inter is not None else {},
    )
    return RhodaConfig(p, a, intra, inter, plan)


@dataclass(frozen=True, eq=False)
class RunResult:
    scenario: str
    plan: RoutePlan
    report: MetricsReport
    wavelengths: WavelengthDemand | None
    config: RhodaConfig | None = None
    topology: LogicalTopology | None = None
    meta: dict = field(default_factory=dict)

    def row(self) -> dict:
        r = self.report
        return {
            "scenario": self.scenario,
            "avg_hops": r.avg_hops,
            "avg_switch_load_gbps": r.avg_switch_load_gbps,
            "max_switch_load_gbps": r.max_switch_load_gbps,
            "total_ingress_gbps": r.total_ingress_gbps,
            "wavelengths_needed": "" if self.wavelengths is None else self.wavelengths.total,
        }


def check_report(report: MetricsReport, rel_tol: float = 1e-9) -> None:
    err = report.load_identity_error()
    if not err <= rel_tol:
        raise InvariantViolation(f"load identity violated: relative error {err:.3e} > {rel_tol:g}")


def run_rhoda(traffic, cfg: RhodaConfig, scenario: str = "rhoda") -> RunResult:
    plan, report = route_rhoda(traffic, cfg.assignment, cfg.intra, cfg.inter)
    check_report(report)
    wl = wavelength_demand(plan, cfg.topologies(), cfg.params.wl_capacity_gbps)
    return RunResult(scenario, plan, report, wl, config=cfg)


def run_baseline(arch: str, traffic, p: DcnParams, osa_degree: int = 4, beta_rule: str = "even") -> RunResult:
    tm = as_matrix(traffic, p.M)
    if arch == "fattree":
        beta = baselines.fattree_beta(p.M, beta_rule)
        topo = baselines.fattree_topology(p.M, beta)
        plan, report = route_fabric(tm, topo, p.M, baselines.fattree_switch_count(beta))
        wl = None  # electrical fabric
        meta = {"beta": beta}
    elif arch == "wavecube":
        topo = baselines.wavecube_topology(p.M)
        plan, report = route_fabric(tm, topo, p.M, p.M)
        wl = wavelength_demand(plan, {"fabric": topo}, p.wl_capacity_gbps)
        meta = {}
    elif arch == "osa":
        topo = baselines.osa_configure(tm, osa_degree)
        plan, report = route_fabric(tm, topo, p.M, p.M)
        wl = wavelength_demand(plan, {"fabric": topo}, p.wl_capacity_gbps)
        meta = {"degree": osa_degree}
    else:
        raise ValueError(f"unknown architecture {arch!r}; choose from {ARCHITECTURES}")
    check_report(report)
    return RunResult(arch, plan, report, wl, topology=topo, meta=meta)


def run_ablation(t1, t2, p: DcnParams, modes=MODES) -> list[RunResult]:
    """Two-phase reconfigurability study.

    Phase 1 configures everything for ``t1``.  Phase 2 routes ``t2`` after
    re-configuring only what the mode allows: ``no-mr`` keeps the phase-1
    cluster membership, ``no-tr`` keeps the phase-1 inter-cluster topology
    and wavelengths, ``no-mtr`` keeps both.
    """
    for m in modes:
        if m not in MODES:
            raise ValueError(f"unknown mode {m!r}; choose from {MODES}")
    cfg1 = configure_rhoda(t1, p)
    phase1 = run_rhoda(t1, cfg1)
    results = []
    for m in modes:
        results.append(replace(phase1, scenario=f"rhoda:{m}:phase1"))
        freeze_a = cfg1.assignment if m in ("no-mr", "no-mtr") else None
        freeze_i = cfg1.inter if m in ("no-tr", "no-mtr") else None
        cfg2 = configure_rhoda(t2, p, assignment=freeze_a, inter=freeze_i)
        results.append(run_rhoda(t2, cfg2, scenario=f"rhoda:{m}:phase2"))
    return results
