"""Flow-level simulator for a hierarchical, reconfigurable optical data-center
network (RHODA) and its FatTree / WaveCube / OSA-like comparison fabrics."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    ClusterAssignment,
    DcnParams,
    FlowSet,
    Level,
    LogicalTopology,
    MetricsReport,
    ParamsError,
    TrafficMatrix,
    aggregate_cluster_traffic,
    validate_params,
)
from .traffic import ClusteredPatternSpec, FanoutPatternSpec, gen_clustered, gen_fanout  # noqa: E402
from .clustering import configure_clusters  # noqa: E402
from .topology import (  # noqa: E402
    MatchingProblem,
    allocate_inter_wavelengths,
    awgr_wavelengths,
    configure_inter_topology,
    configure_intra_topology,
    dmux_port,
    greedy_traffic_cycle,
    max_weight_perfect_matching,
)
from .routing import all_pairs_hops, avg_hops, route_fabric, route_rhoda, switch_loads, wavelength_demand  # noqa: E402
from .scenario import configure_rhoda, run_ablation, run_baseline, run_rhoda  # noqa: E402

__all__ = [
    "ClusterAssignment", "DcnParams", "FlowSet", "Level", "LogicalTopology", "MetricsReport",
    "ParamsError", "TrafficMatrix", "aggregate_cluster_traffic", "validate_params",
    "ClusteredPatternSpec", "FanoutPatternSpec", "gen_clustered", "gen_fanout",
    "configure_clusters", "MatchingProblem", "allocate_inter_wavelengths", "awgr_wavelengths",
    "configure_inter_topology", "configure_intra_topology", "dmux_port", "greedy_traffic_cycle",
    "max_weight_perfect_matching", "all_pairs_hops", "avg_hops", "route_fabric", "route_rhoda",
    "switch_loads", "wavelength_demand", "configure_rhoda", "run_ablation", "run_baseline", "run_rhoda",
]
