"""Command-line runner.

    rhoda gen-traffic --config scenario.toml --out out/
    rhoda simulate    --config scenario.toml [--arch rhoda] [--mode no-mr]
    rhoda costmodel   [--config cost.toml]
    rhoda scalability [--config scale.toml]

Outputs are computed in full before anything is written, so a failed
invariant never leaves a partial CSV behind.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, _kernels, cost, io
from .config import ConfigError, Scenario, load, loads
from .model import FlowSet, TrafficMatrix, as_matrix, flows_from_matrix
from .scenario import ARCHITECTURES, MODES, InvariantViolation, run_ablation, run_baseline
from .traffic import gen_clustered, gen_fanout

log = logging.getLogger("rhoda")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class CliError(Exception):
    pass


def _scenario(args, need_params: bool = True) -> Scenario:
    sc = load(args.config) if args.config else loads("")
    if need_params and sc.params is None:
        raise CliError(f"{args.config}: [params] section with M and k is required")
    if getattr(args, "seed", None) is not None:
        sc.traffic.seed = args.seed
        sc.traffic.phase2_seed = None  # phase 2 follows as seed + 1
    if getattr(args, "arch", None):
        sc.mode.architecture = args.arch
    if getattr(args, "mode", None):
        sc.mode.ablation = [args.mode]
    return sc


def _out_dir(args, sc: Scenario) -> Path:
    return Path(args.out) if args.out else sc.output.dir


def make_traffic(sc: Scenario, phase: int) -> TrafficMatrix | FlowSet:
    seed = sc.traffic.seeds()[phase - 1]
    pat = sc.traffic.pattern
    if pat == "clustered":
        return gen_clustered(sc.clustered_spec(seed))
    if pat == "fanout":
        return gen_fanout(sc.fanout_spec(seed))
    path = sc.traffic.file if phase == 1 else sc.traffic.phase2_file
    if path is None:
        raise CliError("pattern 'file' needs traffic.phase2_file for the second phase")
    return _read_traffic(path)


def _read_traffic(path: Path):
    if not path.is_file():
        raise CliError(f"traffic file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        head = fh.readline().strip()
    return io.read_flows(path) if head.replace(" ", "") == "src,dst,gbps" else io.read_matrix(path)


def _write_traffic(path: Path, traffic, fmt: str, M: int) -> None:
    if fmt == "auto":
        fmt = "flows" if isinstance(traffic, FlowSet) else "matrix"
    if fmt == "matrix":
        io.write_matrix(path, as_matrix(traffic, M))
    elif isinstance(traffic, FlowSet):
        io.write_flows(path, traffic)
    else:
        io.write_flows(path, flows_from_matrix(traffic))


def cmd_gen_traffic(args) -> int:
    sc = _scenario(args)
    t = make_traffic(sc, 1)
    out = _out_dir(args, sc)
    path = out / "traffic.csv" if out.suffix != ".csv" else out
    _write_traffic(path, t, sc.output.traffic_format, sc.params.M)
    log.info("wrote %s", path)
    return EXIT_OK


def _metadata(sc: Scenario, results) -> dict:
    p = sc.params
    return {
        "tool": "rhoda",
        "version": __version__,
        "architecture": sc.mode.architecture,
        "ablation_modes": sc.mode.ablation if sc.mode.architecture == "rhoda" else [],
        "intra_cluster_topology": "always reconfigured in every phase and mode",
        "seeds": {"phase1": sc.traffic.seeds()[0], "phase2": sc.traffic.seeds()[1]},
        "traffic_pattern": sc.traffic.pattern,
        "params": {
            "M": p.M, "k": p.k, "C": p.C, "d": p.d, "t_intra": p.t_intra, "t_inter": p.t_inter,
            "w_intra": p.w_intra, "w_inter": p.w_inter, "wl_capacity_gbps": p.wl_capacity_gbps,
            "alpha_ccs": p.alpha_ccs,
        },
        "switch_count": results[0].report.switch_count if results else None,
        "wavelength_violations": {r.scenario: len(r.wavelengths.violations) for r in results if r.wavelengths is not None},
    }


def simulate(sc: Scenario) -> list:
    """Run the configured two-phase study; returns RunResults in row order."""
    arch = sc.mode.architecture
    t1 = make_traffic(sc, 1)
    t2 = make_traffic(sc, 2)
    if arch == "rhoda":
        return run_ablation(t1, t2, sc.params, sc.mode.ablation)
    out = []
    for phase, t in ((1, t1), (2, t2)):
        r = run_baseline(arch, t, sc.params, sc.mode.osa_degree, sc.mode.fattree_beta_rule)
        out.append(replace(r, scenario=f"{arch}:phase{phase}"))
    return out


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    if sc.mode.architecture not in ARCHITECTURES:
        raise CliError(f"unknown architecture {sc.mode.architecture!r}; choose from {ARCHITECTURES}")
    results = simulate(sc)
    out = _out_dir(args, sc)
    io.write_metrics(out / "metrics.csv", [r.row() for r in results])
    io.write_json(out / "metadata.json", _metadata(sc, results))
    if sc.output.write_topologies:
        _write_configs(out, results)
    for r in results:
        log.info("%-22s avg_hops=%.4f max_load=%.1f Gbps", r.scenario, r.report.avg_hops, r.report.max_switch_load_gbps)
    return EXIT_OK


def _write_configs(out: Path, results) -> None:
    seen = set()
    for r in results:
        tag = r.scenario.replace(":", "_")
        if r.config is not None and id(r.config) not in seen:
            seen.add(id(r.config))
            io.write_assignment(out / f"{tag}_assignment.csv", r.config.assignment)
            if r.config.inter is not None:
                io.write_topology(out / f"{tag}_inter.csv", r.config.inter)
            for c, topo in r.config.intra.items():
                io.write_topology(out / f"{tag}_intra_{c}.csv", topo)
        elif r.topology is not None:
            io.write_topology(out / f"{tag}_topology.csv", r.topology)


def costmodel(sc: Scenario):
    cs = sc.cost
    units = cost.load_units(cs.unit_table)
    comps = list(units)
    sweep, sav = [], []
    for M in cs.racks:
        s = cost.CostScenario(
            M, cs.servers_per_rack, cs.R, cs.export_fraction, cs.d, cs.k, cs.intra_degree,
            cs.beta_rule, cs.wl_capacity_gbps, cs.integer_transceivers,
        )
        for arch in cost.ARCHITECTURES:
            counts = cost.COUNTERS[arch](s)
            rep = cost.bill(counts, units)
            row = {"M": M, "architecture": arch, "power_watts": rep.watts, "cost_dollars": rep.dollars}
            row.update({c: float(counts.get(c, 0.0)) for c in comps})
            sweep.append(row)
        sav.append({"M": M, **cost.savings(s, units)})
    return comps, sweep, sav


def cmd_costmodel(args) -> int:
    sc = _scenario(args, need_params=False)
    comps, sweep, sav = costmodel(sc)
    out = _out_dir(args, sc)
    io.write_rows(out / "cost_sweep.csv", ["M", "architecture", "power_watts", "cost_dollars", *comps], sweep)
    io.write_rows(out / "cost_savings.csv", ["M", "power_vs_fattree", "cost_vs_fattree", "power_vs_wavecube", "cost_vs_wavecube"], sav)
    return EXIT_OK


def scalability(sc: Scenario) -> list[dict]:
    s = sc.scalability
    kw = dict(
        servers_per_rack=s.servers_per_rack, server_rate_gbps=s.server_rate_gbps,
        local_fraction=s.local_fraction, awgr_limit=s.awgr_limit, osw_limit=s.osw_limit,
        wl_capacity_gbps=s.wl_capacity_gbps,
    )
    rows = [{"W": W, "servers": cost.scalability_max_servers(W, **kw)} for W in s.wavelengths]
    if s.include_unlimited:
        rows.append({"W": "unlimited", "servers": cost.scalability_max_servers(None, **kw)})
    return rows


def cmd_scalability(args) -> int:
    sc = _scenario(args, need_params=False)
    rows = scalability(sc)
    io.write_rows(_out_dir(args, sc) / "scalability.csv", ["W", "servers"], rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rhoda", description="Hierarchical reconfigurable optical DCN simulator")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="scenario TOML file")
        p.add_argument("--out", help="output directory (overrides [output] dir)")

    p = sub.add_parser("gen-traffic", help="write the phase-1 traffic of a scenario")
    common(p)
    p.add_argument("--seed", type=int, help="traffic seed (overrides [traffic] seed)")
    p.set_defaults(func=cmd_gen_traffic)

    p = sub.add_parser("simulate", help="two-phase configure/route/measure run")
    common(p)
    p.add_argument("--seed", type=int, help="phase-1 traffic seed (overrides [traffic] seed)")
    p.add_argument("--arch", choices=ARCHITECTURES)
    p.add_argument("--mode", choices=MODES, help="single ablation mode (rhoda only)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("costmodel", help="power / CapEx sweep over rack counts")
    common(p, config_required=False)
    p.set_defaults(func=cmd_costmodel)

    p = sub.add_parser("scalability", help="max servers per wavelength budget")
    common(p, config_required=False)
    p.set_defaults(func=cmd_scalability)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    log.debug("kernel backend: %s", _kernels.BACKEND)
    try:
        return args.func(args)
    except (ConfigError, CliError) as exc:
        print(f"rhoda: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"rhoda: invariant violated, nothing written: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (FileNotFoundError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"rhoda: error: {msg}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
