"""CSV readers/writers.  Every file uses ``.`` decimals and ``\\n`` line
endings; floats are written with ``repr`` so round trips are exact."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .model import ClusterAssignment, FlowSet, Level, LogicalTopology, TrafficMatrix

METRICS_COLUMNS = (
    "scenario",
    "avg_hops",
    "avg_switch_load_gbps",
    "max_switch_load_gbps",
    "total_ingress_gbps",
    "wavelengths_needed",
)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _open_w(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("w", newline="", encoding="utf-8")


def write_matrix(path, t: TrafficMatrix) -> None:
    """Header-free M x M grid of Gbps values."""
    with _open_w(path) as fh:
        w = _writer(fh)
        for row in t.rates:
            w.writerow([_fmt(v) for v in row])


def read_matrix(path) -> TrafficMatrix:
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    return TrafficMatrix(rows)


def write_flows(path, flows: FlowSet) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["src", "dst", "gbps"])
        for s, d, r in flows:
            w.writerow([s, d, _fmt(r)])


def read_flows(path) -> FlowSet:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(int(r["src"]), int(r["dst"]), float(r["gbps"])) for r in csv.DictReader(fh)]
    return FlowSet.from_records(rows)


def write_assignment(path, a: ClusterAssignment) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["rack", "cluster"])
        for r in range(1, a.M + 1):
            w.writerow([r, a[r]])


def read_assignment(path, C: int) -> ClusterAssignment:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = sorted((int(r["rack"]), int(r["cluster"])) for r in csv.DictReader(fh))
    if [r for r, _ in rows] != list(range(1, len(rows) + 1)):
        raise ValueError(f"{path}: racks must be exactly 1..{len(rows)}")
    return ClusterAssignment(np.array([c for _, c in rows]), C)


def write_topology(path, topo: LogicalTopology) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["src", "dst", "wavelengths"])
        for (u, v), n in sorted(topo.edges.items()):
            w.writerow([u, v, n])


def read_topology(path, n: int, level: Level = Level.RACK) -> LogicalTopology:
    with open(path, newline="", encoding="utf-8") as fh:
        edges = {(int(r["src"]), int(r["dst"])): int(r["wavelengths"]) for r in csv.DictReader(fh)}
    return LogicalTopology(n, edges, level)


def write_rows(path, columns: Iterable[str], rows: Iterable[Mapping]) -> None:
    columns = list(columns)
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c, "")) for c in columns])


def write_metrics(path, rows: Iterable[Mapping]) -> None:
    write_rows(path, METRICS_COLUMNS, rows)


def read_rows(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_json(path, obj) -> None:
    with _open_w(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
