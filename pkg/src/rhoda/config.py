"""Scenario files (TOML).

Sections: ``[params]`` (architecture sizing), ``[traffic]`` (pattern and
seeds), ``[mode]`` (architecture / ablation), ``[output]``, plus ``[cost]``
and ``[scalability]`` for the analytical commands.  Every error carries the
file name and, when it can be located, the offending line.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .model import DcnParams, ParamsError, validate_params
from .scenario import ARCHITECTURES, MODES
from .traffic import RATE_UNITS, ClusteredPatternSpec, FanoutPatternSpec, load_cdf_csv

PATTERNS = ("clustered", "fanout", "file")


class ConfigError(ValueError):
    def __init__(self, msg: str, path=None, line: int | None = None):
        self.path, self.line = path, line
        where = f"{path}" if path is not None else "<config>"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {msg}")


@dataclass
class TrafficSection:
    pattern: str = "clustered"
    seed: int = 1
    phase2_seed: int | None = None
    # clustered
    set_size: int = 16
    per_pair_rate_gbps: float = 1.0
    spill_total_gbps: float = 1.0
    spill_floor_gbps: float = 0.0
    # fanout
    fanout: int = 1023
    cdf: list = field(default_factory=list)
    # file
    file: Path | None = None
    phase2_file: Path | None = None

    def seeds(self) -> tuple[int, int]:
        s2 = self.seed + 1 if self.phase2_seed is None else self.phase2_seed
        return self.seed, s2


@dataclass
class ModeSection:
    architecture: str = "rhoda"
    ablation: list = field(default_factory=lambda: list(MODES))
    osa_degree: int = 4
    fattree_beta_rule: str = "even"


@dataclass
class OutputSection:
    dir: Path = Path("out")
    traffic_format: str = "auto"  # auto | matrix | flows
    write_topologies: bool = False


@dataclass
class CostSection:
    racks: list = field(default_factory=lambda: [2 ** e for e in range(10, 21)])
    servers_per_rack: int = 64
    R: float = 640.0
    export_fraction: float = 0.10
    d: int = 4
    k: int = 16
    intra_degree: int = 2
    beta_rule: str = "pow2"
    wl_capacity_gbps: float = 100.0
    integer_transceivers: bool = False
    unit_table: Path | None = None


@dataclass
class ScalabilitySection:
    wavelengths: list = field(default_factory=lambda: [8, 16, 32, 64, 128, 256, 512, 1024])
    include_unlimited: bool = True
    servers_per_rack: int = 64
    server_rate_gbps: float = 10.0
    local_fraction: float = 0.9
    awgr_limit: int = 512
    osw_limit: int = 1024
    wl_capacity_gbps: float = 100.0


@dataclass
class Scenario:
    path: Path | None
    params: DcnParams | None
    traffic: TrafficSection
    mode: ModeSection
    output: OutputSection
    cost: CostSection
    scalability: ScalabilitySection
    raw: dict = field(default_factory=dict, repr=False)

    def clustered_spec(self, seed: int) -> ClusteredPatternSpec:
        t = self.traffic
        return ClusteredPatternSpec(self.params.M, t.set_size, t.per_pair_rate_gbps, t.spill_total_gbps, seed, t.spill_floor_gbps)

    def fanout_spec(self, seed: int) -> FanoutPatternSpec:
        return FanoutPatternSpec(self.params.M, self.traffic.fanout, self.traffic.cdf, seed)


def _key_line(text: str, section: str, key: str | None) -> int | None:
    """1-based line of ``key`` inside ``[section]`` (or of the header)."""
    current = None
    header = re.compile(r"^\s*\[([^\[\]]+)\]\s*(#.*)?$")
    for no, line in enumerate(text.splitlines(), 1):
        m = header.match(line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return no
            continue
        if current == section and key is not None and re.match(rf"^\s*{re.escape(key)}\s*=", line):
            return no
    return None


_PARAM_KEYS = {
    "M": int, "k": int, "m": int, "d": int, "alpha_ccs": int, "t_intra": int,
    "t_inter": int, "w_intra": int, "w_inter": int, "wl_capacity_gbps": float,
}


class _Reader:
    def __init__(self, data: dict, text: str, path):
        self.data, self.text, self.path = data, text, path

    def fail(self, section: str, key: str | None, msg: str):
        raise ConfigError(msg, self.path, _key_line(self.text, section, key))

    def section(self, name: str) -> dict:
        sec = self.data.get(name, {})
        if not isinstance(sec, dict):
            self.fail(name, None, f"[{name}] must be a table")
        return sec

    def get(self, sec: str, key: str, typ, default):
        table = self.section(sec)
        if key not in table:
            return default
        v = table[key]
        if typ is float and isinstance(v, int) and not isinstance(v, bool):
            v = float(v)
        if typ is int and isinstance(v, bool) or not isinstance(v, typ):
            name = typ.__name__ if isinstance(typ, type) else "/".join(t.__name__ for t in typ)
            self.fail(sec, key, f"{sec}.{key} must be {name}, got {type(v).__name__} {v!r}")
        return v

    def unknown(self, sec: str, allowed) -> None:
        for key in self.section(sec):
            if key not in allowed:
                self.fail(sec, key, f"unknown key {sec}.{key}")

    def resolve(self, p: str) -> Path:
        p = Path(p)
        if not p.is_absolute() and self.path is not None:
            p = Path(self.path).parent / p
        return p


def loads(text: str, path=None) -> Scenario:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"malformed TOML: {exc}", path, int(m.group(1)) if m else None) from None
    rd = _Reader(data, text, path)
    for name in data:
        if name not in ("params", "traffic", "mode", "output", "cost", "scalability"):
            rd.fail(name, None, f"unknown section [{name}]")

    params = None
    if "params" in data:
        rd.unknown("params", _PARAM_KEYS)
        kw = {k: rd.get("params", k, t, None) for k, t in _PARAM_KEYS.items()}
        kw = {k: v for k, v in kw.items() if v is not None}
        for req in ("M", "k"):
            if req not in kw:
                rd.fail("params", None, f"[params] needs {req}")
        try:
            params = validate_params(DcnParams.for_racks(**kw))
        except ParamsError as exc:
            # blame the key named earliest in the message
            hits = [(m.start(), k) for k in kw if (m := re.search(rf"\b{k}\b", str(exc)))]
            key = min(hits)[1] if hits else None
            rd.fail("params", key, str(exc))

    tr = TrafficSection()
    rd.unknown("traffic", set(TrafficSection.__dataclass_fields__) | {"cdf_file", "cdf_unit"})
    tr.pattern = rd.get("traffic", "pattern", str, tr.pattern)
    if tr.pattern not in PATTERNS:
        rd.fail("traffic", "pattern", f"unknown traffic pattern {tr.pattern!r}; choose from {PATTERNS}")
    tr.seed = rd.get("traffic", "seed", int, tr.seed)
    tr.phase2_seed = rd.get("traffic", "phase2_seed", int, None)
    tr.set_size = rd.get("traffic", "set_size", int, tr.set_size)
    tr.per_pair_rate_gbps = rd.get("traffic", "per_pair_rate_gbps", float, tr.per_pair_rate_gbps)
    tr.spill_total_gbps = rd.get("traffic", "spill_total_gbps", float, tr.spill_total_gbps)
    tr.spill_floor_gbps = rd.get("traffic", "spill_floor_gbps", float, tr.spill_floor_gbps)
    tr.fanout = rd.get("traffic", "fanout", int, tr.fanout)
    unit = rd.get("traffic", "cdf_unit", str, "gbps")
    if unit not in RATE_UNITS:
        rd.fail("traffic", "cdf_unit", f"unknown rate unit {unit!r}; choose from {sorted(RATE_UNITS)}")
    inline = rd.get("traffic", "cdf", list, None)
    cdf_file = rd.get("traffic", "cdf_file", str, None)
    if inline is not None and cdf_file is not None:
        rd.fail("traffic", "cdf", "give either traffic.cdf or traffic.cdf_file, not both")
    if inline is not None:
        try:
            tr.cdf = [(float(r) * RATE_UNITS[unit], float(q)) for r, q in inline]
        except (TypeError, ValueError):
            rd.fail("traffic", "cdf", "traffic.cdf must be a list of [rate, cumulative_probability] pairs")
    elif cdf_file is not None:
        try:
            tr.cdf = load_cdf_csv(rd.resolve(cdf_file), unit)
        except (OSError, ValueError) as exc:
            rd.fail("traffic", "cdf_file", str(exc))
    elif tr.pattern == "fanout":
        from importlib import resources
        # the shipped CDF is already in Gbps; cdf_unit applies to user CDFs only
        with resources.as_file(resources.files("rhoda").joinpath("data/facebook_cdf.csv")) as p:
            tr.cdf = load_cdf_csv(p, "gbps")
    for key in ("file", "phase2_file"):
        v = rd.get("traffic", key, str, None)
        if v is not None:
            setattr(tr, key, rd.resolve(v))
    if tr.pattern == "file" and tr.file is None:
        rd.fail("traffic", "pattern", "pattern 'file' needs traffic.file")
    if params is not None and tr.pattern == "clustered" and params.M % tr.set_size:
        rd.fail("traffic", "set_size", f"set_size must divide M (set_size={tr.set_size}, M={params.M})")
    if params is not None and tr.pattern == "fanout" and not 1 <= tr.fanout <= params.M - 1:
        rd.fail("traffic", "fanout", f"fanout must lie in [1, M-1] = [1, {params.M - 1}], got {tr.fanout}")

    md = ModeSection()
    rd.unknown("mode", ModeSection.__dataclass_fields__)
    md.architecture = rd.get("mode", "architecture", str, md.architecture)
    if md.architecture not in ARCHITECTURES:
        rd.fail("mode", "architecture", f"unknown architecture {md.architecture!r}; choose from {ARCHITECTURES}")
    abl = rd.get("mode", "ablation", (str, list), md.ablation)
    md.ablation = list(MODES) if abl == "all" else [abl] if isinstance(abl, str) else list(abl)
    for m in md.ablation:
        if m not in MODES:
            rd.fail("mode", "ablation", f"unknown mode {m!r}; choose from {MODES}")
    md.osa_degree = rd.get("mode", "osa_degree", int, md.osa_degree)
    md.fattree_beta_rule = rd.get("mode", "fattree_beta_rule", str, md.fattree_beta_rule)
    if md.fattree_beta_rule not in ("even", "pow2"):
        rd.fail("mode", "fattree_beta_rule", f"unknown beta rule {md.fattree_beta_rule!r}")

    out = OutputSection()
    rd.unknown("output", OutputSection.__dataclass_fields__)
    out.dir = Path(rd.get("output", "dir", str, str(out.dir)))  # relative to the cwd
    out.traffic_format = rd.get("output", "traffic_format", str, out.traffic_format)
    if out.traffic_format not in ("auto", "matrix", "flows"):
        rd.fail("output", "traffic_format", "traffic_format must be auto, matrix or flows")
    out.write_topologies = rd.get("output", "write_topologies", bool, out.write_topologies)

    cs = CostSection()
    rd.unknown("cost", set(CostSection.__dataclass_fields__) | {"rack_exponents"})
    exps = rd.get("cost", "rack_exponents", list, None)
    racks = rd.get("cost", "racks", list, None)
    if exps is not None and racks is not None:
        rd.fail("cost", "racks", "give either cost.racks or cost.rack_exponents, not both")
    if exps is not None:
        cs.racks = [2 ** int(e) for e in exps]
    elif racks is not None:
        cs.racks = [int(r) for r in racks]
    for key, typ in (("servers_per_rack", int), ("R", float), ("export_fraction", float), ("d", int),
                     ("k", int), ("intra_degree", int), ("beta_rule", str), ("wl_capacity_gbps", float),
                     ("integer_transceivers", bool)):
        setattr(cs, key, rd.get("cost", key, typ, getattr(cs, key)))
    ut = rd.get("cost", "unit_table", str, None)
    cs.unit_table = rd.resolve(ut) if ut is not None else None

    sc = ScalabilitySection()
    rd.unknown("scalability", ScalabilitySection.__dataclass_fields__)
    wl = rd.get("scalability", "wavelengths", list, sc.wavelengths)
    if not all(isinstance(w, int) and not isinstance(w, bool) and w > 0 for w in wl):
        rd.fail("scalability", "wavelengths", "scalability.wavelengths must be positive integers")
    sc.wavelengths = list(wl)
    for key, typ in (("include_unlimited", bool), ("servers_per_rack", int), ("server_rate_gbps", float),
                     ("local_fraction", float), ("awgr_limit", int), ("osw_limit", int), ("wl_capacity_gbps", float)):
        setattr(sc, key, rd.get("scalability", key, typ, getattr(sc, key)))

    return Scenario(Path(path) if path is not None else None, params, tr, md, out, cs, sc, data)


PRESETS = ("clustered16", "clustered48", "fanout", "cost", "scalability")


def preset_path(name: str) -> Path:
    from importlib import resources
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    return Path(str(resources.files("rhoda").joinpath(f"data/{name}.toml")))


def load(path) -> Scenario:
    """Read a scenario file; a bare preset name picks the shipped preset."""
    path = Path(path)
    if not path.exists() and str(path) in PRESETS:
        path = preset_path(str(path))
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError("config file not found", path) from None
    return loads(text, path)
