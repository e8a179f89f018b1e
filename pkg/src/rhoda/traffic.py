"""Seedable synthetic traffic patterns.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``; the same
seed reproduces the same output on any platform numpy supports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import FlowSet, TrafficMatrix


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class ClusteredPatternSpec:
    """Racks split into random sets of ``set_size``; heavy traffic inside a set.

    ``spill_floor_gbps`` (off when 0) collapses the spill traffic onto fewer
    random outside destinations whenever the equal split would fall below
    the floor.
    """

    M: int
    set_size: int
    per_pair_rate_gbps: float
    spill_total_gbps: float
    seed: int = 0
    spill_floor_gbps: float = 0.0

    def validate(self) -> None:
        if self.set_size < 1 or self.M % self.set_size:
            raise ValueError(f"set_size must divide M (set_size={self.set_size}, M={self.M})")
        if self.per_pair_rate_gbps < 0 or self.spill_total_gbps < 0 or self.spill_floor_gbps < 0:
            raise ValueError("rates must be non-negative")
        if self.spill_total_gbps > 0 and self.set_size == self.M:
            raise ValueError("spill traffic needs racks outside the set (set_size == M)")


def gen_clustered(spec: ClusteredPatternSpec) -> TrafficMatrix:
    spec.validate()
    M, s = spec.M, spec.set_size
    rng = _rng(spec.seed)
    sets = rng.permutation(M).reshape(M // s, s)
    set_of = np.empty(M, dtype=np.int64)
    set_of[sets] = np.arange(M // s)[:, None]
    same = set_of[:, None] == set_of[None, :]

    outside = M - s
    if outside and spec.spill_total_gbps > 0:
        per_dest = spec.spill_total_gbps / outside
        if per_dest >= spec.spill_floor_gbps:
            rates = np.where(same, 0.0, per_dest)
        else:
            n_dest = max(1, min(outside, int(spec.spill_total_gbps // spec.spill_floor_gbps)))
            rates = np.zeros((M, M))
            for r in range(M):
                pool = np.flatnonzero(~same[r])
                pick = rng.choice(pool, size=n_dest, replace=False)
                rates[r, pick] = spec.spill_total_gbps / n_dest
    else:
        rates = np.zeros((M, M))
    rates[same] = spec.per_pair_rate_gbps
    np.fill_diagonal(rates, 0.0)
    return TrafficMatrix(rates)


# rate units accepted for CDF files, as multipliers to Gbps
RATE_UNITS = {
    "gbps": 1.0,
    "mbps": 1e-3,
    "kbps": 1e-6,
    "gbytes_per_s": 8.0,
    "mbytes_per_s": 8e-3,
    "kbytes_per_s": 8e-6,
}


@dataclass(frozen=True)
class FanoutPatternSpec:
    """Each source picks ``fanout`` distinct destinations uniformly at random.

    ``rate_cdf`` holds ``(rate_gbps, cumulative_probability)`` breakpoints.
    The distribution puts a point mass at the first rate and is linear
    between consecutive breakpoints.
    """

    M: int
    fanout: int
    rate_cdf: Sequence[tuple[float, float]]
    seed: int = 0

    def validate(self) -> None:
        if not self.rate_cdf:
            raise ValueError("empty rate CDF")
        rates = [r for r, _ in self.rate_cdf]
        probs = [p for _, p in self.rate_cdf]
        if any(b <= a for a, b in zip(probs, probs[1:])):
            raise ValueError("CDF probabilities must be strictly increasing")
        if any(b < a for a, b in zip(rates, rates[1:])):
            raise ValueError("CDF rates must be non-decreasing")
        if probs[0] <= 0 or abs(probs[-1] - 1.0) > 1e-12:
            raise ValueError("CDF probabilities must lie in (0, 1] and end at 1.0")
        if rates[0] <= 0:
            raise ValueError("CDF rates must be positive")
        if not 1 <= self.fanout <= self.M - 1:
            raise ValueError(f"fanout must lie in [1, M-1], got {self.fanout}")


def sample_rates(cdf: Sequence[tuple[float, float]], u: np.ndarray) -> np.ndarray:
    """Inverse-CDF transform of uniforms ``u`` in [0, 1)."""
    rates = np.array([r for r, _ in cdf], dtype=float)
    probs = np.array([p for _, p in cdf], dtype=float)
    return np.interp(u, probs, rates, left=rates[0], right=rates[-1])


def gen_fanout(spec: FanoutPatternSpec) -> FlowSet:
    spec.validate()
    M, f = spec.M, spec.fanout
    rng = _rng(spec.seed)
    dst = np.empty((M, f), dtype=np.int64)
    for s in range(M):
        pick = rng.choice(M - 1, size=f, replace=False)
        dst[s] = pick + (pick >= s)  # skip the source itself
    src = np.repeat(np.arange(M), f)
    rate = sample_rates(spec.rate_cdf, rng.random(M * f))
    return FlowSet(src + 1, dst.ravel() + 1, rate)


def load_cdf_csv(path, unit: str = "gbps") -> list[tuple[float, float]]:
    """Read ``rate,cumulative_probability`` rows; a header row is optional."""
    try:
        scale = RATE_UNITS[unit.lower()]
    except KeyError:
        raise ValueError(f"unknown rate unit {unit!r}; choose from {sorted(RATE_UNITS)}") from None
    out = []
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            try:
                r, p = float(parts[0]), float(parts[1])
            except ValueError:
                if not out:
                    continue  # header
                raise ValueError(f"{path}:{lineno}: non-numeric CDF row {line!r}") from None
            out.append((r * scale, p))
    return out
