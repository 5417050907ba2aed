"""Numeric resolution and tolerance settings."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class NumericConfig:
    """Grid sizes, iteration counts and tolerances for every numeric verdict.

    All grids are uniform on [0, 1]; the defaults use ``2**k + 1`` points so
    that grid nodes are dyadic rationals and exactly representable.
    """

    grid_n: int = 4097
    grid2d_n: int = 257
    bisect_iters: int = 80
    eps_eq: float = 1e-9
    eps_zero: float = 0.0
    eps_one: float = 0.0
    delta_jump: tuple = (1e-4, 1e-5, 1e-6)
    tau_jump: float = 1e-5
    gap_threshold: float = 1e-2
    section_lines: int = 33
    section_n: int = 129
    assoc_n: int = 33
    ep_samples: int = 100_000
    seed: int = field(default=0)

    def __post_init__(self):
        if self.grid_n < 3 or self.grid2d_n < 3:
            raise ValueError("grid sizes must be >= 3")
        if self.bisect_iters < 30:
            raise ValueError("bisect_iters must be >= 30")
        if self.eps_eq <= 0 or self.tau_jump <= 0:
            raise ValueError("eps_eq and tau_jump must be positive")
        if self.eps_zero < 0 or self.eps_one < 0:
            raise ValueError("eps_zero and eps_one must be non-negative")
        deltas = tuple(sorted(float(d) for d in self.delta_jump))
        if not deltas or deltas[0] <= 0:
            raise ValueError("delta_jump offsets must be positive")
        object.__setattr__(self, "delta_jump", deltas)

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_n)

    def grid2d(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid2d_n)

    def replace(self, **changes) -> "NumericConfig":
        return dataclasses.replace(self, **changes)

    def with_overrides(self, pairs) -> "NumericConfig":
        """Apply ``key=value`` strings (as given on the command line)."""
        fields = {f.name: f for f in dataclasses.fields(self)}
        changes = {}
        for pair in pairs:
            key, sep, raw = pair.partition("=")
            key = key.strip()
            if not sep or key not in fields:
                raise ValueError(f"bad config override {pair!r}")
            current = getattr(self, key)
            if isinstance(current, tuple):
                changes[key] = tuple(float(v) for v in raw.split(",") if v.strip())
            elif isinstance(current, int):
                changes[key] = int(raw)
            else:
                changes[key] = float(raw)
        return self.replace(**changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["delta_jump"] = list(self.delta_jump)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NumericConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        kw = {k: v for k, v in d.items() if k in known}
        if "delta_jump" in kw:
            kw["delta_jump"] = tuple(kw["delta_jump"])
        return cls(**kw)


DEFAULT = NumericConfig()


def uniform_grid(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n)


def merge_points(*arrays, tol: float = 1e-12) -> np.ndarray:
    """Sorted union of points in [0, 1], collapsing near-duplicates."""
    pts = np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays])
    pts = pts[(pts >= 0.0) & (pts <= 1.0)]
    pts = np.unique(pts)
    if pts.size < 2:
        return pts
    keep = np.concatenate(([True], np.diff(pts) > tol))
    return pts[keep]
