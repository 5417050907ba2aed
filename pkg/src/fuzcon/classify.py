"""Classification of fuzzy negations: continuity, strict decrease, involution."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, NumericConfig, merge_points
from .continuity import CAVEAT, scan_unary
from .functions import UnaryFunction
from .report import jsonable


@dataclass(frozen=True)
class NegationClassReport:
    name: str
    non_increasing: bool
    continuous: bool
    left_continuous: bool
    right_continuous: bool
    strictly_decreasing: bool
    strong: bool
    witnesses: dict = field(default_factory=dict)
    jumps: tuple = ()
    max_involution_error: float = 0.0
    caveat: str = ""

    @property
    def strict(self) -> bool:
        return self.strictly_decreasing and self.continuous

    @property
    def consistent(self) -> bool:
        """Report-level consistency: strong implies strict implies both parts."""
        if self.strong and not self.strict:
            return False
        return not self.strict or (self.strictly_decreasing and self.continuous)

    def equivalence_flags(self) -> dict:
        return {
            "strictly_decreasing": self.strictly_decreasing,
            "continuous": self.continuous,
            "strict": self.strict,
            "strong": self.strong,
        }

    def to_dict(self) -> dict:
        return jsonable({
            "name": self.name,
            "non_increasing": self.non_increasing,
            "continuous": self.continuous,
            "left_continuous": self.left_continuous,
            "right_continuous": self.right_continuous,
            "strictly_decreasing": self.strictly_decreasing,
            "strict": self.strict,
            "strong": self.strong,
            "consistent": self.consistent,
            "max_involution_error": self.max_involution_error,
            "witnesses": self.witnesses,
            "jumps": [{"x": j.location, "side": j.side, "magnitude": j.magnitude}
                      for j in self.jumps],
            "caveat": self.caveat,
        })


def sample_points(f: UnaryFunction, cfg: NumericConfig) -> np.ndarray:
    return merge_points(cfg.grid(), f.breakpoints)


def _flat_pair(x, y, sep, eps):
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    j = np.searchsorted(x, x + sep)
    ok = j < x.size
    i = np.flatnonzero(ok)
    hit = i[y[i] - y[j[ok]] <= eps]
    if not hit.size:
        return None
    a, b = hit[0], j[hit[0]]
    return {"x1": x[a], "x2": x[b], "N(x1)": y[a], "N(x2)": y[b]}


def classify_negation(N: UnaryFunction, cfg: NumericConfig = DEFAULT) -> NegationClassReport:
    pts = sample_points(N, cfg)
    d0 = cfg.delta_jump[0]
    # one pass over the points and their nearest jump probes
    v = N.eval(np.clip(np.concatenate([pts, pts - d0, pts + d0]), 0.0, 1.0))[:pts.size]
    witnesses = {}

    rises = np.flatnonzero(v[1:] > v[:-1] + cfg.eps_eq)
    non_increasing = rises.size == 0
    if not non_increasing:
        i = rises[0]
        witnesses["non_increasing"] = {"x1": pts[i], "x2": pts[i + 1],
                                       "N(x1)": v[i], "N(x2)": v[i + 1]}

    flat = np.flatnonzero(v[:-1] - v[1:] <= cfg.eps_eq)
    strictly = non_increasing and flat.size == 0
    if flat.size:
        i = flat[0]
        witnesses["strictly_decreasing"] = {"x1": pts[i], "x2": pts[i + 1],
                                            "N(x1)": v[i], "N(x2)": v[i + 1]}

    jumps = scan_unary(N.eval, pts, cfg)
    left_ok = not any(j.side in ("left", "both") for j in jumps)
    right_ok = not any(j.side in ("right", "both") for j in jumps)
    if jumps:
        top = max(jumps, key=lambda j: j.magnitude)
        witnesses["continuous"] = {"x": top.location, "side": top.side,
                                   "jump": top.magnitude}

    nn = N.eval(np.clip(v, 0.0, 1.0))
    err = np.abs(nn - pts)
    worst = int(np.argmax(err))
    strong = bool(err[worst] <= cfg.eps_eq)
    if not strong:
        witnesses["strong"] = {"x": pts[worst], "N(x)": v[worst], "N(N(x))": nn[worst]}

    if strictly:
        # a flat piece shorter than two grid cells can hide between nodes;
        # the images N(x) land on its ends when N jumps onto it
        pair = _flat_pair(np.concatenate([pts, np.clip(v, 0.0, 1.0)]),
                          np.concatenate([v, nn]), 0.5 / (cfg.grid_n - 1), cfg.eps_eq)
        if pair is not None:
            strictly = False
            witnesses["strictly_decreasing"] = pair

    return NegationClassReport(
        N.name, non_increasing, left_ok and right_ok, left_ok, right_ok,
        strictly, strong, witnesses, tuple(jumps), float(err[worst]),
        CAVEAT.format(cfg.grid_n, list(cfg.delta_jump), cfg.tau_jump),
    )
