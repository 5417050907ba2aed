"""Random monotone connectives and counterexample search.

Instances come from a SplitMix64 stream (see ``docs/rng.md``): an ``m x m``
table of uniforms made monotone by running maxima along both axes, forced
to the boundary values of the requested kind, optionally symmetrized, and
interpolated bilinearly.  Discontinuities are added by zeroing a down-set
(conjunctions) or lifting an up-set to 1 (disjunctions).  The set is either
a rectangle at a corner or the region under/over a random strictly
decreasing curve, possibly with a jump.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import DEFAULT, NumericConfig, merge_points, uniform_grid
from .errors import UnknownTarget
from .functions import BinaryConnective, Flags, Kind, UnaryFunction
from .report import CheckResult, jsonable

MASK64 = (1 << 64) - 1


class SplitMix64:
    """Steele, Lea and Flood's 64-bit mixing generator.

    ``state += 0x9E3779B97F4A7C15`` followed by two xor-shift-multiply
    rounds; floats use the top 53 bits.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, a: float, b: float) -> float:
        return a + (b - a) * self.random()

    def below(self, n: int) -> int:
        return self.next_u64() % n

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.random() for _ in range(n)])


REGIMES = ("none", "rectangle", "curve", "jump", "involution")


@dataclass(frozen=True)
class DecreasingCurve:
    """Strictly decreasing piecewise-linear ``g`` with ``g(0)=1``, ``g(1)=0``.

    ``left[i]``/``right[i]`` are the one-sided values at ``knots[i]``; they
    differ only at a jump.  ``g`` itself takes the right value at knots.
    """

    knots: tuple
    left: tuple
    right: tuple

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        R = np.asarray(self.right, dtype=float)
        L = np.asarray(self.left, dtype=float)
        object.__setattr__(self, "_slope", (L[1:] - R[:-1]) / np.diff(k))
        # each knot twice, left value then right: np.interp then follows the
        # left piece below a jump knot; the knot itself is patched
        object.__setattr__(self, "_xp", np.repeat(k, 2))
        object.__setattr__(self, "_fp", np.column_stack([L, R]).ravel())
        object.__setattr__(self, "_jumps", [(k[i], R[i]) for i in np.flatnonzero(L != R)])

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.interp(x, self._xp, self._fp)
        for knot, value in self._jumps:
            out = np.where(x == knot, value, out)
        return out

    def crossing(self, v: float) -> float:
        """``sup{x : g(x) >= v}`` (0 when empty)."""
        k, L, R = self.knots, self.left, self.right
        if v >= R[0]:
            return 0.0
        if v <= 0.0:
            return 1.0
        for i in range(len(k) - 1):
            if L[i + 1] <= v <= R[i]:
                return float(k[i] + (v - R[i]) / self._slope[i])
            if R[i + 1] < v < L[i + 1]:
                return float(k[i + 1])
        return 1.0

    @classmethod
    def random(cls, rng: SplitMix64, jump: bool = False,
               involutive: bool = False) -> "DecreasingCurve":
        if involutive:
            return cls._random_involution(rng)
        while True:
            k = 1 + rng.below(4)
            xs = sorted(rng.uniform(0.05, 0.95) for _ in range(k))
            pts = [0.0] + xs + [1.0]
            if min(np.diff(pts)) >= 0.05:
                break
        while True:
            vs = sorted((rng.uniform(0.05, 0.95) for _ in range(k)), reverse=True)
            vals = [1.0] + vs + [0.0]
            if min(-np.diff(vals)) >= 0.02:
                break
        left, right = list(vals), list(vals)
        if jump:
            j = 1 + rng.below(k)
            hi, lo = vals[j - 1], vals[j + 1]
            # jump of at least 0.05 inside (lo, hi), keeping strict decrease
            span = hi - lo
            a = lo + span * rng.uniform(0.55, 0.8)
            b = lo + span * rng.uniform(0.2, 0.45)
            if a - b < 0.05:
                a, b = min(hi - 0.005, b + 0.05), b
            left[j], right[j] = a, b
        return cls(tuple(pts), tuple(left), tuple(right))

    @classmethod
    def _random_involution(cls, rng: SplitMix64) -> "DecreasingCurve":
        """A piecewise-linear ``g`` with ``g(g(x)) = x``: random knots on
        ``[0, e]`` above the diagonal, mirrored across it."""
        while True:
            e = rng.uniform(0.3, 0.7)
            k = rng.below(3)
            xs = sorted(rng.uniform(0.0, e) for _ in range(k))
            vs = sorted((rng.uniform(e, 1.0) for _ in range(k)), reverse=True)
            px = [0.0] + xs + [e]
            pv = [1.0] + vs + [e]
            if min(np.diff(px)) >= 0.05 and min(-np.diff(pv)) >= 0.05:
                break
        knots = px + pv[-2::-1]
        vals = pv + px[-2::-1]
        return cls(tuple(knots), tuple(vals), tuple(vals))


@dataclass(frozen=True)
class Region:
    """A down-set (conjunction) or up-set (disjunction) of the unit square."""

    shape: str  # "rectangle" or "curve"
    closed: bool
    a: float = 0.0
    b: float = 0.0
    curve: Optional[DecreasingCurve] = None
    symmetric: bool = False

    def contains(self, x, y, kind: Kind) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if kind is Kind.CONJUNCTION:
            if self.shape == "rectangle":
                return (x <= self.a) & (y <= self.b) if self.closed else (x < self.a) & (y < self.b)
            gx = self.curve(x)
            inside = y <= gx if self.closed else y < gx
            if self.symmetric:
                gy = self.curve(y)
                inside &= x <= gy if self.closed else x < gy
            return inside
        if self.shape == "rectangle":
            return (x >= self.a) & (y >= self.b) if self.closed else (x > self.a) & (y > self.b)
        gx = self.curve(x)
        inside = y >= gx if self.closed else y > gx
        if self.symmetric:
            gy = self.curve(y)
            inside &= x >= gy if self.closed else x > gy
        return inside

    def section_points(self, fixed_axis: str, v: float) -> list:
        if self.shape == "rectangle":
            return [self.a if fixed_axis == "y" else self.b]
        g = self.curve
        pts = [g.crossing(v), float(g(v))]
        return pts

    def to_dict(self) -> dict:
        d = {"shape": self.shape, "closed": self.closed, "symmetric": self.symmetric}
        if self.shape == "rectangle":
            d.update(a=self.a, b=self.b)
        else:
            d.update(knots=self.curve.knots, left=self.curve.left, right=self.curve.right)
        return jsonable(d)


def _cell_coefficients(V: np.ndarray) -> np.ndarray:
    """Per-cell ``(c0, cx, cy, cxy)`` rows so that the bilinear interpolant is
    ``c0 + (tx cx + ty cy) + tx ty cxy``; the grouping is symmetric under
    swapping x and y, so symmetric tables give bit-symmetric values.

    The table is padded with a flat cell past the last node on each axis, so
    x = 1 or y = 1 is read at t = 0 and returns the node value exactly
    instead of rebuilding it from differences."""
    V = np.pad(V, ((0, 1), (0, 1)), mode="edge")
    v00, v10 = V[:-1, :-1], V[1:, :-1]
    v01, v11 = V[:-1, 1:], V[1:, 1:]
    c = np.stack([v00, v10 - v00, v01 - v00, (v11 + v00) - (v10 + v01)])
    return c.reshape(4, -1)


def _bilinear(coef: np.ndarray, m: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    sx = x * (m - 1)
    sy = y * (m - 1)
    i = np.minimum(sx.astype(np.intp), m - 1)
    j = np.minimum(sy.astype(np.intp), m - 1)
    tx, ty = sx - i, sy - j
    k = i * m + j
    c0, cx, cy, cxy = coef
    return c0.take(k) + (tx * cx.take(k) + ty * cy.take(k)) + tx * ty * cxy.take(k)


@dataclass(frozen=True, eq=False)
class MonotoneGridFunction:
    """Node table, bilinear interpolation, optional discontinuity region."""

    values: np.ndarray
    kind: Kind
    region: Optional[Region] = None
    seed: int = 0
    commutative: bool = False
    regime: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "_coef", _cell_coefficients(self.values))

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def eval(self, x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        shape = x.shape
        x, y = x.ravel(), y.ravel()
        # a convex combination of unit values leaves [0, 1] only by rounding
        out = np.clip(_bilinear(self._coef, self.m, x, y), 0.0, 1.0)
        if self.kind is Kind.CONJUNCTION:
            low, high = (x == 0.0) | (y == 0.0), (x == 1.0) & (y == 1.0)
        else:
            low, high = (x == 0.0) & (y == 0.0), (x == 1.0) | (y == 1.0)
        if self.region is not None:
            inside = self.region.contains(x, y, self.kind)
            if self.kind is Kind.CONJUNCTION:
                low |= inside
            else:
                high |= inside
        out[low] = 0.0
        out[high] = 1.0
        return out.reshape(shape)

    def breakpoints(self, fixed_axis: str, v: float) -> tuple:
        pts = list(uniform_grid(self.m)[1:-1])
        if self.region is not None:
            pts += self.region.section_points(fixed_axis, v)
        return tuple(float(p) for p in merge_points(np.array(pts)) if 0.0 < p < 1.0)

    def boundary_negation(self) -> Optional[UnaryFunction]:
        """The natural negation in closed form, when the region decides it.

        For a one-sided curve region the zero (one) set of each section ends
        exactly on the curve, so the induced negation is ``g`` itself.  The
        float value is the one the region test compares against, so a point
        ``(x, g(x))`` lands inside or outside exactly as the region says.
        """
        r = self.region
        if r is None or r.shape != "curve" or r.symmetric:
            return None
        return UnaryFunction(f"boundary[{self.seed}]", r.curve, tuple(r.curve.knots[1:-1]),
                             None, "boundary curve of the generated region")

    def to_connective(self) -> BinaryConnective:
        flags = Flags(commutative=True) if self.commutative else Flags()
        return BinaryConnective(
            f"fuzz[{self.kind.value},m={self.m},seed={self.seed}]", self.eval, self.kind, flags,
            None, self.breakpoints,
            f"random monotone {self.kind.value}, seed {self.seed}, regime {self.regime}")

    def to_csv(self) -> str:
        g = uniform_grid(self.m)
        buf = io.StringIO()
        buf.write("x,y,value\n")
        for i, x in enumerate(g):
            for j, y in enumerate(g):
                buf.write(f"{x!r},{y!r},{self.values[i, j]!r}\n")
        return buf.getvalue()

    def describe(self) -> dict:
        return jsonable({"m": self.m, "kind": self.kind.value, "seed": self.seed,
                         "commutative": self.commutative, "regime": self.regime,
                         "region": None if self.region is None else self.region.to_dict()})


def random_grid_function(seed: int, m: int = 17, kind="conjunction", commutative: bool = False,
                         regime: str = "mixed") -> MonotoneGridFunction:
    if m < 3:
        raise ValueError("m must be at least 3")
    kind = Kind(kind)
    if kind not in (Kind.CONJUNCTION, Kind.DISJUNCTION):
        raise ValueError("kind must be conjunction or disjunction")
    rng = SplitMix64(seed)
    V = rng.uniforms(m * m).reshape(m, m)
    V = np.maximum.accumulate(np.maximum.accumulate(V, axis=0), axis=1)
    if commutative:
        V = 0.5 * (V + V.T)
    if kind is Kind.CONJUNCTION:
        V[0, :] = 0.0
        V[:, 0] = 0.0
        V[-1, -1] = 1.0
    else:
        V[-1, :] = 1.0
        V[:, -1] = 1.0
        V[0, 0] = 0.0
    if regime == "mixed":
        regime = REGIMES[rng.below(len(REGIMES))]
    elif regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; choose from {REGIMES + ('mixed',)}")
    region = None
    closed = rng.below(2) == 0
    if regime == "rectangle":
        a = rng.uniform(0.1, 0.9)
        b = a if commutative else rng.uniform(0.1, 0.9)
        region = Region("rectangle", closed, a=a, b=b)
    elif regime in ("curve", "jump", "involution"):
        curve = DecreasingCurve.random(rng, regime == "jump", regime == "involution")
        region = Region("curve", closed, curve=curve, symmetric=commutative)
    return MonotoneGridFunction(V, kind, region, seed, commutative, regime)


def random_monotone_connective(seed: int, m: int = 17, kind="conjunction",
                               commutative: bool = False, regime: str = "mixed") -> BinaryConnective:
    """A random monotone conjunction or disjunction, deterministic per seed."""
    return random_grid_function(seed, m, kind, commutative, regime).to_connective()


# ---------------------------------------------------------------- search

def _slot(b: BinaryConnective) -> str:
    return "conjunction" if b.kind is Kind.CONJUNCTION else "disjunction"


def _negation_of(gf: MonotoneGridFunction, b: BinaryConnective, cfg: NumericConfig):
    from .induction import natural_negation
    N = gf.boundary_negation()
    if N is None:
        N = natural_negation(b, cfg, validate=False)
        if not N.is_negation:
            return None
    return N


def _natural_theorem(tid, enforce=False, with_negation=False):
    def check(gf, cfg):
        from .analysis import verify_theorem
        from .induction import natural_negation
        b = gf.to_connective()
        ops = {_slot(b): b}
        if with_negation:
            N = _negation_of(gf, b, cfg)
            if N is None:
                return None
            ops["negation"] = N
        elif not natural_negation(b, cfg, validate=False).is_negation:
            return None
        return verify_theorem(tid, ops, cfg, enforce_preconditions=enforce)
    return check


def _law_converse(law, component, ineq, flag):
    """Pairs ``(b, N_b)`` that satisfy the inequalities but not the law.

    The failure must show in ``component`` (``b(x, N(x))``): that form
    compares ``N(x)`` with the section's own boundary, whereas the other
    order goes through ``N(N(x))`` and can flip on rounding alone.  Only
    instances verified to lack the one-sided continuity ``flag`` are
    reported; with it, such a pair would contradict the theorem target.
    """
    def check(gf, cfg):
        from .analysis import check_law
        from .validation import verified_flags
        b = gf.to_connective()
        N = _negation_of(gf, b, cfg)
        if N is None:
            return None
        ops = {_slot(b): b, "negation": N}
        r = check_law(component, ops, cfg)
        if not r.fails:
            return r
        if not check_law(ineq, ops, cfg).holds or verified_flags(b, cfg)[flag][0]:
            return None
        full = check_law(law, ops, cfg)
        full.details.update({f"{ineq}_holds": True, flag: False, "negation": N.name,
                             "failing_component": component})
        full.message = f"{law} fails although {ineq} holds"
        return full
    return check


# target -> (kind, check); a check gets the generated instance and returns a
# CheckResult (a failing one is a counterexample) or None when out of scope
TARGETS = {
    "THM_3_1": ("conjunction", _natural_theorem("THM_3_1")),
    "THM_3_2": ("disjunction", _natural_theorem("THM_3_2")),
    "PROP_3_2": ("conjunction", _natural_theorem("PROP_3_2")),
    "PROP_3_4": ("disjunction", _natural_theorem("PROP_3_4")),
    "PROP_3_1": ("conjunction", _natural_theorem("PROP_3_1")),
    "PROP_3_3": ("disjunction", _natural_theorem("PROP_3_3")),
    "PROP_4_1": ("disjunction", _natural_theorem("PROP_4_1", True, True)),
    "PROP_4_2": ("conjunction", _natural_theorem("PROP_4_2", True, True)),
    "LEM": ("disjunction", _law_converse("LEM", "LEM2", "LEM_INEQ", "right_continuous")),
    "LC": ("conjunction", _law_converse("LC", "LC2", "LC_INEQ", "left_continuous")),
}
_PARAMS = ("m", "kind", "commutative", "regime")


def _target(target: str):
    try:
        return TARGETS[target]
    except KeyError:
        raise UnknownTarget(f"{target!r}; known targets: {sorted(TARGETS)}") from None


def _params(kind: str, params: Optional[dict]) -> dict:
    p = {"m": 17, "commutative": False, "regime": "mixed", "start": 1}
    p.update(params or {})
    p["kind"] = kind
    return p


@dataclass
class WitnessBundle:
    target: str
    seed: int
    params: dict
    report: CheckResult
    instance: dict = field(default_factory=dict)
    grid_csv: str = ""

    def to_dict(self) -> dict:
        return jsonable({"target": self.target, "seed": self.seed, "params": self.params,
                         "instance": self.instance, "report": self.report.to_dict()})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def regenerate(self) -> MonotoneGridFunction:
        p = self.params
        return random_grid_function(self.seed, p["m"], p["kind"], p["commutative"], p["regime"])

    def reverify(self, cfg: Optional[NumericConfig] = None) -> bool:
        """Rebuild the instance from its seed and confirm the same failure."""
        cfg = cfg or NumericConfig.from_dict(self.report.config)
        _, check = _target(self.target)
        r = check(self.regenerate(), cfg)
        return r is not None and r.fails and jsonable(r.witness) == jsonable(self.report.witness)


def search_counterexample(target: str, params: Optional[dict] = None, budget: int = 100,
                          cfg: NumericConfig = DEFAULT) -> Optional[WitnessBundle]:
    """First failing instance over seeds ``start, start+1, ...`` or ``None``.

    ``params`` may set ``m`` (17), ``commutative`` (False), ``regime``
    ("mixed") and ``start`` (1).  Seeds are tried in order, so the result
    does not depend on timing.
    """
    kind, check = _target(target)
    p = _params(kind, params)
    for seed in range(int(p["start"]), int(p["start"]) + int(budget)):
        gf = random_grid_function(seed, p["m"], kind, p["commutative"], p["regime"])
        r = check(gf, cfg)
        if r is not None and r.fails:
            return WitnessBundle(target, seed, {k: p[k] for k in _PARAMS}, r,
                                 gf.describe(), gf.to_csv())
    return None


def sweep(target: str, params: Optional[dict] = None, budget: int = 100,
          cfg: NumericConfig = DEFAULT) -> dict:
    """Run every instance and tally verdicts (``skipped``: out of scope)."""
    kind, check = _target(target)
    p = _params(kind, params)
    counts = {"holds": 0, "fails": 0, "precondition_failed": 0, "skipped": 0}
    failing = []
    for seed in range(int(p["start"]), int(p["start"]) + int(budget)):
        r = check(random_grid_function(seed, p["m"], kind, p["commutative"], p["regime"]), cfg)
        if r is None:
            counts["skipped"] += 1
            continue
        counts[r.verdict.value] += 1
        if r.fails:
            failing.append(seed)
    return {"target": target, "params": {k: p[k] for k in _PARAMS}, "budget": int(budget),
            "counts": counts, "failing_seeds": failing}
