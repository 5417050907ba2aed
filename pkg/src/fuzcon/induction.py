"""Negations induced by conjunctions and disjunctions, pseudo-inverses and the
(D, N)-implication constructions in both directions."""

from __future__ import annotations

import threading
from typing import Optional

import numpy as np

from .classify import classify_negation
from .config import DEFAULT, NumericConfig, merge_points, uniform_grid
from .errors import (AxiomsFailed, ConstantFunction, InvalidNegation, KindMismatch,
                     NotContinuousNegation, NotMonotone, NotValidated, PostconditionError)
from .functions import BinaryConnective, Flags, Kind, UnaryFunction, monotone_preimages
from .validation import _monotone_violation, kind_checks, validate_negation

_BP_LINES = uniform_grid(17)
# floor for ulp-sized candidate offsets near 0
_ABS = 2.0 ** -64
# one bisection round (call plus bookkeeping) costs about as much as this
# many extra evaluations
_CALL_COST = 2000
_K = np.arange(1, 1024)
_ULPS = (16.0, 256.0)
_LADDER = (2.0 ** -36, 2.0 ** -24, 2.0 ** -12)


def _probes(lanes: int) -> int:
    """Points per lane and round: fewer rounds against more evaluations."""
    return int(_K[np.argmin((_CALL_COST + lanes * _K) / np.log2(_K + 1))])


def _settle(pred, n: int, iters: int, candidates=()):
    """Bisection core.  Returns ``(lo, hi, state)`` with ``state`` 0 for an
    empty set, 2 for the whole interval and 1 when ``[lo, hi]`` brackets the
    supremum (``pred(lo)`` true, ``pred(hi)`` false).

    ``candidates`` is a sequence of rounds, each a list of per-lane trial
    points evaluated together in one call.  As the predicate is true on an
    initial segment, every trial that holds is a valid ``lo`` and every one
    that fails a valid ``hi``.
    """
    lo, hi = np.full(n, -1.0), np.full(n, 2.0)
    for group in candidates:
        c = np.clip(np.asarray(group, dtype=float), 0.0, 1.0)
        which, lane = np.nonzero((c > lo) & (c < hi))
        if not lane.size:
            continue
        t = c[which, lane]
        ins = pred(lane, t)
        np.minimum.at(hi, lane[~ins], t[~ins])
        # a holding trial above a failing one would be rounding noise
        ok = ins & (t < hi[lane])
        np.maximum.at(lo, lane[ok], t[ok])
    state = np.ones(n, dtype=np.int8)
    idx = np.flatnonzero(lo < 0.0)
    if idx.size:
        at0 = pred(idx, np.zeros(idx.size))
        lo[idx] = 0.0
        state[idx[~at0]] = 0
        hi[idx[~at0]] = 0.0
    idx = np.flatnonzero(hi > 1.0)
    if idx.size:
        at1 = pred(idx, np.ones(idx.size))
        hi[idx] = 1.0
        state[idx[at1]] = 2
        lo[idx[at1]] = 1.0
    act = np.flatnonzero(state == 1)
    # probe in the bit patterns of the bracket: for non-negative doubles the
    # int64 view is ordered, so 63 halvings reach adjacent floats at any scale
    a, b = (lo[act] + 0.0).view(np.int64), hi[act].view(np.int64)
    bits = 0.0
    while bits < iters:
        live = b - a > 1
        if not live.all():
            done = act[~live]
            lo[done], hi[done] = a[~live].view(float), b[~live].view(float)
            act, a, b = act[live], a[live], b[live]
        if act.size == 0:
            break
        k = _probes(act.size)
        frac = np.arange(1, k + 1) / (k + 1)
        span = b - a
        off = np.minimum((span.astype(float)[:, None] * frac).astype(np.int64), (span - 1)[:, None])
        pts = a[:, None] + np.maximum(off, 1)
        ins = pred(np.repeat(act, k), pts.view(float).ravel()).reshape(-1, k)
        # the predicate holds on an initial segment: count the leading trues
        j = np.argmin(np.concatenate([ins, np.zeros((act.size, 1), bool)], axis=1), axis=1)
        rows = np.arange(act.size)
        a_new = np.where(j > 0, pts[rows, np.maximum(j - 1, 0)], a)
        b = np.where(j < k, pts[rows, np.minimum(j, k - 1)], b)
        a = a_new
        bits += np.log2(k + 1)
    a, b = a.view(float), b.view(float)
    lo[act], hi[act] = a, b
    return lo, hi, state


def _result(lo, hi, state, upper: bool) -> np.ndarray:
    return np.where(state == 2, 1.0, np.where(state == 0, 0.0, hi if upper else lo))


def sup_of_initial_set(pred, n: int, iters: int, upper: bool = False) -> np.ndarray:
    """``sup{t in [0,1] : pred(t)}`` for ``n`` predicates that are true on an
    initial segment of [0, 1] (and false after it).  Empty sets give 0.

    ``pred(idx, t)`` evaluates the predicates numbered ``idx`` at the points
    ``t`` and returns booleans.  Bisection keeps a bracket ``pred(lo)``,
    ``not pred(hi)``; ``upper`` returns ``hi`` instead of ``lo``.
    """
    return _result(*_settle(pred, n, iters), upper)


def _guess(xs, X, V, cubic):
    """Interpolate at ``xs`` from four neighbour nodes per point (columns of
    ``X``/``V``: two left, two right), cubically where ``cubic`` holds and
    linearly from the inner pair otherwise; the result is kept between the
    inner values."""
    xl, xr, vl, vr = X[:, 1], X[:, 2], V[:, 1], V[:, 2]
    with np.errstate(all="ignore"):
        g = np.where(xr > xl, vl + (xs - xl) * (vr - vl) / (xr - xl), vl)
        cub = np.zeros_like(xs)
        for i in range(4):
            w = np.ones_like(xs)
            for j in range(4):
                if j != i:
                    w = w * (xs - X[:, j]) / (X[:, i] - X[:, j])
            cub = cub + w * V[:, i]
    g = np.where(cubic & np.isfinite(cub), cub, g)
    return np.clip(g, np.minimum(vl, vr), np.maximum(vl, vr))


def _trials(g, vl, vr, below, above):
    """Candidate rounds around the guess ``g``: a few ulps first, then a
    widening ladder scaled by the neighbour gap, plus the neighbours' own
    bounds ``below``/``above``."""
    ulp = np.spacing(np.maximum(g, _ABS))
    gap = np.abs(vl - vr)
    rest = [below, above]
    for w in [ulp * k for k in _ULPS] + [gap * k for k in _LADDER]:
        rest += [g - w, g + w]
    return [g, g - ulp, g + ulp], rest


def sup_non_increasing(x: np.ndarray, pred, iters: int, upper: bool = False,
                       step: int = 16, known=None, split: int = 2) -> np.ndarray:
    """:func:`sup_of_initial_set` for a family indexed by sorted ``x`` whose
    suprema are expected to be non-increasing in ``x``.

    ``pred(xs, t)`` gets the family parameters directly.  A coarse subset is
    solved from scratch; every other point first tries a narrow bracket
    around an interpolation of its solved neighbours, then the neighbours'
    own values.  ``known`` (sorted parameters, values) from earlier solves
    replaces the coarse pass when it is at least as dense as ``x``.  Trials
    are only ever evaluated, never assumed, so a wrong expectation costs
    time but not accuracy.
    """
    n = x.size
    if known is not None and known[0].size >= max(n, 4):
        xk, vk = known
        j = np.clip(np.searchsorted(xk, x), 1, xk.size - 1)
        nodes = np.clip(j[:, None] + np.arange(-2, 2), 0, xk.size - 1)
        g = _guess(x, xk[nodes], vk[nodes], (j > 1) & (j < xk.size - 1))
        vl, vr = vk[j - 1], vk[j]
        cand = _trials(g, vl, vr, vr, vl)
        return _result(*_settle(lambda i, t: pred(x[i], t), n, iters, cand), upper)

    lo, hi, state = np.zeros(n), np.ones(n), np.ones(n, dtype=np.int8)

    def solve(sub, candidates=()):
        got = _settle(lambda j, t: pred(x[sub[j]], t), sub.size, iters, candidates)
        lo[sub], hi[sub], state[sub] = got

    solve(np.unique(np.r_[np.arange(0, n, step), n - 1]))
    val = _result(lo, hi, state, upper)
    s = step
    while s > 1:
        f = max(s // split, 1)
        idx = np.arange(n)
        sub = idx[(idx % s != 0) & (idx % f == 0) & (idx < n - 1)]
        if sub.size:
            left = sub - sub % s
            right = np.minimum(left + s, n - 1)
            # the solved neighbours one and two strides away
            nodes = np.stack([left - s, left, right, right + s], axis=1)
            cubic = (left - s >= 0) & (right + s < n) & (right == left + s)
            nodes = np.clip(nodes, 0, n - 1)
            g = _guess(x[sub], x[nodes], val[nodes], cubic)
            below = np.where(state[right] == 0, 0.0, lo[right])
            above = np.where(state[left] == 2, 1.0, hi[left])
            solve(sub, _trials(g, val[left], val[right], below, above))
            val[sub] = _result(lo[sub], hi[sub], state[sub], upper)
        s = f
    return val


def _unique_apply(fn, x) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    flat = xa.ravel()
    if flat.size <= 1:
        return fn(flat).reshape(xa.shape)
    u, inv = np.unique(flat, return_inverse=True)
    return fn(u)[inv].reshape(xa.shape)


def _require_kind(b: BinaryConnective, kind: Kind):
    if b.kind is not kind:
        raise KindMismatch(f"{b.name} has kind {b.kind.value}, expected {kind.value}")


def _require_valid(b: BinaryConnective, cfg: NumericConfig):
    bad = {k: w for k, w in kind_checks(b, cfg).items() if w is not None}
    if bad:
        name, w = next(iter(bad.items()))
        raise NotValidated(f"{b.name} fails {name}: {w}")


class _Memo:
    """Thread-safe value cache for a deterministic scalar map, filled in
    batches.  Keys are kept sorted so lookups stay vectorized; ``compute``
    also receives the cached ``(keys, values)`` as a hint."""

    def __init__(self, compute):
        self._compute = compute
        self._keys = np.empty(0)
        self._vals = np.empty(0)
        self._lock = threading.Lock()

    def __call__(self, x) -> np.ndarray:
        def batch(u):
            with self._lock:
                keys, vals = self._keys, self._vals
            got = np.empty(u.size)
            hit = np.zeros(u.size, dtype=bool)
            if keys.size:
                pos = np.minimum(np.searchsorted(keys, u), keys.size - 1)
                hit = keys[pos] == u
                got[hit] = vals[pos[hit]]
            miss = ~hit
            if miss.any():
                new_k = u[miss]
                got[miss] = self._compute(new_k, (keys, vals))
                with self._lock:
                    k = np.concatenate([self._keys, new_k])
                    v = np.concatenate([self._vals, got[miss]])
                    k, first = np.unique(k, return_index=True)
                    self._keys, self._vals = k, v[first]
            return got
        return _unique_apply(batch, x)

    def __len__(self):
        return self._keys.size


class InducedNegation(UnaryFunction):
    """The natural negation of a conjunction or disjunction.

    Values come from bisection on the monotone zero-set (resp. one-set) of
    the section ``t -> b(x, t)`` and are memoized per point.
    """

    def __init__(self, source: BinaryConnective, cfg: NumericConfig = DEFAULT):
        if source.kind is Kind.CONJUNCTION:
            compute = self._conj
        elif source.kind is Kind.DISJUNCTION:
            compute = self._disj
        else:
            raise KindMismatch(f"{source.name}: cannot induce a negation from {source.kind.value}")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "cfg", cfg)
        memo = _Memo(compute)
        bps = merge_points(*[source.breakpoints("y", float(v)) for v in _BP_LINES])
        bps = tuple(float(b) for b in bps if 0.0 < b < 1.0)
        super().__init__(f"N[{source.name}]", memo, bps, None, f"induced by {source.name}")
        object.__setattr__(self, "memo", memo)

    def _conj(self, x, known=None):
        C, cfg = self.source, self.cfg
        base = C.eval(x, np.zeros_like(x))
        if np.any(base > cfg.eps_zero):
            i = int(np.argmax(base))
            raise PostconditionError(f"{C.name}({x[i]!r}, 0) = {base[i]!r}, expected 0")
        return sup_non_increasing(x, lambda xs, t: C.eval(xs, t) <= cfg.eps_zero,
                                  cfg.bisect_iters, known=known)

    def _disj(self, x, known=None):
        D, cfg = self.source, self.cfg
        top = D.eval(x, np.ones_like(x))
        if np.any(top < 1.0 - cfg.eps_one):
            i = int(np.argmin(top))
            raise PostconditionError(f"{D.name}({x[i]!r}, 1) = {top[i]!r}, expected 1")
        # inf of the one-set equals sup of its complement, an initial segment
        return sup_non_increasing(x, lambda xs, t: D.eval(xs, t) < 1.0 - cfg.eps_one,
                                  cfg.bisect_iters, upper=True, known=known)

    @property
    def is_negation(self) -> bool:
        if self.source.kind is Kind.CONJUNCTION:
            return abs(self(1.0)) <= self.cfg.eps_eq
        return abs(self(0.0) - 1.0) <= self.cfg.eps_eq

    def __repr__(self):
        return f"InducedNegation({self.source.name!r})"


def natural_negation_of_conjunction(C: BinaryConnective, cfg: NumericConfig = DEFAULT,
                                    validate: bool = True) -> InducedNegation:
    """``x -> sup{t : C(x, t) = 0}``."""
    _require_kind(C, Kind.CONJUNCTION)
    if validate:
        _require_valid(C, cfg)
    return InducedNegation(C, cfg)


def natural_negation_of_disjunction(D: BinaryConnective, cfg: NumericConfig = DEFAULT,
                                    validate: bool = True) -> InducedNegation:
    """``x -> inf{t : D(x, t) = 1}``."""
    _require_kind(D, Kind.DISJUNCTION)
    if validate:
        _require_valid(D, cfg)
    return InducedNegation(D, cfg)


def natural_negation(b: BinaryConnective, cfg: NumericConfig = DEFAULT,
                     validate: bool = True) -> InducedNegation:
    if b.kind is Kind.CONJUNCTION:
        return natural_negation_of_conjunction(b, cfg, validate)
    return natural_negation_of_disjunction(b, cfg, validate)


def _direction(f: UnaryFunction, cfg: NumericConfig) -> str:
    pts = merge_points(cfg.grid(), f.breakpoints)
    v = f.eval(pts)
    if v.max() - v.min() <= cfg.eps_eq:
        raise ConstantFunction(f"{f.name} is constant on the grid")
    d = np.diff(v)
    if np.all(d <= cfg.eps_eq):
        return "decreasing"
    if np.all(d >= -cfg.eps_eq):
        return "increasing"
    raise NotMonotone(f"{f.name} is not monotone on the grid")


def _image_breakpoints(f: UnaryFunction, d: float = 1e-9) -> tuple:
    """Values taken by ``f`` around its own breakpoints; the pseudo-inverse may
    bend there."""
    b = np.asarray(f.breakpoints, dtype=float)
    if b.size == 0:
        return ()
    vals = f.eval(np.concatenate([b, np.clip(b - d, 0, 1), np.clip(b + d, 0, 1)]))
    return tuple(float(v) for v in merge_points(vals, tol=1e-7) if 0.0 < v < 1.0)


def pseudo_inverse(f: UnaryFunction, cfg: NumericConfig = DEFAULT) -> UnaryFunction:
    """``sup{x : f(x) > y}`` for non-increasing ``f`` and ``sup{x : f(x) < y}``
    for non-decreasing ``f``; the supremum of the empty set is 0."""
    direction = _direction(f, cfg)
    iters = cfg.bisect_iters
    if direction == "decreasing":
        def compute(y, known):
            return sup_non_increasing(y, lambda ys, t: f.eval(t) > ys, iters, known=known)
    else:
        def compute(y, known):
            return sup_of_initial_set(lambda j, t: f.eval(t) < y[j], y.size, iters)
    return UnaryFunction(f"pinv[{f.name}]", _Memo(compute),
                         _image_breakpoints(f), None, f"pseudo-inverse of {f.name}")


def _require_continuous_negation(N: UnaryFunction, cfg: NumericConfig):
    r = validate_negation(N, cfg)
    if not r.holds:
        raise NotContinuousNegation(f"{N.name} is not a fuzzy negation: {r}")
    rep = classify_negation(N, cfg)
    if not rep.continuous:
        raise NotContinuousNegation(
            f"{N.name} is not continuous: {rep.witnesses.get('continuous')}")


def aleph(N: UnaryFunction, cfg: NumericConfig = DEFAULT, check: bool = True) -> UnaryFunction:
    """The pseudo-inverse of a continuous negation patched to 1 at 0.

    The result is a strictly decreasing negation with ``N(aleph(x)) = x``.
    With ``check`` those properties are confirmed on the grid.
    """
    if check:
        _require_continuous_negation(N, cfg)
    inv = pseudo_inverse(N, cfg)

    def fn(x):
        x = np.asarray(x, dtype=float)
        return np.where(x == 0.0, 1.0, inv.eval(x))

    a = UnaryFunction(f"aleph[{N.name}]", fn, inv.breakpoints, None,
                      f"patched pseudo-inverse of {N.name}")
    if check:
        _check_aleph(N, a, cfg)
    return a


def _check_aleph(N: UnaryFunction, a: UnaryFunction, cfg: NumericConfig):
    g = cfg.grid()
    r = validate_negation(a, cfg)
    if not r.holds:
        raise PostconditionError(f"{a.name} is not a negation: {r}")
    av = a.eval(g)
    if np.any(np.diff(av) >= 0):
        i = int(np.flatnonzero(np.diff(av) >= 0)[0])
        raise PostconditionError(f"{a.name} not strictly decreasing near x={g[i]!r}")
    err = np.abs(N.eval(av) - g)
    if err.max() > cfg.eps_eq:
        i = int(np.argmax(err))
        raise PostconditionError(f"N(aleph(x)) != x at x={g[i]!r} (error {err[i]!r})")
    back = a.eval(N.eval(av))
    err = np.abs(back - av)
    if err.max() > max(cfg.eps_eq, 1e-7):
        i = int(np.argmax(err))
        raise PostconditionError(f"aleph(N(z)) != z at z={av[i]!r} (error {err[i]!r})")


def implication_from_DN(D: BinaryConnective, N: UnaryFunction,
                        cfg: NumericConfig = DEFAULT, check: bool = True) -> BinaryConnective:
    """``I(x, y) = D(N(x), y)``."""
    _require_kind(D, Kind.DISJUNCTION)
    if check:
        _require_valid(D, cfg)
        r = validate_negation(N, cfg)
        if not r.holds:
            raise InvalidNegation(f"{N.name}: {r}")

    def fn(x, y):
        return D.eval(N.eval(x), y)

    def bps(fixed_axis, v):
        if fixed_axis == "x":
            return D.breakpoints("x", float(N(v)))
        inner = np.asarray(D.breakpoints("y", v), dtype=float)
        pre = monotone_preimages(N, inner) if inner.size else np.array([])
        pre2 = monotone_preimages(N, inner - 1e-12) if inner.size else np.array([])
        return tuple(float(p) for p in merge_points(pre, pre2, N.breakpoints) if 0 < p < 1)

    I = BinaryConnective(f"I[{D.name},{N.name}]", fn, Kind.IMPLICATION, Flags(), None, bps,
                         f"D(N(x), y) with D={D.name}, N={N.name}")
    if check:
        bad = {k: w for k, w in kind_checks(I, cfg).items() if w is not None}
        if bad:
            raise PostconditionError(f"{I.name} is not a fuzzy implication: {bad}")
    return I


def implication_axiom_witnesses(I: BinaryConnective, cfg: NumericConfig,
                                axioms=("I1", "I2", "I3", "I4", "I5")) -> dict:
    """Witness (or None) for each requested implication axiom on the grid."""
    out = {}
    g = cfg.grid2d()
    if "I1" in axioms or "I2" in axioms:
        X, Y = np.meshgrid(g, g, indexing="ij")
        V = I.eval(X, Y)
        if "I1" in axioms:
            out["I1"] = _monotone_violation(V, g, 0, False, cfg.eps_eq)
        if "I2" in axioms:
            out["I2"] = _monotone_violation(V, g, 1, True, cfg.eps_eq)
    corners = {"I3": (0.0, 0.0, 1.0), "I4": (1.0, 1.0, 1.0), "I5": (1.0, 0.0, 0.0)}
    for ax, (x, y, want) in corners.items():
        if ax in axioms:
            got = I(x, y)
            out[ax] = None if got == want else {"point": {"x": x, "y": y},
                                                "values": {"I(x,y)": got, "expected": want}}
    return out


def negation_of_implication(I: BinaryConnective, cfg: NumericConfig = DEFAULT,
                            check_axioms: bool = True) -> UnaryFunction:
    """``x -> I(x, 0)``; needs (I1), (I3) and (I5) unless ``check_axioms`` is off."""
    if check_axioms:
        bad = {k: w for k, w in implication_axiom_witnesses(I, cfg, ("I1", "I3", "I5")).items()
               if w is not None}
        if bad:
            raise AxiomsFailed(f"{I.name} violates {sorted(bad)}: {bad}")
    return UnaryFunction(f"N[{I.name}]", lambda x: I.eval(x, np.zeros_like(x)),
                         I.breakpoints("y", 0.0), None, f"x -> {I.name}(x, 0)")


def disjunction_from_implication(I: BinaryConnective, cfg: NumericConfig = DEFAULT,
                                 negation: Optional[UnaryFunction] = None,
                                 check: bool = True) -> BinaryConnective:
    """``D(x, y) = I(aleph(x), y)`` with ``aleph`` built from ``I``'s own
    negation, or from ``negation`` when one is supplied."""
    N = negation if negation is not None else negation_of_implication(I, cfg, check_axioms=check)
    a = aleph(N, cfg, check=True)

    def fn(x, y):
        return I.eval(a.eval(x), y)

    def bps(fixed_axis, v):
        if fixed_axis == "x":
            return I.breakpoints("x", float(a(v)))
        inner = np.asarray(I.breakpoints("y", v), dtype=float)
        pre = N.eval(inner) if inner.size else np.array([])
        return tuple(float(p) for p in merge_points(pre, a.breakpoints) if 0 < p < 1)

    D = BinaryConnective(f"D[{I.name}]", fn, Kind.DISJUNCTION, Flags(), None, bps,
                         f"I(aleph(x), y) with I={I.name}, N={N.name}")
    if check:
        bad = {k: w for k, w in kind_checks(D, cfg).items() if w is not None}
        if bad:
            raise PostconditionError(f"{D.name} is not a fuzzy disjunction: {bad}")
    return D
