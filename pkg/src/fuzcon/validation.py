"""Validation of connectives and negations against their declared kind and flags."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .config import DEFAULT, NumericConfig, merge_points, uniform_grid
from .continuity import detect_continuity_2d
from .functions import BinaryConnective, Kind, UnaryFunction
from .report import CheckResult, Verdict, jsonable, make_witness


def grid_values(b: BinaryConnective, cfg: NumericConfig):
    g = cfg.grid2d()
    X, Y = np.meshgrid(g, g, indexing="ij")
    return g, b.eval(X, Y)


def _monotone_violation(V, g, axis: int, increasing: bool, eps: float):
    d = np.diff(V, axis=axis)
    bad = d < -eps if increasing else d > eps
    if not bad.any():
        return None
    i, j = np.argwhere(bad)[0]
    i2, j2 = (i + 1, j) if axis == 0 else (i, j + 1)
    return make_witness(
        {"x1": g[i], "y1": g[j], "x2": g[i2], "y2": g[j2]},
        {"value1": V[i, j], "value2": V[i2, j2]},
    )


_CORNERS = {
    Kind.CONJUNCTION: {(1.0, 1.0): 1.0, (0.0, 0.0): 0.0, (1.0, 0.0): 0.0, (0.0, 1.0): 0.0},
    Kind.DISJUNCTION: {(0.0, 0.0): 0.0, (1.0, 1.0): 1.0, (1.0, 0.0): 1.0, (0.0, 1.0): 1.0},
    Kind.IMPLICATION: {(0.0, 0.0): 1.0, (1.0, 1.0): 1.0, (1.0, 0.0): 0.0},
}


def kind_checks(b: BinaryConnective, cfg: NumericConfig) -> dict:
    """Boundary conditions (exact) and grid monotonicity for ``b.kind``.

    Returns ``{check_name: witness-or-None}``.
    """
    out = {}
    g, V = grid_values(b, cfg)
    if np.isnan(V).any() or (V < 0).any() or (V > 1).any():
        i, j = np.argwhere(np.isnan(V) | (V < 0) | (V > 1))[0]
        out["range"] = make_witness({"x": g[i], "y": g[j]}, {"value": V[i, j]})
    else:
        out["range"] = None
    if b.kind is Kind.RAW:
        return out
    for (x, y), want in _CORNERS[b.kind].items():
        got = b(x, y)
        out[f"corner({x:g},{y:g})"] = (None if got == want else
                                       make_witness({"x": x, "y": y}, {"value": got, "expected": want}))
    if b.kind is Kind.IMPLICATION:
        out["I1"] = _monotone_violation(V, g, 0, False, cfg.eps_eq)
        out["I2"] = _monotone_violation(V, g, 1, True, cfg.eps_eq)
    else:
        out["monotone_x"] = _monotone_violation(V, g, 0, True, cfg.eps_eq)
        out["monotone_y"] = _monotone_violation(V, g, 1, True, cfg.eps_eq)
        absorbing = 0.0 if b.kind is Kind.CONJUNCTION else 1.0
        edge = np.concatenate([V[0, :], V[:, 0]]) if absorbing == 0.0 else \
            np.concatenate([V[-1, :], V[:, -1]])
        bad = np.flatnonzero(edge != absorbing)
        out["absorbing"] = None if bad.size == 0 else make_witness(
            {"index": int(bad[0])}, {"value": edge[bad[0]], "expected": absorbing})
    return out


@lru_cache(maxsize=1024)
def verified_flags(b: BinaryConnective, cfg: NumericConfig = DEFAULT) -> dict:
    """Numerically established structural flags of ``b`` with witnesses.

    Each entry is ``(verdict, witness_or_None)``.
    """
    g, V = grid_values(b, cfg)
    flags = {}

    asym = np.abs(V - V.T)
    if asym.max() <= cfg.eps_eq:
        flags["commutative"] = (True, None)
    else:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        flags["commutative"] = (False, make_witness(
            {"x": g[i], "y": g[j]}, {"C(x,y)": V[i, j], "C(y,x)": V[j, i]}))

    a = uniform_grid(cfg.assoc_n)
    X, Y, Z = np.meshgrid(a, a, a, indexing="ij")
    lhs = b.eval(b.eval(X, Y), Z)
    rhs = b.eval(X, b.eval(Y, Z))
    err = np.abs(lhs - rhs)
    if err.max() <= cfg.eps_eq:
        flags["associative"] = (True, None)
    else:
        i, j, k = np.unravel_index(int(np.argmax(err)), err.shape)
        flags["associative"] = (False, make_witness(
            {"x": a[i], "y": a[j], "z": a[k]}, {"lhs": lhs[i, j, k], "rhs": rhs[i, j, k]}))

    cont = detect_continuity_2d(b, cfg)
    for side, ok in (("left_continuous", cont.left_continuous),
                     ("right_continuous", cont.right_continuous)):
        wanted = ("left", "both") if side.startswith("left") else ("right", "both")
        bad = [j for j in cont.jumps if j.side in wanted]
        flags[side] = (ok, None if ok else make_witness(
            bad[0].point(), {"jump": bad[0].magnitude, "varying": bad[0].axis}))
    for axis in ("x", "y"):
        for side in ("left", "right"):
            bad = [j for j in cont.jumps if j.axis == axis and j.side in (side, "both")]
            flags[f"{side}_continuous_{axis}"] = (not bad, None if not bad else make_witness(
                bad[0].point(), {"jump": bad[0].magnitude, "varying": axis}))
    flags["continuous"] = (cont.continuous, None if cont.continuous else make_witness(
        {k: v for k, v in cont.location.items() if k in ("x", "y")},
        {"jump": cont.max_jump, "varying": cont.location["varying"]}))

    for e in (0.0, 1.0):
        idx = 0 if e == 0.0 else -1
        left = np.abs(V[idx, :] - g)  # b(e, y) = y
        right = np.abs(V[:, idx] - g)  # b(x, e) = x
        for side, diff in (("left", left), ("right", right)):
            k = int(np.argmax(diff))
            ok = bool(diff[k] <= cfg.eps_eq)
            pt = {"x": e, "y": g[k]} if side == "left" else {"x": g[k], "y": e}
            flags[f"{side}_neutral_{int(e)}"] = (ok, None if ok else make_witness(
                pt, {"value": V[idx, k] if side == "left" else V[k, idx], "expected": g[k]}))
    return flags


def _neutral_ok(flags: dict, value: float, side: str) -> tuple:
    e = int(value)
    if value not in (0.0, 1.0):
        return False, make_witness({"e": value}, {"note": "only 0 and 1 are checked"})
    sides = ("left", "right") if side == "both" else (side,)
    for s in sides:
        ok, w = flags[f"{s}_neutral_{e}"]
        if not ok:
            return False, w
    return True, None


def validate_connective(b: BinaryConnective, cfg: NumericConfig = DEFAULT) -> CheckResult:
    """Kind boundary conditions, grid monotonicity and every declared flag."""
    law_id = f"VALID_{b.kind.value.upper()}"
    checks = kind_checks(b, cfg)
    flags = verified_flags(b, cfg)
    flag_report = {}
    first_fail = None
    for name, w in checks.items():
        if w is not None and first_fail is None:
            first_fail = (name, w)
    declared = b.flags
    for name in ("commutative", "associative", "left_continuous", "right_continuous"):
        want = getattr(declared, name)
        got, w = flags[name]
        entry = {"declared": want, "verified": got}
        if w is not None:
            # the point that refutes the flag, whatever was declared
            entry["witness"] = w
        if want is not None:
            entry["ok"] = want == got
            if want != got:
                if first_fail is None:
                    first_fail = (name, w or make_witness({}, {"declared": want, "verified": got}))
        flag_report[name] = entry
    for name in ("left_continuous_x", "left_continuous_y", "right_continuous_x",
                 "right_continuous_y", "continuous"):
        flag_report[name] = {"declared": None, "verified": flags[name][0]}
    if declared.neutral is not None:
        ok, w = _neutral_ok(flags, declared.neutral.value, declared.neutral.side)
        flag_report["neutral"] = {"declared": [declared.neutral.value, declared.neutral.side],
                                  "verified": ok, "ok": ok}
        if not ok and first_fail is None:
            first_fail = ("neutral", w)
    details = {"name": b.name, "kind": b.kind.value,
               "checks": {k: w is None for k, w in checks.items()},
               "flags": flag_report}
    if first_fail is None:
        return CheckResult(law_id, Verdict.HOLDS, None, jsonable(details), cfg.to_dict())
    name, w = first_fail
    return CheckResult(law_id, Verdict.FAILS, w, jsonable(details), cfg.to_dict(),
                       f"{b.name}: {name} failed")


def validate_negation(f: UnaryFunction, cfg: NumericConfig = DEFAULT) -> CheckResult:
    """N(0)=1 and N(1)=0 exactly, and non-increase on the grid plus breakpoints."""
    n0, n1 = f(0.0), f(1.0)
    details = {"name": f.name, "N(0)": n0, "N(1)": n1}
    if n0 != 1.0:
        return CheckResult("VALID_NEGATION", Verdict.FAILS, make_witness({"x": 0.0}, {"N(x)": n0, "expected": 1.0}),
                           details, cfg.to_dict(), f"{f.name}: N(0) != 1")
    if n1 != 0.0:
        return CheckResult("VALID_NEGATION", Verdict.FAILS, make_witness({"x": 1.0}, {"N(x)": n1, "expected": 0.0}),
                           details, cfg.to_dict(), f"{f.name}: N(1) != 0")
    pts = merge_points(cfg.grid(), f.breakpoints)
    v = f.eval(pts)
    if (v < 0).any() or (v > 1).any() or np.isnan(v).any():
        i = int(np.flatnonzero((v < 0) | (v > 1) | np.isnan(v))[0])
        return CheckResult("VALID_NEGATION", Verdict.FAILS, make_witness({"x": pts[i]}, {"N(x)": v[i]}),
                           details, cfg.to_dict(), f"{f.name}: value outside [0,1]")
    rises = np.flatnonzero(v[1:] > v[:-1] + cfg.eps_eq)
    if rises.size:
        i = int(rises[0])
        return CheckResult("VALID_NEGATION", Verdict.FAILS,
                           make_witness({"x1": pts[i], "x2": pts[i + 1]}, {"N(x1)": v[i], "N(x2)": v[i + 1]}),
                           details, cfg.to_dict(), f"{f.name}: not non-increasing")
    return CheckResult("VALID_NEGATION", Verdict.HOLDS, None, jsonable(details), cfg.to_dict())
