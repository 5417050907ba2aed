"""Evaluable unary functions and binary connectives on the unit interval."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .dsl import ConnectiveExpr, parse_connective


class Kind(str, Enum):
    CONJUNCTION = "conjunction"
    DISJUNCTION = "disjunction"
    IMPLICATION = "implication"
    RAW = "raw"


@dataclass(frozen=True)
class Neutral:
    value: float
    side: str = "both"  # "left", "right" or "both"

    def __post_init__(self):
        if self.side not in ("left", "right", "both"):
            raise ValueError(f"bad neutral side {self.side!r}")


@dataclass(frozen=True)
class Flags:
    """Structural properties declared for a connective.

    ``None`` means "not declared"; declared values are cross-checked by
    :func:`fuzcon.validation.validate_connective`.
    """

    commutative: Optional[bool] = None
    associative: Optional[bool] = None
    left_continuous: Optional[bool] = None
    right_continuous: Optional[bool] = None
    neutral: Optional[Neutral] = None

    @classmethod
    def t_norm(cls, **kw):
        return cls(commutative=True, associative=True, neutral=Neutral(1.0), **kw)

    @classmethod
    def t_conorm(cls, **kw):
        return cls(commutative=True, associative=True, neutral=Neutral(0.0), **kw)


def _as_float_result(out, scalar: bool):
    return float(out) if scalar else out


@dataclass(frozen=True, eq=False)
class UnaryFunction:
    """A map [0, 1] -> [0, 1] evaluated over numpy arrays.

    ``func`` takes and returns float arrays of equal shape.  ``breakpoints``
    lists interior points where the function may jump or kink.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple = ()
    expr: Optional[ConnectiveExpr] = None
    provenance: str = ""

    @classmethod
    def from_expr(cls, name: str, expr, provenance: str = "") -> "UnaryFunction":
        if isinstance(expr, str):
            expr = parse_connective(expr, arity=1)
        return cls(name, expr.evaluate_array, expr.breakpoints(), expr, provenance)

    def eval(self, x) -> np.ndarray:
        xa = np.asarray(x, dtype=float)
        return np.asarray(self.func(xa), dtype=float).reshape(xa.shape)

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        return _as_float_result(self.eval(x), scalar)

    def __repr__(self):
        return f"UnaryFunction({self.name!r})"


@dataclass(frozen=True, eq=False)
class BinaryConnective:
    """A map [0, 1]^2 -> [0, 1] with a kind and declared structural flags.

    ``breakpoint_fn(fixed_axis, value)`` returns the interior points where
    the section with ``fixed_axis`` held at ``value`` may switch branch.
    """

    name: str
    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    kind: Kind = Kind.RAW
    flags: Flags = field(default_factory=Flags)
    expr: Optional[ConnectiveExpr] = None
    breakpoint_fn: Optional[Callable[[str, float], tuple]] = None
    provenance: str = ""

    @classmethod
    def from_expr(cls, name: str, expr, kind: Kind = Kind.RAW, flags: Flags = None,
                  provenance: str = "") -> "BinaryConnective":
        if isinstance(expr, str):
            expr = parse_connective(expr, arity=2)
        return cls(name, expr.evaluate_array, Kind(kind), flags or Flags(), expr,
                   expr.breakpoints, provenance)

    def eval(self, x, y) -> np.ndarray:
        xa, ya = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.asarray(self.func(xa, ya), dtype=float).reshape(xa.shape)

    def __call__(self, x, y):
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        return _as_float_result(self.eval(x, y), scalar)

    def breakpoints(self, fixed_axis: str, value: float) -> tuple:
        if self.breakpoint_fn is None:
            return ()
        return tuple(self.breakpoint_fn(fixed_axis, float(value)))

    def with_kind(self, kind: Kind, flags: Flags = None, name: str = None) -> "BinaryConnective":
        return BinaryConnective(name or self.name, self.func, Kind(kind),
                                flags if flags is not None else self.flags,
                                self.expr, self.breakpoint_fn, self.provenance)

    def __repr__(self):
        return f"BinaryConnective({self.name!r}, kind={self.kind.value})"


def monotone_preimages(f: UnaryFunction, values, iters: int = 64) -> np.ndarray:
    """For non-increasing ``f``, the points ``sup{x : f(x) > v}`` (0 if empty)."""
    v = np.atleast_1d(np.asarray(values, dtype=float))
    lo = np.zeros_like(v)
    hi = np.ones_like(v)
    inside0 = f.eval(lo) > v
    at1 = f.eval(hi) > v
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ins = f.eval(mid) > v
        lo = np.where(ins, mid, lo)
        hi = np.where(ins, hi, mid)
    out = np.where(at1, 1.0, lo)
    return np.where(inside0, out, 0.0)
