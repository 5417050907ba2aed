"""A small piecewise closed-form expression language for connectives.

Sources look like ``max(x + y - 1, 0)`` or
``piece(x + y >= 1 : 1; else : y)``.  Expressions are parsed once into an
immutable tree and evaluated with numpy over arrays of points.  Numeric
literals are exact rationals until evaluation, where each is converted to a
double exactly once.  The grammar is documented in ``docs/grammar.md``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Union

import numpy as np
from scipy.stats import qmc

from .errors import ArityMismatch, CoverageError, DSLSyntaxError, RangeError

__all__ = [
    "ConnectiveExpr",
    "parse_connective",
    "evaluate",
    "section_breakpoints",
    "to_source",
    "parse_definitions",
    "format_definitions",
]


# ---------------------------------------------------------------- AST nodes


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: Fraction


@dataclass(frozen=True)
class Cmp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Piece:
    # each branch is (guard, body); guard is a tuple of Cmp or None for "else"
    branches: tuple


Node = Union[Const, Var, Neg, BinOp, Call, Pow, Piece]


# ---------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|==|:=|[≤≥<>=+\-−*×/÷^(),;:&])
    """,
    re.VERBOSE,
)

_ALIASES = {"−": "-", "×": "*", "÷": "/", "≤": "<=", "≥": ">=", "==": "=", "&": "and"}
_RELOPS = ("<", "<=", "=", ">", ">=")
_FUNCS = {"min": (2, None), "max": (2, None), "sqrt": (1, 1), "pow": (2, 2)}


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "name", "op", "end"
    text: str
    pos: int


def _tokenize(source: str) -> list:
    toks = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise DSLSyntaxError(
                f"unexpected character {source[pos]!r}", source, pos, "a token"
            )
        kind = m.lastgroup
        if kind != "ws":
            text = _ALIASES.get(m.group(), m.group())
            toks.append(_Tok(kind, text, pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(source)))
    return toks


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, expected: str):
        t = self.tok
        found = t.text or "end of input"
        raise DSLSyntaxError(f"unexpected {found!r}", self.source, t.pos, expected)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "name"):
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.error(repr(text))

    def parse(self) -> Node:
        node = self.sum()
        if self.tok.kind != "end":
            self.error("operator or end of input")
        return node

    def sum(self) -> Node:
        node = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            node = _binop(op, node, self.term(), self)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            node = _binop(op, node, self.unary(), self)
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.i += 1
            return _neg(self.unary())
        if self.tok.kind == "op" and self.tok.text == "+":
            self.i += 1
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            pos = self.tok.pos
            exponent = self.unary()
            return _pow(base, exponent, self, pos)
        return base

    def primary(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Const(Fraction(t.text))
        if t.kind == "op" and t.text == "(":
            self.i += 1
            node = self.sum()
            self.expect(")")
            return node
        if t.kind == "name":
            if t.text in ("x", "y"):
                self.i += 1
                return Var(t.text)
            if t.text == "piece":
                self.i += 1
                return self.piece()
            if t.text in _FUNCS:
                self.i += 1
                return self.call(t.text, t.pos)
            raise DSLSyntaxError(
                f"unknown name {t.text!r}", self.source, t.pos,
                "x, y, a number, piece, min, max, sqrt or pow",
            )
        self.error("a number, variable, function call or '('")

    def call(self, fn: str, pos: int) -> Node:
        self.expect("(")
        args = [self.sum()]
        while self.accept(","):
            args.append(self.sum())
        self.expect(")")
        lo, hi = _FUNCS[fn]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise DSLSyntaxError(
                f"{fn} takes {lo}{'+' if hi is None else ''} argument(s), got {len(args)}",
                self.source, pos, "a different argument count",
            )
        if fn == "pow":
            return _pow(args[0], args[1], self, pos)
        if fn == "sqrt":
            return Pow(args[0], Fraction(1, 2))
        if all(isinstance(a, Const) for a in args):
            vals = [a.value for a in args]
            return Const(min(vals) if fn == "min" else max(vals))
        return Call(fn, tuple(args))

    def piece(self) -> Node:
        self.expect("(")
        branches = []
        while True:
            if self.accept("else"):
                guard = None
            else:
                guard = self.guard()
            self.expect(":")
            body = self.sum()
            branches.append((guard, body))
            if guard is None:
                break
            if not self.accept(";"):
                break
            if self.tok.text == ")":  # tolerate a trailing ';'
                break
        self.accept(";")
        self.expect(")")
        return Piece(tuple(branches))

    def guard(self) -> tuple:
        cmps = [self.comparison()]
        while self.accept("and") or self.accept(","):
            cmps.append(self.comparison())
        return tuple(cmps)

    def comparison(self) -> Cmp:
        left = self.sum()
        if not (self.tok.kind == "op" and self.tok.text in _RELOPS):
            self.error("a comparison operator (<, <=, =, >, >=)")
        op = self.tok.text
        self.i += 1
        right = self.sum()
        return Cmp(op, left, right)


def _binop(op: str, a: Node, b: Node, parser: _Parser) -> Node:
    if isinstance(a, Const) and isinstance(b, Const):
        if op == "+":
            return Const(a.value + b.value)
        if op == "-":
            return Const(a.value - b.value)
        if op == "*":
            return Const(a.value * b.value)
        if b.value == 0:
            raise DSLSyntaxError("division by zero", parser.source, parser.tok.pos)
        return Const(a.value / b.value)
    return BinOp(op, a, b)


def _neg(a: Node) -> Node:
    if isinstance(a, Const):
        return Const(-a.value)
    return Neg(a)


def _pow(base: Node, exponent: Node, parser: _Parser, pos: int) -> Node:
    if not isinstance(exponent, Const):
        raise DSLSyntaxError(
            "exponent must be a rational constant", parser.source, pos,
            "a constant exponent",
        )
    e = exponent.value
    if isinstance(base, Const) and e.denominator == 1:
        if base.value == 0 and e < 0:
            raise DSLSyntaxError("zero to a negative power", parser.source, pos)
        return Const(base.value ** int(e))
    return Pow(base, e)


# ---------------------------------------------------------------- printer

_PREC_SUM, _PREC_TERM, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt_fraction(q: Fraction) -> str:
    num, den = abs(q.numerator), q.denominator
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d == 1:
        k = max(twos, fives)
        scaled = num * (10 ** k) // den
        digits = str(scaled).rjust(k + 1, "0")
        text = digits if k == 0 else f"{digits[:-k]}.{digits[-k:]}".rstrip("0").rstrip(".")
    else:
        text = f"({num}/{den})"
    return f"(-{text})" if q < 0 else text


def _pr(node: Node, prec: int) -> str:
    if isinstance(node, Const):
        return _fmt_fraction(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        s = "-" + _pr(node.arg, _PREC_UNARY)
        return s if prec <= _PREC_UNARY else f"({s})"
    if isinstance(node, BinOp):
        if node.op in "+-":
            mine, lp, rp = _PREC_SUM, _PREC_SUM, _PREC_TERM
        else:
            mine, lp, rp = _PREC_TERM, _PREC_TERM, _PREC_UNARY
        s = f"{_pr(node.left, lp)} {node.op} {_pr(node.right, rp)}"
        return s if prec <= mine else f"({s})"
    if isinstance(node, Pow):
        if node.exponent == Fraction(1, 2):
            return f"sqrt({_pr(node.base, 0)})"
        e = node.exponent
        etext = str(e.numerator) if e.denominator == 1 and e >= 0 else f"({e.numerator}/{e.denominator})"
        if e.denominator == 1 and e < 0:
            etext = f"(-{-e.numerator})"
        s = f"{_pr(node.base, _PREC_ATOM)}^{etext}"
        return s if prec <= _PREC_POW else f"({s})"
    if isinstance(node, Call):
        return f"{node.fn}({', '.join(_pr(a, 0) for a in node.args)})"
    if isinstance(node, Piece):
        parts = []
        for guard, body in node.branches:
            if guard is None:
                parts.append(f"else : {_pr(body, 0)}")
            else:
                g = " and ".join(
                    f"{_pr(c.left, 0)} {c.op} {_pr(c.right, 0)}" for c in guard
                )
                parts.append(f"{g} : {_pr(body, 0)}")
        return f"piece({'; '.join(parts)})"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------- evaluation


def _ev(node: Node, env: dict, n: int):
    if isinstance(node, Const):
        return float(node.value)
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_ev(node.arg, env, n)
    if isinstance(node, BinOp):
        a = _ev(node.left, env, n)
        b = _ev(node.right, env, n)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return np.divide(a, b)
    if isinstance(node, Pow):
        base = _ev(node.base, env, n)
        e = node.exponent
        if e == Fraction(1, 2):
            return np.sqrt(base)
        if e.denominator == 1:
            return np.power(base, float(int(e)))
        return np.power(base, float(e))
    if isinstance(node, Call):
        vals = [_ev(a, env, n) for a in node.args]
        reduce = np.minimum if node.fn == "min" else np.maximum
        out = vals[0]
        for v in vals[1:]:
            out = reduce(out, v)
        return out
    if isinstance(node, Piece):
        out = np.empty(n)
        pending = np.arange(n)
        for guard, body in node.branches:
            if pending.size == 0:
                break
            sub = {k: v[pending] for k, v in env.items()}
            if guard is None:
                mask = np.ones(pending.size, dtype=bool)
            else:
                mask = np.ones(pending.size, dtype=bool)
                for c in guard:
                    mask &= _cmp(c, sub, pending.size)
            if mask.any():
                chosen = pending[mask]
                inner = {k: v[mask] for k, v in sub.items()}
                out[chosen] = _ev(body, inner, chosen.size)
            pending = pending[~mask]
        if pending.size:
            point = tuple(float(env[k][pending[0]]) for k in sorted(env))
            raise CoverageError(f"no branch matches the point {point}")
        return out
    raise TypeError(f"not an expression node: {node!r}")


def _cmp(c: Cmp, env: dict, n: int) -> np.ndarray:
    a = _ev(c.left, env, n)
    b = _ev(c.right, env, n)
    if c.op == "<":
        r = np.less(a, b)
    elif c.op == "<=":
        r = np.less_equal(a, b)
    elif c.op == "=":
        r = np.equal(a, b)
    elif c.op == ">":
        r = np.greater(a, b)
    else:
        r = np.greater_equal(a, b)
    return np.broadcast_to(r, (n,))


def _walk(node: Node):
    yield node
    if isinstance(node, Neg):
        yield from _walk(node.arg)
    elif isinstance(node, (BinOp, Cmp)):
        yield from _walk(node.left)
        yield from _walk(node.right)
    elif isinstance(node, Pow):
        yield from _walk(node.base)
    elif isinstance(node, Call):
        for a in node.args:
            yield from _walk(a)
    elif isinstance(node, Piece):
        for guard, body in node.branches:
            for c in guard or ():
                yield from _walk(c)
            yield from _walk(body)


# ---------------------------------------------------------------- public type


class ConnectiveExpr:
    """A parsed expression of arity 1 (variable ``x``) or 2 (``x``, ``y``).

    Instances are immutable; evaluation keeps no state and is thread safe.
    """

    __slots__ = ("body", "arity", "_switches")

    def __init__(self, body: Node, arity: int):
        used = {n.name for n in _walk(body) if isinstance(n, Var)}
        if arity not in (1, 2):
            raise ArityMismatch(f"arity must be 1 or 2, not {arity}")
        if arity == 1 and "y" in used:
            raise ArityMismatch("a unary expression may only use the variable x")
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "_switches", _switch_functions(body))

    def __setattr__(self, name, value):
        raise AttributeError("ConnectiveExpr is immutable")

    def __eq__(self, other):
        if not isinstance(other, ConnectiveExpr):
            return NotImplemented
        return self.arity == other.arity and self.body == other.body

    def __hash__(self):
        return hash((self.arity, self.body))

    def __repr__(self):
        return f"ConnectiveExpr({self.to_source()!r}, arity={self.arity})"

    def to_source(self) -> str:
        return _pr(self.body, 0)

    def evaluate_array(self, x, y=None) -> np.ndarray:
        if self.arity == 1:
            if y is not None:
                raise ArityMismatch("unary expression evaluated with two coordinates")
            xa = np.asarray(x, dtype=float)
            shape = xa.shape
            env = {"x": xa.ravel()}
        else:
            if y is None:
                raise ArityMismatch("binary expression evaluated with one coordinate")
            xa, ya = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
            shape = xa.shape
            env = {"x": xa.ravel(), "y": ya.ravel()}
        n = env["x"].size
        with np.errstate(all="ignore"):
            out = _ev(self.body, env, n)
        return np.broadcast_to(np.asarray(out, dtype=float), (n,)).reshape(shape).copy()

    def __call__(self, *coords) -> float:
        return evaluate(self, coords)

    def breakpoints(self, fixed_axis: Optional[str] = None, fixed_value: float = 0.0) -> tuple:
        return section_breakpoints(self, fixed_axis, fixed_value)


def to_source(expr: ConnectiveExpr) -> str:
    """Canonical source text; parsing it again yields an equal expression."""
    return expr.to_source()


def evaluate(expr: ConnectiveExpr, point) -> float:
    coords = tuple(np.atleast_1d(np.asarray(point, dtype=float)).ravel())
    if len(coords) != expr.arity:
        raise ArityMismatch(f"expected {expr.arity} coordinate(s), got {len(coords)}")
    if any(not (0.0 <= c <= 1.0) for c in coords):
        raise ValueError(f"point {coords} lies outside the unit domain")
    if expr.arity == 1:
        return float(expr.evaluate_array(np.array([coords[0]]))[0])
    return float(expr.evaluate_array(np.array([coords[0]]), np.array([coords[1]]))[0])


def _validation_points(arity: int):
    if arity == 1:
        halton = qmc.Halton(d=1, scramble=False).random(1024)[:, 0]
        return (np.concatenate([np.linspace(0, 1, 4097), halton]),)
    g = np.linspace(0, 1, 65)
    gx, gy = np.meshgrid(g, g, indexing="ij")
    halton = qmc.Halton(d=2, scramble=False).random(4096)
    return (
        np.concatenate([gx.ravel(), halton[:, 0]]),
        np.concatenate([gy.ravel(), halton[:, 1]]),
    )


def parse_connective(source: str, arity: Optional[int] = None, check: bool = True,
                     range_tol: float = 1e-12) -> ConnectiveExpr:
    """Parse ``source`` into a :class:`ConnectiveExpr`.

    The arity is 2 when ``y`` occurs and 1 otherwise, unless given.  With
    ``check`` the expression is evaluated over a validation sample to make
    sure every point hits a branch (``CoverageError``) and every value lies
    in [0, 1] (``RangeError``).
    """
    body = _Parser(source).parse()
    if arity is None:
        arity = 2 if any(isinstance(n, Var) and n.name == "y" for n in _walk(body)) else 1
    expr = ConnectiveExpr(body, arity)
    if check:
        pts = _validation_points(arity)
        vals = expr.evaluate_array(*pts)
        bad = np.flatnonzero(~((vals >= -range_tol) & (vals <= 1 + range_tol)))
        if bad.size:
            i = bad[0]
            where = tuple(float(p[i]) for p in pts)
            raise RangeError(f"{source!r} evaluates to {float(vals[i])!r} at {where}")
    return expr


# ---------------------------------------------------------------- breakpoints


def _switch_functions(body: Node) -> tuple:
    """Differences whose sign decides a guard or a min/max selection."""
    out = []
    for node in _walk(body):
        if isinstance(node, Cmp):
            out.append(BinOp("-", node.left, node.right))
        elif isinstance(node, Call):
            for a, b in combinations(node.args, 2):
                out.append(BinOp("-", a, b))
    seen = []
    for f in out:
        if f not in seen:
            seen.append(f)
    return tuple(seen)


def _snap(t: float) -> float:
    q = Fraction(t).limit_denominator(1 << 16)
    return float(q) if abs(float(q) - t) <= 1e-12 else t


_SCAN = np.linspace(0.0, 1.0, 2049)


def section_breakpoints(expr: ConnectiveExpr, fixed_axis: Optional[str] = None,
                        fixed_value: float = 0.0) -> tuple:
    """Interior points of (0, 1) where a 1-D section may switch branch.

    For a binary expression ``fixed_axis`` names the variable held at
    ``fixed_value`` (``"x"`` means the section varies ``y``).  Candidates are
    the roots of every guard comparison and every min/max argument
    difference along the section.
    """
    if expr.arity == 2:
        if fixed_axis not in ("x", "y"):
            raise ArityMismatch("binary sections need fixed_axis 'x' or 'y'")
        free = "y" if fixed_axis == "x" else "x"
    else:
        free = "x"

    def env_for(t):
        t = np.asarray(t, dtype=float)
        env = {free: t}
        if expr.arity == 2:
            env[fixed_axis] = np.full(t.shape, float(fixed_value))
        return env

    roots = []
    for g in expr._switches:
        with np.errstate(all="ignore"):
            try:
                vals = np.broadcast_to(_ev(g, env_for(_SCAN), _SCAN.size), _SCAN.shape)
            except CoverageError:
                continue
        s = np.sign(vals)
        finite = np.isfinite(vals)
        # strict sign changes between neighbouring samples
        change = finite[:-1] & finite[1:] & (s[:-1] * s[1:] < 0)
        idx = np.flatnonzero(change)
        if idx.size:
            lo, hi = _SCAN[idx].copy(), _SCAN[idx + 1].copy()
            slo = s[idx]
            for _ in range(64):
                mid = 0.5 * (lo + hi)
                with np.errstate(all="ignore"):
                    vm = np.broadcast_to(_ev(g, env_for(mid), mid.size), mid.shape)
                same = np.sign(vm) == slo
                lo = np.where(same, mid, lo)
                hi = np.where(same, hi, mid)
            roots.extend(_snap(float(r)) for r in 0.5 * (lo + hi))
        # exact zeros; a run of zeros contributes its two ends
        zero = finite & (vals == 0)
        if zero.all():
            continue
        runs = np.flatnonzero(np.diff(np.concatenate(([0], zero.astype(int), [0]))))
        for start, stop in zip(runs[::2], runs[1::2]):
            roots.append(float(_SCAN[start]))
            roots.append(float(_SCAN[stop - 1]))
    pts = sorted({r for r in roots if 0.0 < r < 1.0})
    merged = []
    for p in pts:
        if not merged or p - merged[-1] > 1e-12:
            merged.append(p)
    return tuple(merged)


# ---------------------------------------------------------------- definition files

_DEF_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*)\s*:=\s*(.+?)\s*$")


def parse_definitions(text: str, check: bool = True) -> dict:
    """Parse ``name := expr`` lines; ``#`` starts a comment."""
    defs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _DEF_RE.match(line)
        if m is None:
            raise DSLSyntaxError(f"line {lineno}: expected 'name := expression'", raw, 0,
                                 "name := expression")
        name, source = m.groups()
        if name in defs:
            raise DSLSyntaxError(f"line {lineno}: duplicate definition {name!r}", raw, 0)
        try:
            defs[name] = parse_connective(source, check=check)
        except DSLSyntaxError as exc:
            raise DSLSyntaxError(f"line {lineno} ({name}): {exc}", source, exc.position,
                                 exc.expected) from exc
    return defs


def format_definitions(items, comments: Optional[dict] = None) -> str:
    """Render ``(name, expr)`` pairs as a definition file."""
    comments = comments or {}
    lines = []
    for name, expr in items:
        c = comments.get(name)
        for text in ([c] if isinstance(c, str) else c or []):
            lines.append(f"# {text}")
        lines.append(f"{name} := {expr.to_source()}")
    return "\n".join(lines) + "\n"
