"""Command-line interface.

Exit status: 0 when every verdict holds (or a reproduction matches), 1 when
a check fails or a hypothesis is not met, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np

from . import catalog
from .analysis import THEOREMS, LAWS, check_law, roundtrip, verify_theorem
from .classify import classify_negation
from .config import DEFAULT, NumericConfig, uniform_grid
from .dsl import parse_definitions
from .errors import FuzconError, UnknownName
from .functions import BinaryConnective, Kind, UnaryFunction
from .fuzzer import REGIMES, TARGETS, search_counterexample, sweep
from .induction import (aleph, disjunction_from_implication, implication_from_DN,
                        natural_negation, negation_of_implication, pseudo_inverse)
from .report import CheckResult, Verdict, jsonable
from .tables import reproduce

ENV_CATALOG = "FUZCON_CATALOG"
SLOTS = ("conjunction", "disjunction", "implication", "negation")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- output


def write_atomic(path: str, text: str):
    """Write via a temporary file in the target directory and rename."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v: float) -> str:
    return repr(float(v))


def unary_csv(f: UnaryFunction, x: np.ndarray) -> str:
    """Unary samples use the shared ``x,y,value`` header with ``y`` empty."""
    buf = io.StringIO()
    buf.write("x,y,value\n")
    for a, v in zip(x, f.eval(x)):
        buf.write(f"{_fmt(a)},,{_fmt(v)}\n")
    return buf.getvalue()


def binary_csv(b: BinaryConnective, g: np.ndarray) -> str:
    X, Y = np.meshgrid(g, g, indexing="ij")
    V = b.eval(X, Y)
    buf = io.StringIO()
    buf.write("x,y,value\n")
    for a, c, v in zip(X.ravel(), Y.ravel(), V.ravel()):
        buf.write(f"{_fmt(a)},{_fmt(c)},{_fmt(v)}\n")
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def _emit(args, text: str):
    if getattr(args, "out", None):
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _exit_for(report: CheckResult) -> int:
    return 0 if report.verdict is Verdict.HOLDS else 1


# ---------------------------------------------------------------- operands


class Resolver:
    """Turns operand references into functions.

    A reference is a catalog name, a name from the file in
    ``$FUZCON_CATALOG``, or ``@path`` / ``@path#name`` for a definition
    file (a file with one definition needs no ``#name``).
    """

    def __init__(self, env: Optional[dict] = None):
        env = os.environ if env is None else env
        self._files: dict = {}
        self._extra = {}
        extra = env.get(ENV_CATALOG)
        if extra:
            self._extra = self._load(extra)

    def _load(self, path: str) -> dict:
        if path not in self._files:
            try:
                text = Path(path).read_text(encoding="utf-8")
            except OSError as exc:
                raise UsageError(f"cannot read definition file {path}: {exc}") from None
            self._files[path] = parse_definitions(text)
        return self._files[path]

    def _expr(self, ref: str):
        if ref.startswith("@"):
            path, _, name = ref[1:].partition("#")
            defs = self._load(path)
            if not name:
                if len(defs) != 1:
                    raise UsageError(f"{ref}: file has {len(defs)} definitions, add #name")
                name = next(iter(defs))
            if name not in defs:
                raise UnknownName(f"{name} not defined in {path}")
            return name, defs[name]
        if ref in self._extra:
            return ref, self._extra[ref]
        raise UnknownName(ref)

    def binary(self, ref: str, kind: Kind) -> BinaryConnective:
        if not ref.startswith("@"):
            try:
                b = catalog.connective(ref)
            except UnknownName:
                b = None
            if b is not None:
                if b.kind is not kind and b.kind is not Kind.RAW:
                    raise UsageError(f"{ref} is a {b.kind.value}, not a {kind.value}")
                return b if b.kind is kind else b.with_kind(kind)
        name, expr = self._expr(ref)
        if expr.arity != 2:
            raise UsageError(f"{ref} is unary; a {kind.value} needs x and y")
        return BinaryConnective.from_expr(name, expr, kind, provenance=f"user definition {ref}")

    def unary(self, ref: str) -> UnaryFunction:
        if not ref.startswith("@"):
            try:
                return catalog.negation(ref)
            except UnknownName:
                pass
        name, expr = self._expr(ref)
        if expr.arity != 1:
            raise UsageError(f"{ref} is binary; expected a function of x")
        return UnaryFunction.from_expr(name, expr, f"user definition {ref}")

    def any(self, ref: str):
        """Unary or binary, whichever the reference names."""
        if not ref.startswith("@"):
            try:
                return catalog.lookup(ref)
            except UnknownName:
                pass
        name, expr = self._expr(ref)
        if expr.arity == 1:
            return UnaryFunction.from_expr(name, expr, f"user definition {ref}")
        return BinaryConnective.from_expr(name, expr, Kind.RAW, provenance=f"user definition {ref}")

    def operands(self, args) -> dict:
        ops = {}
        for slot in SLOTS:
            ref = getattr(args, slot, None)
            if ref is None:
                continue
            ops[slot] = self.unary(ref) if slot == "negation" else self.binary(ref, Kind(slot))
        return ops


# ---------------------------------------------------------------- commands


def _config(args) -> NumericConfig:
    try:
        return DEFAULT.with_overrides(args.config or [])
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def cmd_eval(args, res: Resolver, cfg) -> int:
    f = res.any(args.name)
    if args.grid:
        g = uniform_grid(args.grid)
        _emit(args, unary_csv(f, g) if isinstance(f, UnaryFunction) else binary_csv(f, g))
        return 0
    coords = [c for c in (args.x, args.y) if c is not None]
    want = 1 if isinstance(f, UnaryFunction) else 2
    if len(coords) != want:
        raise UsageError(f"{f.name} takes {want} coordinate(s)")
    if any(not 0.0 <= c <= 1.0 for c in coords):
        raise UsageError("coordinates must lie in [0, 1]")
    v = f(*coords)
    _emit(args, f"{_fmt(v)}\n")
    return 0


def cmd_induce(args, res: Resolver, cfg) -> int:
    ops = res.operands(args)
    grid = uniform_grid(args.grid or 101)
    status = 0
    if args.pseudo_inverse:
        out = pseudo_inverse(res.unary(args.pseudo_inverse), cfg)
    elif args.aleph:
        out = aleph(res.unary(args.aleph), cfg)
    elif "conjunction" in ops:
        out = natural_negation(ops["conjunction"], cfg)
        status = 0 if out.is_negation else 1
    elif "disjunction" in ops and "negation" in ops:
        out = implication_from_DN(ops["disjunction"], ops["negation"], cfg)
    elif "disjunction" in ops:
        out = natural_negation(ops["disjunction"], cfg)
        status = 0 if out.is_negation else 1
    elif "implication" in ops and args.rebuild:
        out = disjunction_from_implication(ops["implication"], cfg, ops.get("negation"))
    elif "implication" in ops:
        out = negation_of_implication(ops["implication"], cfg)
    else:
        raise UsageError("induce needs --conjunction, --disjunction, --implication, "
                         "--pseudo-inverse or --aleph")
    text = unary_csv(out, grid) if isinstance(out, UnaryFunction) else binary_csv(out, grid)
    _emit(args, text)
    if status:
        print(f"{out.name} is not a fuzzy negation", file=sys.stderr)
    return status


def cmd_classify(args, res: Resolver, cfg) -> int:
    f = res.any(args.name)
    if isinstance(f, BinaryConnective):
        if f.kind not in (Kind.CONJUNCTION, Kind.DISJUNCTION):
            raise UsageError(f"{f.name}: classify takes a negation or a conjunction/disjunction")
        f = natural_negation(f, cfg)
    _emit(args, _dump(classify_negation(f, cfg).to_dict()))
    return 0


def cmd_check(args, res: Resolver, cfg) -> int:
    if args.law not in LAWS:
        raise UsageError(f"unknown law {args.law!r}; known: {', '.join(sorted(LAWS))}")
    r = check_law(args.law, res.operands(args), cfg)
    _emit(args, r.to_json() + "\n")
    return _exit_for(r)


def cmd_verify(args, res: Resolver, cfg) -> int:
    if args.theorem not in THEOREMS:
        raise UsageError(f"unknown theorem {args.theorem!r}; known: {', '.join(sorted(THEOREMS))}")
    r = verify_theorem(args.theorem, res.operands(args), cfg,
                       enforce_preconditions=not args.no_preconditions)
    _emit(args, r.to_json() + "\n")
    return _exit_for(r)


def cmd_tables(args, res: Resolver, cfg) -> int:
    which = (1, 2, 3) if args.which == "all" else (int(args.which),)
    reports = [reproduce(w, cfg) for w in which]
    if args.json:
        _emit(args, _dump([r.to_dict() for r in reports]))
    else:
        _emit(args, "".join(r.to_text() for r in reports))
    return 0 if all(r.ok for r in reports) else 1


def cmd_roundtrip(args, res: Resolver, cfg) -> int:
    I = res.binary(args.implication, Kind.IMPLICATION)
    N = res.unary(args.negation) if args.negation else None
    r = roundtrip(I, cfg.replace(grid2d_n=args.grid or 101), N)
    _emit(args, r.to_json() + "\n")
    return _exit_for(r)


def cmd_fuzz(args, res: Resolver, cfg) -> int:
    params = {"m": args.m, "commutative": args.commutative, "regime": args.regime,
              "start": args.start}
    if args.sweep:
        summary = sweep(args.target, params, args.budget, cfg)
        _emit(args, _dump(summary))
        return 1 if summary["failing_seeds"] else 0
    bundle = search_counterexample(args.target, params, args.budget, cfg)
    if bundle is None:
        _emit(args, _dump({"target": args.target, "budget": args.budget, "found": False}))
        return 0
    _emit(args, bundle.to_json() + "\n")
    if args.csv:
        write_atomic(args.csv, bundle.grid_csv)
    return 1


def cmd_export(args, res: Resolver, cfg) -> int:
    _emit(args, catalog.export_definitions())
    return 0


# ---------------------------------------------------------------- parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", action="append", metavar="KEY=VALUE",
                   help="override a numeric setting (repeatable)")
    p.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")
    return p


def _operand_args(p):
    for slot in SLOTS:
        p.add_argument(f"--{slot}", metavar="REF")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="fuzcon",
        description="Natural negations, (D,N)-implications and numeric law checks.",
        epilog="Operands are catalog names, names from $FUZCON_CATALOG, or @file[#name].")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("eval", parents=[common], help="evaluate a function")
    p.add_argument("name")
    p.add_argument("x", type=float, nargs="?")
    p.add_argument("y", type=float, nargs="?")
    p.add_argument("--grid", type=int, metavar="N", help="dump N (or NxN) samples as CSV")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("induce", parents=[common], help="construct an induced object")
    _operand_args(p)
    p.add_argument("--rebuild", action="store_true",
                   help="with --implication: the disjunction I(aleph(x), y)")
    p.add_argument("--pseudo-inverse", metavar="REF")
    p.add_argument("--aleph", metavar="REF")
    p.add_argument("--grid", type=int, metavar="N", help="samples per axis (default 101)")
    p.set_defaults(fn=cmd_induce)

    p = sub.add_parser("classify", parents=[common], help="classify a negation")
    p.add_argument("name", help="a negation, or a conjunction/disjunction to classify its N")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("check", parents=[common], help="check a named law")
    p.add_argument("--law", required=True)
    _operand_args(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("verify", parents=[common], help="verify a theorem's conclusion")
    p.add_argument("--theorem", required=True)
    _operand_args(p)
    p.add_argument("--no-preconditions", action="store_true",
                   help="check the conclusion even when a hypothesis fails")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("tables", parents=[common], help="reproduce the reference tables")
    p.add_argument("--which", choices=("1", "2", "3", "all"), default="all")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_tables)

    p = sub.add_parser("roundtrip", parents=[common],
                       help="rebuild an implication from its disjunction and negation")
    p.add_argument("--implication", required=True, metavar="REF")
    p.add_argument("--negation", metavar="REF")
    p.add_argument("--grid", type=int, metavar="N", help="samples per axis (default 101)")
    p.set_defaults(fn=cmd_roundtrip)

    p = sub.add_parser("fuzz", parents=[common], help="search random connectives")
    p.add_argument("--target", required=True, choices=sorted(TARGETS))
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("--m", type=int, default=17)
    p.add_argument("--commutative", action="store_true")
    p.add_argument("--regime", choices=REGIMES + ("mixed",), default="mixed")
    p.add_argument("--start", type=int, default=1, help="first seed")
    p.add_argument("--sweep", action="store_true", help="count outcomes over all seeds")
    p.add_argument("--csv", metavar="PATH", help="grid values of a found instance")
    p.set_defaults(fn=cmd_fuzz)

    p = sub.add_parser("export-catalog", parents=[common],
                       help="print the catalog as a definition file")
    p.set_defaults(fn=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        cfg = _config(args)
        return args.fn(args, Resolver(), cfg)
    except (UsageError, FuzconError, ValueError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"fuzcon: error: {msg}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"fuzcon: cannot write output: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
