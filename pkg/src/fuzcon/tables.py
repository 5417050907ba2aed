"""Recompute the three reference tables from the catalog and diff them
against the expectations stored with each fixture."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .analysis import check_law
from .catalog import NOT_A_NEGATION
from .classify import classify_negation
from .config import DEFAULT, NumericConfig, merge_points, uniform_grid
from .induction import implication_from_DN, natural_negation, negation_of_implication
from .report import jsonable


@dataclass
class TableRow:
    name: str
    expected: dict
    computed: dict
    errors: dict = field(default_factory=dict)
    ok: bool = True

    def to_dict(self) -> dict:
        return jsonable({"name": self.name, "expected": self.expected,
                         "computed": self.computed, "errors": self.errors, "ok": self.ok})


@dataclass
class TableReport:
    which: int
    rows: list
    tolerance: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_dict(self) -> dict:
        return jsonable({"table": self.which, "ok": self.ok, "tolerance": self.tolerance,
                         "rows": [r.to_dict() for r in self.rows]})

    def to_text(self) -> str:
        out = [f"table {self.which}: {'matches' if self.ok else 'MISMATCH'}"]
        for r in self.rows:
            mark = "ok " if r.ok else "BAD"
            exp = ", ".join(f"{k}={v}" for k, v in r.expected.items())
            err = ", ".join(f"{k}={v:.3g}" for k, v in r.errors.items())
            out.append(f"  {mark} {r.name:8s} {exp}" + (f"  [{err}]" if err else ""))
        return "\n".join(out) + "\n"


def _max_err(f, g, x) -> float:
    return float(np.max(np.abs(f.eval(x) - g.eval(x))))


def table1(points: int = 1001, tol: float = 1e-6, cfg: NumericConfig = DEFAULT) -> TableReport:
    """Natural negations of the conjunction table, on ``points`` uniform
    points plus the breakpoints of both functions."""
    rows = []
    for name in catalog.CONJUNCTION_TABLE:
        fx = catalog.fixture(name)
        N = natural_negation(fx.connective, cfg)
        exp = fx.expected_induced_negation
        if exp is NOT_A_NEGATION:
            at1 = N(1.0)
            ok = not N.is_negation
            rows.append(TableRow(name, {"negation": "none"},
                                 {"negation": "none" if ok else N.name, "N(1)": at1}, {}, ok))
            continue
        x = merge_points(uniform_grid(points), N.breakpoints, exp.breakpoints)
        err = _max_err(N, exp, x)
        ok = N.is_negation and err <= tol
        rows.append(TableRow(name, {"negation": exp.name},
                             {"is_negation": N.is_negation}, {"max_abs": err}, ok))
    return TableReport(1, rows, tol)


def table2(points: int = 101, tol: float = 1e-6, cfg: NumericConfig = DEFAULT) -> TableReport:
    """Natural negations of the disjunction table and the implications they
    induce, on a ``points`` x ``points`` grid."""
    g = uniform_grid(points)
    X, Y = np.meshgrid(g, g, indexing="ij")
    rows = []
    for name in catalog.DISJUNCTION_TABLE:
        fx = catalog.fixture(name)
        N = natural_negation(fx.connective, cfg)
        I = implication_from_DN(fx.connective, N, cfg)
        exp_n, exp_i = fx.expected_induced_negation, fx.expected_implication
        en = _max_err(N, exp_n, g)
        ei = float(np.max(np.abs(I.eval(X, Y) - exp_i.eval(X, Y))))
        rows.append(TableRow(name, {"negation": exp_n.name, "implication": exp_i.name},
                             {"is_negation": N.is_negation},
                             {"negation_max_abs": en, "implication_max_abs": ei},
                             N.is_negation and en <= tol and ei <= tol))
    return TableReport(2, rows, tol)


def independence_row(F, cfg: NumericConfig = DEFAULT) -> tuple:
    fi = check_law("FI", {"implication": F}, cfg).holds
    cond = check_law("COND_4_7", {"implication": F}, cfg).holds
    cont = classify_negation(negation_of_implication(F, cfg, check_axioms=False), cfg).continuous
    return fi, cond, cont


def table3(cfg: NumericConfig = DEFAULT) -> TableReport:
    """The independence matrix: membership in FI, the equal-rows condition
    and continuity of ``x -> F(x, 0)``, compared exactly."""
    rows = []
    cols = catalog.INDEPENDENCE_COLUMNS
    for name in catalog.INDEPENDENCE_ROWS:
        fx = catalog.fixture(name)
        got = independence_row(fx.connective, cfg)
        want = tuple(fx.expected_verdicts[c] for c in cols)
        rows.append(TableRow(name, dict(zip(cols, want)), dict(zip(cols, got)), {}, got == want))
    return TableReport(3, rows)


def reproduce(which: int, cfg: NumericConfig = DEFAULT) -> TableReport:
    if which == 1:
        return table1(cfg=cfg)
    if which == 2:
        return table2(cfg=cfg)
    if which == 3:
        return table3(cfg)
    raise ValueError(f"no table {which}")
