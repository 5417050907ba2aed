"""Named connectives, negations and implications with their expected outcomes.

Every fixture is written in the expression language, so the catalog is plain
code and bit-identical across runs.  ``load_catalog`` validates each entry
against its declared kind and flags before handing it out.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional, Union

from .config import DEFAULT, NumericConfig
from .dsl import format_definitions
from .errors import CatalogCorrupt, UnknownName
from .functions import BinaryConnective, Flags, Kind, Neutral, UnaryFunction


class _NotANegation:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "NOT_A_NEGATION"


NOT_A_NEGATION = _NotANegation()


@dataclass(frozen=True, eq=False)
class Fixture:
    connective: BinaryConnective
    expected_induced_negation: Union[UnaryFunction, _NotANegation, None] = None
    expected_implication: Optional[BinaryConnective] = None
    expected_verdicts: dict = field(default_factory=dict)
    provenance: str = ""
    expected_disjunction: Optional[BinaryConnective] = None

    @property
    def name(self) -> str:
        return self.connective.name

    @property
    def kind(self) -> Kind:
        return self.connective.kind


CONJ, DISJ, IMPL, RAW = Kind.CONJUNCTION, Kind.DISJUNCTION, Kind.IMPLICATION, Kind.RAW

# name, source, provenance
_NEGATIONS = [
    ("N_S", "1 - x", "standard negation"),
    ("N_G1", "piece(x = 0 : 1 ; else : 0)", "least fuzzy negation"),
    ("N_G2", "piece(x = 1 : 0 ; else : 1)", "greatest fuzzy negation"),
    ("N_4", "sqrt(1 - x^2)", "disjunction table, row D_4"),
    ("N_I4", "1 - x^2", "negation x -> I_4(x, 0); differs from N_4 since D_4 has no right neutral 0"),
    ("N_5", "(1 - x)^2", "disjunction table, row D_5; also the negation of C_sqrt"),
    ("N_split", "piece(x < 0.5 : 1 - 0.5*x ; else : 1 - x)",
     "negation of C_split: strictly decreasing with a jump at 0.5"),
    ("N_flat", "piece(x <= 0.5 : 1 - 2*x ; else : 0)",
     "continuous negation that vanishes on [0.5, 1]; its pseudo-inverse is not a negation"),
    ("N_flat_pinv", "0.5 - 0.5*x", "pseudo-inverse of N_flat"),
    ("N_flat_aleph", "piece(x = 0 : 1 ; else : 0.5 - 0.5*x)", "patched pseudo-inverse of N_flat"),
]

# name, source, kind, flags, provenance
_CONNECTIVES = [
    # conjunctions and their natural negations
    ("C_0", "piece(x = 1 and y = 1 : 1 ; else : 0)", CONJ,
     Flags(commutative=True, associative=True, left_continuous=False, right_continuous=True),
     "conjunction table, row C_0"),
    ("C_1", "piece(x = 0 : 0 ; y = 0 : 0 ; else : 1)", CONJ,
     Flags(commutative=True, associative=True, left_continuous=True, right_continuous=False),
     "conjunction table, row C_1"),
    ("C_2", "piece(x = 1 : y ; else : 0)", CONJ,
     Flags(commutative=False, left_continuous=False), "conjunction table, row C_2"),
    ("C_3", "piece(y = 1 : x ; else : 0)", CONJ,
     Flags(commutative=False, left_continuous=False), "conjunction table, row C_3"),
    ("C_4", "piece(x + y <= 1 : 0 ; else : y)", CONJ,
     Flags(commutative=False, left_continuous=True, right_continuous=False),
     "conjunction table, row C_4; also an instance of the zero-below-antidiagonal template"),
    ("C_5", "piece(y = 0 : 0 ; else : x)", CONJ,
     Flags(commutative=False, left_continuous=True, right_continuous=False),
     "conjunction table, row C_5"),
    ("T_M", "min(x, y)", CONJ,
     Flags.t_norm(left_continuous=True, right_continuous=True), "conjunction table, row T_M"),
    ("T_P", "x*y", CONJ,
     Flags.t_norm(left_continuous=True, right_continuous=True), "conjunction table, row T_P"),
    ("T_L", "max(x + y - 1, 0)", CONJ,
     Flags.t_norm(left_continuous=True, right_continuous=True), "conjunction table, row T_L"),
    ("T_D", "piece(x < 1 and y < 1 : 0 ; else : min(x, y))", CONJ,
     Flags.t_norm(left_continuous=False, right_continuous=True), "conjunction table, row T_D"),
    ("T_nM", "piece(x + y <= 1 : 0 ; else : min(x, y))", CONJ,
     Flags.t_norm(left_continuous=True, right_continuous=False), "conjunction table, row T_nM"),
    ("C_sqrt", "max(x + sqrt(y) - 1, 0)", CONJ,
     Flags(commutative=False, left_continuous=True, right_continuous=True),
     "non-commutative conjunction whose negation is continuous but not strong"),
    ("C_split", "piece(x < 0.5 : max(0.5*x + y - 1, 0) ; else : max(x + y - 1, 0))", CONJ,
     Flags(commutative=False, left_continuous=False, right_continuous=True),
     "non-commutative conjunction whose negation is strictly decreasing but not continuous"),
    ("C_antidiag", "piece(x + y <= 1 : 0 ; else : x*y^2)", CONJ,
     Flags(commutative=False, left_continuous=True, right_continuous=False),
     "zero-below-antidiagonal template with a non-commutative upper part"),
    # disjunctions
    ("D_1", "piece(x = 0 : y ; else : 1)", DISJ,
     Flags(commutative=False, left_continuous=True, right_continuous=False,
           neutral=Neutral(0.0, "left")),
     "disjunction table, row D_1"),
    ("D_2", "piece(x + y >= 1 : 1 ; else : y)", DISJ,
     Flags(commutative=False, left_continuous=False, right_continuous=True,
           neutral=Neutral(0.0, "left")),
     "disjunction table, row D_2"),
    ("D_3", "piece(x + y >= 1 : 1 ; else : x)", DISJ,
     Flags(commutative=False, left_continuous=False, right_continuous=True,
           neutral=Neutral(0.0, "right")),
     "disjunction table, row D_3"),
    ("D_4", "min(1, x^2 + y^2)", DISJ,
     Flags(commutative=True, associative=False, left_continuous=True, right_continuous=True),
     "disjunction table, row D_4"),
    ("D_5", "min(1, x + sqrt(y))", DISJ,
     Flags(commutative=False, left_continuous=True, right_continuous=True,
           neutral=Neutral(0.0, "right")),
     "disjunction table, row D_5"),
    ("D_6", "piece(x = 0 and y = 0 : 0 ; x = 1 : 1 ; y = 1 : 1 ; else : x)", DISJ,
     Flags(commutative=False, left_continuous=False, right_continuous=True,
           neutral=Neutral(0.0, "right")),
     "disjunction table, row D_6"),
    ("D_7", "piece(x = 0 and y = 0 : 0 ; x = 1 : 1 ; y = 1 : 1 ; else : y)", DISJ,
     Flags(commutative=False, left_continuous=False, right_continuous=True,
           neutral=Neutral(0.0, "left")),
     "disjunction table, row D_7"),
    ("D_open", "piece(x + y > 1 : 1 ; else : x^2 + y^2)", DISJ,
     Flags(commutative=True, left_continuous=True, right_continuous=False),
     "commutative disjunction with an open one-region: (D_open, N_S) violates excluded middle"),
    ("D_RC_flat", "piece(x = 0 : y ; else : 0.5*(x + y - x*y + 1))", DISJ,
     Flags(commutative=False, right_continuous=False, neutral=Neutral(0.0, "left")),
     "disjunction rebuilt from I_RC with the patched pseudo-inverse of N_flat; "
     "the printed x=0 row '1-x+xy' contradicts 1-(1-y)*aleph(0), the value y is used"),
    ("D_I4", "min(1, x + y^2)", DISJ,
     Flags(commutative=False, left_continuous=True, right_continuous=True,
           neutral=Neutral(0.0, "right")),
     "disjunction rebuilt from I_4 through its own negation 1 - x^2"),
    # implications
    ("I_1", "piece(x = 0 : 1 ; else : y)", IMPL, Flags(), "disjunction table, implication of D_1"),
    ("I_GD", "piece(x <= y : 1 ; else : y)", IMPL, Flags(),
     "Goedel implication; disjunction table, implication of D_2"),
    ("I_3", "piece(x <= y : 1 ; else : 1 - x)", IMPL, Flags(), "disjunction table, implication of D_3"),
    ("I_4", "min(1, 1 - x^2 + y^2)", IMPL, Flags(), "disjunction table, implication of D_4"),
    ("I_5", "min(1, (1 - x)^2 + sqrt(y))", IMPL, Flags(), "disjunction table, implication of D_5"),
    ("I_6", "piece(x = 1 and y < 1 : 0 ; else : 1)", IMPL, Flags(),
     "disjunction table, implication of D_6"),
    ("I_WB", "piece(x < 1 : 1 ; else : y)", IMPL, Flags(),
     "Weber implication; disjunction table, implication of D_7"),
    ("I_RS", "piece(x <= y : 1 ; else : 0)", IMPL, Flags(),
     "Rescher-Gaines implication; independence table, row 1"),
    ("I_RC", "1 - x + x*y", IMPL, Flags(left_continuous=True, right_continuous=True),
     "Reichenbach implication; continuous implication used to show strictness is needed"),
    # raw functions of the independence table
    ("F_2", "piece(x = 0 : 1 ; x < 0.5 : 0.5 ; else : y)", RAW, Flags(), "independence table, row 2"),
    ("F_3", "piece(x <= 0.5 : min(1, max(-2*x + y + 1, 0)) ; else : 0)", RAW, Flags(),
     "independence table, row 3; clamped at 1 so the values stay in [0, 1]"),
    ("F_4", "piece(x = 0 : 1 ; x <= 0.5 : max(0.5, y) ; else : y)", RAW, Flags(),
     "independence table, row 4"),
    ("F_5", "piece(x > y : max(1 - 2*x, 0) ; else : 1)", RAW, Flags(), "independence table, row 5"),
    ("F_6", "piece(x < 0.5 and y > 0 : 0 ; x >= 0.5 and y > 0 : 1 ; y = 0 : 1 - x)", RAW, Flags(),
     "independence table, row 6"),
]

# fixture -> expected induced negation (conjunctions, disjunctions) or N_I (implications)
_EXPECTED_NEGATION = {
    "C_0": None, "C_1": "N_G1", "C_2": "N_G2", "C_3": None, "C_4": "N_S", "C_5": "N_G1",
    "T_M": "N_G1", "T_P": "N_G1", "T_L": "N_S", "T_D": "N_G2", "T_nM": "N_S",
    "C_sqrt": "N_5", "C_split": "N_split", "C_antidiag": "N_S",
    "D_1": "N_G1", "D_2": "N_S", "D_3": "N_S", "D_4": "N_4", "D_5": "N_5",
    "D_6": "N_G2", "D_7": "N_G2", "D_open": "N_S",
    "I_1": "N_G1", "I_GD": "N_G1", "I_3": "N_S", "I_4": "N_I4", "I_5": "N_5", "I_6": "N_G2",
    "I_WB": "N_G2", "I_RS": "N_G1", "I_RC": "N_S",
}

_EXPECTED_IMPLICATION = {
    "D_1": "I_1", "D_2": "I_GD", "D_3": "I_3", "D_4": "I_4", "D_5": "I_5", "D_6": "I_6",
    "D_7": "I_WB",
}

# implication -> disjunction recovered from it through its own negation
_EXPECTED_DISJUNCTION = {"I_3": "D_3", "I_5": "D_5", "I_4": "D_I4"}

# columns: member of FI, condition that equal negation values force equal rows,
# continuity of x -> F(x, 0)
INDEPENDENCE_COLUMNS = ("FI", "COND_4_7", "N_F_CONTINUOUS")
INDEPENDENCE_ROWS = ("I_RS", "F_2", "F_3", "F_4", "F_5", "F_6")
_INDEPENDENCE = {
    "I_RS": (True, False, False),
    "F_2": (False, True, False),
    "F_3": (False, False, True),
    "F_4": (True, True, False),
    "F_5": (True, False, True),
    "F_6": (False, True, True),
}

_EXTRA_VERDICTS = {
    "C_sqrt": {"COMMUTATIVE": False, "N_CONTINUOUS": True, "N_STRICTLY_DECREASING": True,
               "N_STRONG": False},
    "C_split": {"COMMUTATIVE": False, "N_CONTINUOUS": False, "N_STRICTLY_DECREASING": True,
                "N_STRONG": False},
    "D_open": {"LEM": False, "LEM_INEQ": True},
}

CONJUNCTION_TABLE = ("C_0", "C_1", "C_2", "C_3", "C_4", "C_5", "T_M", "T_P", "T_L", "T_D", "T_nM")
DISJUNCTION_TABLE = ("D_1", "D_2", "D_3", "D_4", "D_5", "D_6", "D_7")


def _build():
    negs = {n: UnaryFunction.from_expr(n, src, prov) for n, src, prov in _NEGATIONS}
    conns = {n: BinaryConnective.from_expr(n, src, kind, flags, prov)
             for n, src, kind, flags, prov in _CONNECTIVES}
    fixtures = {}
    for n, _src, kind, _flags, prov in _CONNECTIVES:
        verdicts = dict(_EXTRA_VERDICTS.get(n, {}))
        if n in _EXPECTED_NEGATION:
            en = _EXPECTED_NEGATION[n]
            neg = NOT_A_NEGATION if en is None else negs[en]
            if kind is CONJ or kind is DISJ:
                verdicts["IS_NEGATION"] = en is not None
        else:
            neg = None
        if n in _INDEPENDENCE:
            verdicts.update(zip(INDEPENDENCE_COLUMNS, _INDEPENDENCE[n]))
        imp = conns[_EXPECTED_IMPLICATION[n]] if n in _EXPECTED_IMPLICATION else None
        dis = conns[_EXPECTED_DISJUNCTION[n]] if n in _EXPECTED_DISJUNCTION else None
        fixtures[n] = Fixture(conns[n], neg, imp, verdicts, prov, dis)
    return negs, fixtures


_lock = threading.Lock()
_state: dict = {}


def _ensure():
    with _lock:
        if "built" not in _state:
            _state["negations"], _state["fixtures"] = _build()
            _state["built"] = True
    return _state["negations"], _state["fixtures"]


def _validate_all(cfg: NumericConfig):
    from .validation import validate_connective, validate_negation

    negs, fixtures = _ensure()
    for f in negs.values():
        if f.name in ("N_flat_pinv",):
            continue  # deliberately not a negation: value 0.5 at 0
        r = validate_negation(f, cfg)
        if not r.holds:
            raise CatalogCorrupt(f"negation {f.name}: {r}")
    for fx in fixtures.values():
        r = validate_connective(fx.connective, cfg)
        if not r.holds:
            raise CatalogCorrupt(f"fixture {fx.name}: {r}")


def load_catalog(validate: bool = True, cfg: NumericConfig = DEFAULT) -> list:
    """All fixtures in declaration order.

    With ``validate`` every fixture and negation is checked once per config;
    a failure raises :class:`CatalogCorrupt`.
    """
    _, fixtures = _ensure()
    if validate:
        key = ("validated", cfg)
        with _lock:
            done = key in _state
        if not done:
            _validate_all(cfg)
            with _lock:
                _state[key] = True
    return list(fixtures.values())


def negations() -> dict:
    return dict(_ensure()[0])


def fixture(name: str) -> Fixture:
    _, fixtures = _ensure()
    try:
        return fixtures[name]
    except KeyError:
        raise UnknownName(name) from None


def connective(name: str) -> BinaryConnective:
    return fixture(name).connective


def negation(name: str) -> UnaryFunction:
    negs, _ = _ensure()
    try:
        return negs[name]
    except KeyError:
        raise UnknownName(name) from None


def lookup(name: str):
    """A connective or a negation by catalog name."""
    negs, fixtures = _ensure()
    if name in fixtures:
        return fixtures[name].connective
    if name in negs:
        return negs[name]
    raise UnknownName(name)


def names() -> list:
    negs, fixtures = _ensure()
    return list(fixtures) + list(negs)


def by_kind(kind: Kind) -> list:
    return [f for f in load_catalog(validate=False) if f.kind is Kind(kind)]


def export_definitions() -> str:
    """The whole catalog as a definition file, each entry preceded by comments."""
    negs, fixtures = _ensure()
    items, comments = [], {}
    for f in negs.values():
        items.append((f.name, f.expr))
        comments[f.name] = [f"negation; {f.provenance}"]
    for fx in fixtures.values():
        c = fx.connective
        items.append((c.name, c.expr))
        lines = [f"{c.kind.value}; {fx.provenance}"]
        if isinstance(fx.expected_induced_negation, UnaryFunction):
            lines.append(f"expected negation: {fx.expected_induced_negation.name}")
        elif fx.expected_induced_negation is NOT_A_NEGATION:
            lines.append("expected negation: none (induced map is not a negation)")
        if fx.expected_implication is not None:
            lines.append(f"expected implication: {fx.expected_implication.name}")
        comments[c.name] = lines
    return format_definitions(items, comments)
