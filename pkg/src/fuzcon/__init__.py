"""Fuzzy connectives, the negations and implications they induce, and
numeric checks of the laws relating them."""

from .analysis import LAWS, THEOREMS, check_law, roundtrip, verify_theorem
from .catalog import fixture, load_catalog, lookup
from .classify import NegationClassReport, classify_negation
from .config import DEFAULT, NumericConfig
from .dsl import ConnectiveExpr, evaluate, parse_connective, parse_definitions, section_breakpoints
from .errors import FuzconError
from .functions import BinaryConnective, Flags, Kind, Neutral, UnaryFunction
from .fuzzer import random_monotone_connective, search_counterexample, sweep
from .induction import (aleph, disjunction_from_implication, implication_from_DN,
                        natural_negation, negation_of_implication, pseudo_inverse)
from .report import CheckResult, Verdict
from .validation import validate_connective, validate_negation

__version__ = "0.1.0"

__all__ = [
    "LAWS", "THEOREMS", "check_law", "roundtrip", "verify_theorem",
    "fixture", "load_catalog", "lookup",
    "NegationClassReport", "classify_negation",
    "DEFAULT", "NumericConfig",
    "ConnectiveExpr", "evaluate", "parse_connective", "parse_definitions", "section_breakpoints",
    "FuzconError",
    "BinaryConnective", "Flags", "Kind", "Neutral", "UnaryFunction",
    "random_monotone_connective", "search_counterexample", "sweep",
    "aleph", "disjunction_from_implication", "implication_from_DN", "natural_negation",
    "negation_of_implication", "pseudo_inverse",
    "CheckResult", "Verdict",
    "validate_connective", "validate_negation",
]
