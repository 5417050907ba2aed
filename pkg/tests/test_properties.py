from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from fuzcon.analysis import classify_negation
from fuzcon.dsl import parse_connective, to_source
from fuzcon.functions import UnaryFunction
from fuzcon.fuzzer import random_grid_function
from fuzcon.induction import aleph, natural_negation, sup_non_increasing

SETTINGS = settings(max_examples=60, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])
UNIT = st.floats(0.0, 1.0, allow_nan=False)
G = np.linspace(0, 1, 33)
GX, GY = np.meshgrid(G, G, indexing="ij")

# expressions closed under [0, 1]: every constructor maps unit values to unit values
leaf = st.sampled_from(["x", "y", "1 - x", "1 - y"]) | st.fractions(0, 1, max_denominator=16).map(
    lambda q: str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}")


def _extend(children):
    two = st.tuples(children, children)
    return st.one_of(
        two.map(lambda p: f"min({p[0]}, {p[1]})"),
        two.map(lambda p: f"max({p[0]}, {p[1]})"),
        two.map(lambda p: f"({p[0]})*({p[1]})"),
        children.map(lambda a: f"sqrt({a})"),
        children.map(lambda a: f"1 - ({a})"),
        children.map(lambda a: f"({a})^2"),
        st.tuples(children, children, children).map(
            lambda p: f"piece(x + y <= 1 : {p[0]} ; x < y : {p[1]} ; else : {p[2]})"),
    )


EXPR = st.recursive(leaf, _extend, max_leaves=8)


@SETTINGS
@given(EXPR)
def test_print_parse_round_trip(src):
    e = parse_connective(src, arity=2)
    again = parse_connective(to_source(e), arity=2)
    assert again == e
    np.testing.assert_array_equal(again.evaluate_array(GX, GY), e.evaluate_array(GX, GY))


@SETTINGS
@given(EXPR, UNIT, UNIT)
def test_evaluation_stays_in_unit_square(src, a, b):
    v = parse_connective(src, arity=2)(a, b)
    assert 0.0 <= v <= 1.0


ROUNDING = 1e-12


@SETTINGS
@given(st.lists(UNIT, min_size=1, max_size=20))
def test_bisection_hits_closed_thresholds_exactly(cs):
    c = np.array(cs)
    got = sup_non_increasing(np.arange(c.size, dtype=float) / max(c.size, 1),
                             lambda xs, t: t <= c[np.rint(xs * max(c.size, 1)).astype(int)], 80)
    np.testing.assert_array_equal(got, c)


@SETTINGS
@given(st.lists(st.floats(0.0, 1.0, exclude_min=True), min_size=1, max_size=20))
def test_bisection_open_thresholds_within_one_ulp(cs):
    c = np.array(cs)
    idx = lambda xs: np.rint(xs * c.size).astype(int)
    got = sup_non_increasing(np.arange(c.size, dtype=float) / c.size,
                             lambda xs, t: t < c[idx(xs)], 80)
    assert np.all(got < c)
    assert np.all(np.nextafter(got, 2.0) >= c)


@SETTINGS
@given(st.fractions(Fraction(1, 2), 4, max_denominator=8),
       st.fractions(Fraction(1, 2), 4, max_denominator=8))
def test_aleph_is_a_right_inverse(p, q):
    # N(x) = (1 - x^p)^q is a continuous, strictly decreasing negation; much
    # smaller exponents make it steep enough near the ends to read as a jump
    N = UnaryFunction.from_expr("Npq", f"pow(1 - pow(x, {p}), {q})")
    a = aleph(N)
    y = np.linspace(0, 1, 129)
    np.testing.assert_allclose(N.eval(a.eval(y)), y, atol=1e-9)
    assert a(0.0) == 1.0 and a(1.0) == 0.0
    assert np.all(np.diff(a.eval(y)) < 0)


@SETTINGS
@given(st.integers(1, 2 ** 63), st.sampled_from(["conjunction", "disjunction"]), st.booleans())
def test_induced_negation_is_non_increasing(seed, kind, commutative):
    b = random_grid_function(seed, 9, kind, commutative).to_connective()
    N = natural_negation(b, validate=False)
    v = N.eval(G)
    # bilinear cells are monotone only up to rounding between nodes
    assert np.all(np.diff(v) <= ROUNDING)
    if kind == "conjunction":
        assert v[0] == 1.0
    else:
        assert v[-1] == 0.0


@SETTINGS
@given(st.integers(1, 2 ** 63), st.sampled_from(["conjunction", "disjunction"]))
def test_reports_are_consistent(seed, kind):
    b = random_grid_function(seed, 9, kind, True).to_connective()
    N = natural_negation(b, validate=False)
    if not N.is_negation:
        return
    r = classify_negation(N)
    assert r.consistent
    if r.strong:
        assert r.strict and r.strictly_decreasing and r.continuous


@SETTINGS
@given(st.integers(1, 2 ** 63), st.lists(st.tuples(UNIT, UNIT), min_size=1, max_size=50))
def test_commutative_mode_is_exactly_symmetric(seed, pts):
    gf = random_grid_function(seed, 17, "disjunction", commutative=True)
    x, y = np.array(pts).T
    np.testing.assert_array_equal(gf.eval(x, y), gf.eval(y, x))


@SETTINGS
@given(st.integers(1, 2 ** 63), st.sampled_from(["conjunction", "disjunction"]),
       st.lists(st.tuples(UNIT, UNIT, UNIT), min_size=1, max_size=50))
def test_generated_connectives_are_monotone(seed, kind, pts):
    gf = random_grid_function(seed, 17, kind)
    x, y, d = np.array(pts).T
    hi = np.minimum(x + d * (1 - x), 1.0)
    assert np.all(gf.eval(x, y) <= gf.eval(hi, y) + ROUNDING)
    assert np.all(gf.eval(y, x) <= gf.eval(y, hi) + ROUNDING)
