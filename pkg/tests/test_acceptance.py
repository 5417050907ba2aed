"""End-to-end acceptance checks.  Each test carries a ``criterion`` mark; the
terminal summary prints one PASS/FAIL line per criterion."""

import itertools
import time

import numpy as np
import pytest

from fuzcon import catalog
from fuzcon.analysis import check_law, classify_negation, detect_continuity_2d, roundtrip, verify_theorem
from fuzcon.catalog import NOT_A_NEGATION
from fuzcon.config import DEFAULT
from fuzcon.functions import Kind
from fuzcon.fuzzer import random_monotone_connective, sweep
from fuzcon.induction import disjunction_from_implication, natural_negation, pseudo_inverse
from fuzcon.report import Verdict
from fuzcon.tables import table1, table2, table3
from fuzcon.validation import validate_connective, validate_negation, verified_flags

from oracles import one_set_inf, sup_above, zero_set_sup

C = catalog.connective
N = catalog.negation

CONJUNCTIONS = [f.name for f in catalog.by_kind(Kind.CONJUNCTION)]
DISJUNCTIONS = [f.name for f in catalog.by_kind(Kind.DISJUNCTION)]
IMPLICATIONS = [f.name for f in catalog.by_kind(Kind.IMPLICATION)]
NEGATIONS = [n for n in catalog.negations() if validate_negation(N(n)).holds]


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


# ------------------------------------------------------------ reference tables


@pytest.mark.criterion(1, "natural negations of the conjunction table")
def test_conjunction_table():
    rep, secs = timed(table1)
    assert rep.ok, rep.to_text()
    listed = [r for r in rep.rows if r.expected["negation"] != "none"]
    assert len(listed) == 9
    assert all(r.errors["max_abs"] <= 1e-6 for r in listed)
    missing = {r.name: r.computed["N(1)"] for r in rep.rows if r.expected["negation"] == "none"}
    assert set(missing) == {"C_0", "C_3"}
    assert all(v != 0.0 for v in missing.values())
    for name in missing:
        assert catalog.fixture(name).expected_induced_negation is NOT_A_NEGATION
    assert secs < 5.0, secs


@pytest.mark.criterion(2, "natural negations and implications of the disjunction table")
def test_disjunction_table():
    rep, secs = timed(table2)
    assert rep.ok, rep.to_text()
    assert len(rep.rows) == 7
    for r in rep.rows:
        assert r.errors["negation_max_abs"] <= 1e-6
        assert r.errors["implication_max_abs"] <= 1e-6
    assert secs < 10.0, secs


@pytest.mark.criterion(3, "independence matrix")
def test_independence_matrix():
    rep = table3()
    assert len(rep.rows) == 6
    assert all(len(r.computed) == 3 for r in rep.rows)
    assert rep.ok, rep.to_text()


# ------------------------------------------------------------ natural negation flags


@pytest.mark.criterion(4, "four classification flags agree for commutative connectives")
def test_flags_agree_on_commutative_catalog():
    checked = 0
    for name in CONJUNCTIONS + DISJUNCTIONS:
        b = C(name)
        if not verified_flags(b)["commutative"][0]:
            continue
        if not natural_negation(b).is_negation:
            continue
        tid = "THM_3_1" if b.kind is Kind.CONJUNCTION else "THM_3_2"
        r = verify_theorem(tid, {b.kind.value: b})
        assert r.holds, (name, r.details)
        checked += 1
    assert checked >= 8


@pytest.mark.criterion(4, "four classification flags agree for commutative connectives")
@pytest.mark.slow
@pytest.mark.parametrize("target", ["THM_3_1", "THM_3_2"])
def test_flags_agree_on_fuzzed_commutative_instances(target):
    r, secs = timed(sweep, target, {"m": 17, "commutative": True, "start": 1}, budget=1000)
    assert r["counts"]["fails"] == 0, r["failing_seeds"]
    assert r["counts"]["holds"] > 0
    assert secs < 60.0, secs


@pytest.mark.criterion(5, "non-strong and discontinuous natural negations are detected")
def test_square_root_conjunction():
    b = C("C_sqrt")
    Nc = natural_negation(b)
    r = classify_negation(Nc)
    assert r.continuous and r.strictly_decreasing and not r.strong
    assert abs(Nc(Nc(0.5)) - 0.5) >= 0.06
    assert abs(Nc(Nc(0.5)) - 0.5) == pytest.approx(0.0625, abs=1e-9)
    w = r.witnesses["strong"]
    assert abs(w["N(N(x))"] - w["x"]) > DEFAULT.eps_eq


@pytest.mark.criterion(5, "non-strong and discontinuous natural negations are detected")
def test_split_conjunction():
    Nc = natural_negation(C("C_split"))
    r = classify_negation(Nc)
    assert not r.continuous and r.strictly_decreasing
    at_half = [j for j in r.jumps if abs(j.location - 0.5) <= 1e-9]
    assert at_half and max(j.magnitude for j in at_half) >= 0.2


@pytest.mark.criterion(5, "non-strong and discontinuous natural negations are detected")
@pytest.mark.parametrize("name", ["C_sqrt", "C_split"])
def test_counterexample_conjunctions_are_not_commutative(name):
    b = C(name)
    entry = validate_connective(b).details["flags"]["commutative"]
    assert entry["verified"] is False
    p = entry["witness"]["point"]
    assert b(p["x"], p["y"]) != b(p["y"], p["x"])


# ------------------------------------------------------------ excluded middle


@pytest.mark.criterion(6, "excluded middle fails where its inequalities hold")
def test_excluded_middle_on_open_region():
    D, Ns = C("D_open"), N("N_S")
    lem = check_law("LEM", {"disjunction": D, "negation": Ns})
    assert lem.fails
    assert abs(D(0.5, 0.5) - 1.0) >= 0.4
    vals = lem.witness["values"]
    assert min(abs(v - 1.0) for v in vals.values()) >= 0.4
    ineq = check_law("LEM_INEQ", {"disjunction": D, "negation": Ns})
    assert ineq.holds


# ------------------------------------------------------------ implications


@pytest.mark.criterion(7, "implications are rebuilt from their disjunction and negation")
@pytest.mark.parametrize("name", ["I_3", "I_4", "I_5", "I_RC"])
def test_roundtrip(name):
    r = roundtrip(C(name), DEFAULT.replace(grid2d_n=101))
    assert r.holds, r.details
    parts = r.details["parts"]
    assert parts["I(x,y) = D_I(N_I(x),y)"]["sup_error"] <= 1e-9
    assert parts["D_I(x,0) = x"]["max_error"] <= 1e-9
    assert parts["D_I is a fuzzy disjunction"]["holds"]


@pytest.mark.criterion(8, "a flat negation rebuilds a discontinuous disjunction")
def test_flat_negation_rebuild():
    I, Nf = C("I_RC"), N("N_flat")
    D = disjunction_from_implication(I, negation=Nf, check=False)
    cont = detect_continuity_2d(D, DEFAULT)
    assert not cont.continuous
    assert cont.max_jump >= 0.4
    assert cont.location["x"] == 0.0 and cont.location["y"] == 0.0
    assert D(1e-9, 0.0) - D(0.0, 0.0) >= 0.4
    r = verify_theorem("THM_4_2", {"implication": I, "negation": Nf})
    assert r.verdict is Verdict.PRECONDITION_FAILED
    assert r.details["missing_hypothesis"] == "strictness"


# ------------------------------------------------------------ property suites


def _side_continuous(names, side):
    return [n for n in names if verified_flags(C(n))[side][0]]


@pytest.mark.criterion(9, "zero-set and one-set properties, bisection against brute force")
def test_biconditionals_on_one_sided_continuous_fixtures():
    left = _side_continuous(CONJUNCTIONS, "left_continuous")
    right = _side_continuous(DISJUNCTIONS, "right_continuous")
    assert left and right
    for tid, slot, names in (("PROP_3_1", "conjunction", left), ("PROP_3_3", "disjunction", right)):
        for name in names:
            r = verify_theorem(tid, {slot: C(name)})
            assert r.holds, (tid, name, r.details)


@pytest.mark.criterion(9, "zero-set and one-set properties, bisection against brute force")
def test_one_sided_implications_on_every_fixture():
    for tid, slot, names in (("REMARK_3_1", "conjunction", CONJUNCTIONS),
                             ("REMARK_3_2", "disjunction", DISJUNCTIONS)):
        for name in names:
            r = verify_theorem(tid, {slot: C(name)})
            assert r.holds, (tid, name, r.details)


XS = np.concatenate([np.linspace(0, 1, 9), [0.25 - 1e-3, 0.5 - 1e-3, 0.5 + 1e-3]])
BRUTE_N = 2 ** 18 + 1


@pytest.mark.criterion(9, "zero-set and one-set properties, bisection against brute force")
def test_bisection_matches_brute_force_on_fixtures():
    for name in CONJUNCTIONS:
        b = C(name)
        got = natural_negation(b).eval(XS)
        np.testing.assert_allclose(got, zero_set_sup(b, XS, BRUTE_N), atol=1e-5, rtol=0,
                                   err_msg=name)
    for name in DISJUNCTIONS:
        b = C(name)
        got = natural_negation(b).eval(XS)
        np.testing.assert_allclose(got, one_set_inf(b, XS, BRUTE_N), atol=1e-5, rtol=0,
                                   err_msg=name)
    for name in NEGATIONS:
        f = N(name)
        got = pseudo_inverse(f).eval(XS)
        np.testing.assert_allclose(got, sup_above(f, XS, BRUTE_N), atol=1e-5, rtol=0,
                                   err_msg=name)


@pytest.mark.criterion(9, "zero-set and one-set properties, bisection against brute force")
@pytest.mark.slow
def test_bisection_matches_brute_force_on_fuzzed_instances():
    xs = np.linspace(0, 1, 9)
    for seed in range(1, 101):
        kind = "conjunction" if seed % 2 else "disjunction"
        b = random_monotone_connective(seed, 17, kind, commutative=seed % 4 < 2)
        got = natural_negation(b, validate=False).eval(xs)
        oracle = zero_set_sup if kind == "conjunction" else one_set_inf
        np.testing.assert_allclose(got, oracle(b, xs, 2 ** 17 + 1), atol=1e-5, rtol=0,
                                   err_msg=f"seed {seed}")


# ------------------------------------------------------------ lemma and axiom suite


@pytest.mark.criterion(10, "lemma and axiom suite over the catalog")
def test_lemma_and_axiom_suite():
    t = time.perf_counter()
    for name in NEGATIONS:
        r = verify_theorem("LEMMA_2_1", {"negation": N(name)})
        assert r.holds, name
        assert classify_negation(N(name)).consistent
    for name in IMPLICATIONS:
        r = verify_theorem("LEMMA_2_3", {"implication": C(name)})
        assert r.verdict is not Verdict.FAILS, (name, r.details)
    for d, n in itertools.product(DISJUNCTIONS, NEGATIONS):
        ops = {"disjunction": C(d), "negation": N(n)}
        r = verify_theorem("LEMMA_4_3", ops)
        assert r.holds, (d, n, r.details)
        r = verify_theorem("PROP_4_4", ops, enforce_preconditions=False)
        assert r.details["parts"]["(i) IP iff LEM1"]["holds"], (d, n, r.details)
    secs = time.perf_counter() - t
    assert secs < 60.0, secs
