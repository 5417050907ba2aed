import numpy as np
import pytest

from fuzcon import catalog
from fuzcon.catalog import NOT_A_NEGATION
from fuzcon.config import NumericConfig
from fuzcon.errors import (ConstantFunction, KindMismatch, NotContinuousNegation, NotMonotone,
                           NotValidated)
from fuzcon.functions import BinaryConnective, Kind, UnaryFunction
from fuzcon.fuzzer import random_monotone_connective
from fuzcon.induction import (aleph, disjunction_from_implication, implication_from_DN,
                              natural_negation, negation_of_implication, pseudo_inverse,
                              sup_non_increasing, sup_of_initial_set)

from oracles import one_set_inf, sup_above, zero_set_sup

XS = np.concatenate([np.linspace(0, 1, 9), [0.25 - 1e-3, 0.5 - 1e-3, 0.5 + 1e-3]])
CONJ = [n for n in catalog.CONJUNCTION_TABLE + ("C_sqrt", "C_split", "C_antidiag")]
DISJ = list(catalog.DISJUNCTION_TABLE) + ["D_open"]
FUZZ_N = 2 ** 17 + 1


@pytest.mark.parametrize("name", CONJ)
def test_conjunction_negation_matches_brute_force(name):
    C = catalog.connective(name)
    N = natural_negation(C)
    np.testing.assert_allclose(N.eval(XS), zero_set_sup(C, XS), atol=1e-5, rtol=0)


@pytest.mark.parametrize("name", DISJ)
def test_disjunction_negation_matches_brute_force(name):
    D = catalog.connective(name)
    N = natural_negation(D)
    np.testing.assert_allclose(N.eval(XS), one_set_inf(D, XS), atol=1e-5, rtol=0)


@pytest.mark.parametrize("seed", range(1, 51))
def test_fuzzed_conjunction_matches_brute_force(seed):
    C = random_monotone_connective(seed, 17, "conjunction", commutative=seed % 2 == 0)
    xs = np.linspace(0, 1, 9)
    N = natural_negation(C, validate=False)
    np.testing.assert_allclose(N.eval(xs), zero_set_sup(C, xs, FUZZ_N), atol=1e-5, rtol=0)


@pytest.mark.parametrize("seed", range(51, 101))
def test_fuzzed_disjunction_matches_brute_force(seed):
    D = random_monotone_connective(seed, 17, "disjunction", commutative=seed % 2 == 0)
    xs = np.linspace(0, 1, 9)
    N = natural_negation(D, validate=False)
    np.testing.assert_allclose(N.eval(xs), one_set_inf(D, xs, FUZZ_N), atol=1e-5, rtol=0)


@pytest.mark.parametrize("name", ["T_L", "T_nM", "C_4", "T_M", "T_D"])
def test_conjunction_negation_closed_form(name):
    fx = catalog.fixture(name)
    g = np.linspace(0, 1, 1001)
    N = natural_negation(fx.connective)
    np.testing.assert_allclose(N.eval(g), fx.expected_induced_negation.eval(g), atol=1e-12)


def test_not_a_negation_detected():
    for name in ("C_0", "C_3"):
        assert catalog.fixture(name).expected_induced_negation is NOT_A_NEGATION
        N = natural_negation(catalog.connective(name))
        # zero set [0, 1) is open: the largest float inside it is returned
        assert N(1.0) == pytest.approx(1.0, abs=1e-15)
        assert not N.is_negation


def test_natural_negation_refuses_implications():
    with pytest.raises(KindMismatch):
        natural_negation(catalog.connective("I_RC"))


def test_natural_negation_validates_input():
    bad = BinaryConnective.from_expr("bad", "piece(x + y > 1.5 : 0 ; else : x*y)",
                                     Kind.CONJUNCTION)
    with pytest.raises(NotValidated):
        natural_negation(bad)


def test_memo_gives_identical_values():
    N = natural_negation(catalog.connective("C_sqrt"))
    x = np.linspace(0, 1, 333)
    a = N.eval(x)
    b = N.eval(x[::-1])[::-1]
    np.testing.assert_array_equal(a, b)
    fresh = natural_negation(catalog.connective("C_sqrt"))
    np.testing.assert_array_equal(fresh.eval(x), a)


# ------------------------------------------------------------ bisection core


def test_sup_non_increasing_exact_threshold():
    x = np.linspace(0, 1, 101)
    got = sup_non_increasing(x, lambda xs, t: t <= 1 - xs, 80)
    np.testing.assert_array_equal(got, 1 - x)


def test_sup_non_increasing_open_set():
    x = np.linspace(0, 1, 11)
    got = sup_non_increasing(x, lambda xs, t: t < 0.5 * (1 - xs), 80)
    np.testing.assert_allclose(got, 0.5 * (1 - x), atol=1e-15)


def test_sup_of_initial_set_lanes():
    c = np.array([0.0, 0.3, 1.0, 0.123456789])
    got = sup_of_initial_set(lambda j, t: t < c[j], c.size, 80)
    np.testing.assert_allclose(got, c, atol=1e-15)


def test_bisection_endpoint_edges():
    x = np.array([0.2, 0.7])
    np.testing.assert_array_equal(sup_non_increasing(x, lambda xs, t: t >= 0, 80), [1.0, 1.0])
    np.testing.assert_array_equal(sup_non_increasing(x, lambda xs, t: t <= 0, 80), [0.0, 0.0])


# ------------------------------------------------------------ pseudo-inverse


@pytest.mark.parametrize("name", ["N_S", "N_flat", "N_4", "N_5", "N_I4"])
def test_pseudo_inverse_matches_brute_force(name):
    f = catalog.negation(name)
    ys = np.linspace(0, 1, 17)
    np.testing.assert_allclose(pseudo_inverse(f).eval(ys), sup_above(f, ys), atol=1e-5)


def test_pseudo_inverse_of_flat_negation():
    g = np.linspace(0, 1, 513)
    inv = pseudo_inverse(catalog.negation("N_flat"))
    np.testing.assert_allclose(inv.eval(g), catalog.negation("N_flat_pinv").eval(g), atol=1e-12)
    # {x : N_flat(x) > 0} = [0, 0.5), so the value at 0 is 0.5 and not 1
    assert inv(0.0) == pytest.approx(0.5, abs=1e-15)


def test_pseudo_inverse_increasing():
    f = UnaryFunction.from_expr("sq", "x^2")
    ys = np.linspace(0, 1, 11)
    np.testing.assert_allclose(pseudo_inverse(f).eval(ys), np.sqrt(ys), atol=1e-12)


def test_pseudo_inverse_errors():
    with pytest.raises(ConstantFunction):
        pseudo_inverse(UnaryFunction.from_expr("c", "0.5 + 0*x"))
    with pytest.raises(NotMonotone):
        pseudo_inverse(UnaryFunction.from_expr("hat", "min(2*x, 2 - 2*x)"))


def test_aleph_of_flat_negation():
    g = np.linspace(0, 1, 4097)
    N = catalog.negation("N_flat")
    a = aleph(N)
    np.testing.assert_allclose(a.eval(g), catalog.negation("N_flat_aleph").eval(g), atol=1e-12)
    assert a(0.0) == 1.0 and a(1.0) == 0.0
    assert np.all(np.diff(a.eval(g)) < 0)
    np.testing.assert_allclose(N.eval(a.eval(g)), g, atol=1e-12)


@pytest.mark.parametrize("name", ["N_S", "N_4", "N_5"])
def test_aleph_of_strict_negation_is_inverse(name):
    N = catalog.negation(name)
    g = np.linspace(0, 1, 257)
    a = aleph(N)
    np.testing.assert_allclose(N.eval(a.eval(g)), g, atol=1e-12)
    np.testing.assert_allclose(a.eval(N.eval(g)), g, atol=1e-7)


def test_aleph_needs_continuity():
    with pytest.raises(NotContinuousNegation):
        aleph(catalog.negation("N_split"))
    with pytest.raises(NotContinuousNegation):
        aleph(catalog.negation("N_G1"))


# ------------------------------------------------------------ implications


def test_implication_from_dn_d4():
    g = np.linspace(0, 1, 101)
    X, Y = np.meshgrid(g, g, indexing="ij")
    I = implication_from_DN(catalog.connective("D_4"), catalog.negation("N_4"))
    assert I.kind is Kind.IMPLICATION
    np.testing.assert_allclose(I.eval(X, Y), np.minimum(1, 1 - X ** 2 + Y ** 2), atol=1e-12)


@pytest.mark.parametrize("name", ["I_3", "I_4", "I_5"])
def test_disjunction_recovered_from_implication(name):
    fx = catalog.fixture(name)
    g = np.linspace(0, 1, 101)
    X, Y = np.meshgrid(g, g, indexing="ij")
    D = disjunction_from_implication(fx.connective)
    np.testing.assert_allclose(D.eval(X, Y), fx.expected_disjunction.eval(X, Y), atol=1e-9)


def test_flat_negation_rebuild_is_discontinuous():
    D = disjunction_from_implication(catalog.connective("I_RC"),
                                     negation=catalog.negation("N_flat"), check=False)
    expected = catalog.connective("D_RC_flat")
    g = np.linspace(0, 1, 101)
    X, Y = np.meshgrid(g, g, indexing="ij")
    np.testing.assert_allclose(D.eval(X, Y), expected.eval(X, Y), atol=1e-12)
    assert D(1e-9, 0.0) - D(0.0, 0.0) >= 0.4


def test_negation_of_implication():
    g = np.linspace(0, 1, 257)
    N = negation_of_implication(catalog.connective("I_4"))
    np.testing.assert_allclose(N.eval(g), 1 - g ** 2, atol=1e-15)


def test_config_changes_resolution():
    coarse = NumericConfig(bisect_iters=30)
    N = natural_negation(catalog.connective("T_L"), coarse)
    assert abs(N(0.3) - 0.7) < 1e-8


def test_documented_values():
    assert natural_negation(catalog.connective("T_L"))(0.3) == pytest.approx(0.7, abs=1e-12)
    assert natural_negation(catalog.connective("D_5"))(0.5) == pytest.approx(0.25, abs=1e-12)
    for name in ("T_P", "C_4", "C_sqrt"):
        assert natural_negation(catalog.connective(name))(0.0) == 1.0
    for name in ("D_1", "D_4", "D_open"):
        assert natural_negation(catalog.connective(name))(1.0) == 0.0
    g = np.linspace(0, 1, 4097)
    np.testing.assert_allclose(natural_negation(catalog.connective("D_open")).eval(g), 1 - g,
                               atol=1e-9)


def test_pseudo_inverse_of_least_negation():
    ys = np.linspace(0, 1, 17)
    f = catalog.negation("N_G1")
    np.testing.assert_array_equal(pseudo_inverse(f).eval(ys), sup_above(f, ys))
    assert pseudo_inverse(f)(0.5) == 0.0


def test_aleph_documented_values():
    a = aleph(catalog.negation("N_flat"))
    assert a(0.0) == 1.0 and a(0.5) == pytest.approx(0.25, abs=1e-12)
    assert catalog.negation("N_flat")(a(0.8)) == pytest.approx(0.8, abs=1e-9)
    s = aleph(catalog.negation("N_S"))
    assert catalog.negation("N_S")(s(0.4)) == pytest.approx(0.4, abs=1e-12)


def test_table_implications_documented_values():
    I = implication_from_DN(catalog.connective("D_2"), catalog.negation("N_S"))
    assert I(0.7, 0.4) == 0.4
    I = implication_from_DN(catalog.connective("D_7"), catalog.negation("N_G2"))
    assert I(1.0, 0.3) == 0.3
    for d in ("D_1", "D_4"):
        for n in ("N_S", "N_G1", "N_G2"):
            assert implication_from_DN(catalog.connective(d), catalog.negation(n))(0.0, 0.0) == 1.0


def test_implication_negations():
    assert negation_of_implication(catalog.connective("I_RC"))(0.3) == pytest.approx(0.7)
    g = np.linspace(0, 1, 257)
    np.testing.assert_array_equal(negation_of_implication(catalog.connective("I_6")).eval(g),
                                  catalog.negation("N_G2").eval(g))
    np.testing.assert_array_equal(negation_of_implication(catalog.connective("I_RS")).eval(g),
                                  catalog.negation("N_G1").eval(g))


def test_rebuild_needs_continuous_negation():
    with pytest.raises(NotContinuousNegation):
        disjunction_from_implication(catalog.connective("I_RS"))
