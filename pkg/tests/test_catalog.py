import numpy as np
import pytest

from fuzcon import catalog
from fuzcon.catalog import NOT_A_NEGATION
from fuzcon.dsl import parse_definitions
from fuzcon.errors import UnknownName
from fuzcon.functions import Kind, UnaryFunction
from fuzcon.validation import validate_connective, validate_negation

G = np.linspace(0, 1, 129)
X, Y = np.meshgrid(G, G, indexing="ij")


def test_required_fixtures_present(fixtures):
    required = ["C_0", "C_1", "C_2", "C_3", "C_4", "C_5", "T_M", "T_P", "T_L", "T_D", "T_nM",
                "D_1", "D_2", "D_3", "D_4", "D_5", "D_6", "D_7",
                "I_RS", "F_2", "F_3", "F_4", "F_5", "F_6",
                "C_sqrt", "C_split", "D_open", "I_RC", "D_RC_flat", "I_GD", "I_WB"]
    missing = [n for n in required if n not in fixtures]
    assert not missing
    for n in ("N_flat", "N_flat_pinv", "N_flat_aleph", "N_S", "N_G1", "N_G2"):
        assert isinstance(catalog.negation(n), UnaryFunction)


def test_t_l_expects_standard_negation(fixtures):
    assert fixtures["T_L"].expected_induced_negation.name == "N_S"


@pytest.mark.parametrize("name", ["C_0", "C_3"])
def test_not_a_negation_rows(fixtures, name):
    assert fixtures[name].expected_induced_negation is NOT_A_NEGATION
    assert fixtures[name].expected_verdicts["IS_NEGATION"] is False


def test_d4_expectations(fixtures):
    fx = fixtures["D_4"]
    np.testing.assert_allclose(fx.expected_induced_negation.eval(G), np.sqrt(1 - G ** 2), atol=1e-15)
    np.testing.assert_allclose(fx.expected_implication.eval(X, Y),
                               np.minimum(1, 1 - X ** 2 + Y ** 2), atol=1e-15)


def test_every_fixture_has_provenance(fixtures):
    assert all(fx.provenance for fx in fixtures.values())


def test_fixture_kinds(fixtures):
    by = {k: [f.name for f in catalog.by_kind(k)] for k in Kind}
    assert "T_L" in by[Kind.CONJUNCTION]
    assert "D_open" in by[Kind.DISJUNCTION]
    assert "I_RC" in by[Kind.IMPLICATION]
    assert "F_6" in by[Kind.RAW]


def _bounds(b):
    return {(a, c): b(a, c) for a in (0.0, 1.0) for c in (0.0, 1.0)}


@pytest.mark.parametrize("name", [f.name for f in catalog.load_catalog(validate=False)])
def test_fixture_validates(name, fixtures, cfg):
    fx = fixtures[name]
    r = validate_connective(fx.connective, cfg)
    assert r.holds, r
    b = fx.connective
    # an independent look at the boundary conditions and monotonicity
    V = b.eval(X, Y)
    if fx.kind in (Kind.CONJUNCTION, Kind.DISJUNCTION):
        assert np.all(np.diff(V, axis=0) >= 0) and np.all(np.diff(V, axis=1) >= 0)
    if fx.kind is Kind.CONJUNCTION:
        assert _bounds(b) == {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 1}
        assert np.all(V[0, :] == 0) and np.all(V[:, 0] == 0)
    elif fx.kind is Kind.DISJUNCTION:
        assert _bounds(b) == {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 1}
    elif fx.kind is Kind.IMPLICATION:
        assert _bounds(b) == {(0, 0): 1, (0, 1): 1, (1, 0): 0, (1, 1): 1}
        assert np.all(np.diff(V, axis=0) <= 0) and np.all(np.diff(V, axis=1) >= 0)


def test_t_p_flags_verified(cfg):
    r = validate_connective(catalog.connective("T_P"), cfg)
    assert r.holds
    flags = r.details["flags"]
    assert flags["commutative"]["verified"] and flags["associative"]["verified"]
    assert flags["neutral"]["verified"]


def test_false_commutativity_claim_fails(cfg):
    C = catalog.connective("C_sqrt")
    lie = C.with_kind(Kind.CONJUNCTION, C.flags.__class__(commutative=True))
    r = validate_connective(lie, cfg)
    assert r.fails
    p, v = r.witness["point"], r.witness["values"]
    a, b = p["x"], p["y"]
    assert C(a, b) != pytest.approx(C(b, a), abs=1e-3)
    assert v
    # (0.5, 0.25) is no witness: both orders give max(... , 0) = 0
    assert C(0.5, 0.25) == 0.0 == C(0.25, 0.5)
    assert C(0.25, 0.81) == pytest.approx(0.15, abs=1e-12)
    assert C(0.81, 0.25) == pytest.approx(0.31, abs=1e-12)


def test_d1_right_continuous(cfg):
    r = validate_connective(catalog.connective("D_1"), cfg)
    flag = r.details["flags"]["right_continuous"]
    assert flag["ok"] and flag["declared"] is flag["verified"]


@pytest.mark.parametrize("name", ["N_S", "N_G1", "N_G2", "N_4", "N_5", "N_split", "N_flat"])
def test_negations_validate(name, cfg):
    assert validate_negation(catalog.negation(name), cfg).holds


def test_constant_one_is_not_a_negation(cfg):
    one = UnaryFunction.from_expr("one", "1 + 0*x")
    r = validate_negation(one, cfg)
    assert r.fails
    assert r.witness["point"] == {"x": 1.0}
    assert r.witness["values"]["N(x)"] == 1.0


def test_unknown_name():
    with pytest.raises(UnknownName):
        catalog.fixture("nope")
    with pytest.raises(KeyError):
        catalog.lookup("nope")


def test_catalog_is_stable():
    a = [(f.name, f.connective.expr.to_source()) for f in catalog.load_catalog()]
    b = [(f.name, f.connective.expr.to_source()) for f in catalog.load_catalog()]
    assert a == b


def test_export_round_trips():
    text = catalog.export_definitions()
    defs = parse_definitions(text)
    assert set(defs) == set(catalog.names())
    for name in ("T_L", "D_4", "F_6", "N_flat_aleph"):
        obj = catalog.lookup(name)
        assert defs[name] == obj.expr
