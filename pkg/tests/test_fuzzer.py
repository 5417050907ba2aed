import json

import numpy as np
import pytest

from fuzcon.analysis import check_law
from fuzcon.errors import UnknownTarget
from fuzcon.functions import Kind
from fuzcon.fuzzer import (REGIMES, SplitMix64, TARGETS, WitnessBundle, random_grid_function,
                           random_monotone_connective, search_counterexample, sweep)
from fuzcon.induction import natural_negation
from fuzcon.report import SCHEMA
from fuzcon.validation import validate_connective

FINE = np.linspace(0, 1, 129)
FX, FY = np.meshgrid(FINE, FINE, indexing="ij")


def test_splitmix_reference_stream():
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_splitmix_floats():
    rng = SplitMix64(42)
    u = rng.uniforms(1000)
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 0.05


@pytest.mark.parametrize("kind", ["conjunction", "disjunction"])
def test_generator_is_deterministic(kind):
    for seed in (1, 7, 2 ** 40 + 3):
        a = random_grid_function(seed, 17, kind, commutative=seed % 2 == 1)
        b = random_grid_function(seed, 17, kind, commutative=seed % 2 == 1)
        assert a.values.tobytes() == b.values.tobytes()
        assert a.describe() == b.describe()
        assert a.eval(FX, FY).tobytes() == b.eval(FX, FY).tobytes()
    assert not np.array_equal(random_grid_function(1, 17, kind).values,
                              random_grid_function(2, 17, kind).values)


@pytest.mark.parametrize("seed", range(1, 21))
def test_boundaries(seed):
    C = random_monotone_connective(seed, 17, "conjunction")
    assert C(0.0, 0.37) == 0.0 and C(0.37, 0.0) == 0.0 and C(1.0, 1.0) == 1.0
    D = random_monotone_connective(seed, 17, "disjunction")
    assert D(1.0, 0.37) == 1.0 and D(0.37, 1.0) == 1.0 and D(0.0, 0.0) == 0.0


def test_commutative_nodes_are_symmetric():
    gf = random_grid_function(1, 17, "conjunction", commutative=True)
    assert np.array_equal(gf.values, gf.values.T)
    g = np.linspace(0, 1, 17)
    X, Y = np.meshgrid(g, g, indexing="ij")
    V = gf.eval(X, Y)
    assert np.array_equal(V, V.T)


def _ordered_pairs_monotone(V) -> bool:
    """Every pair of nodes with (i, j) <= (k, l) has V[i, j] <= V[k, l]."""
    m = V.shape[0]
    for i in range(m):
        for j in range(m):
            if np.any(V[i:, j:] < V[i, j]):
                return False
    return True


@pytest.mark.parametrize("seed", range(1, 101))
def test_monotone_by_exhaustive_scan(seed):
    for kind in ("conjunction", "disjunction"):
        gf = random_grid_function(seed, 17, kind, commutative=seed % 3 == 0)
        assert _ordered_pairs_monotone(gf.values)
        V = gf.eval(FX, FY)
        assert np.all(np.diff(V, axis=0) >= 0) and np.all(np.diff(V, axis=1) >= 0)
        assert np.all((V >= 0) & (V <= 1))


@pytest.mark.parametrize("seed", range(1, 11))
def test_commutative_outputs_validate(seed, cfg):
    for kind in ("conjunction", "disjunction"):
        b = random_monotone_connective(seed, 17, kind, commutative=True)
        r = validate_connective(b, cfg)
        assert r.holds, r
        assert r.details["flags"]["commutative"]["verified"]


def test_every_regime_reachable():
    seen = {random_grid_function(s, 9, "conjunction").regime for s in range(1, 200)}
    assert seen == set(REGIMES)


def test_generator_errors():
    with pytest.raises(ValueError):
        random_grid_function(1, 2)
    with pytest.raises(ValueError):
        random_grid_function(1, 17, Kind.IMPLICATION)
    with pytest.raises(ValueError):
        random_grid_function(1, 17, regime="spiral")


def test_boundary_curve_is_the_negation():
    for seed in range(1, 60):
        gf = random_grid_function(seed, 17, "conjunction", regime="curve")
        g = gf.boundary_negation()
        if g is None:
            continue
        x = np.linspace(0, 1, 65)
        N = natural_negation(gf.to_connective(), validate=False)
        np.testing.assert_allclose(N.eval(x), g.eval(x), atol=1e-12)


# ------------------------------------------------------------ search


def test_non_commutative_search_finds_disagreement():
    b = search_counterexample("THM_3_1", {"commutative": False}, budget=200)
    assert b is not None
    assert b.report.fails
    flags = b.report.details["classification"]
    assert flags["strictly_decreasing"] != flags["continuous"] or \
        flags["strict"] != flags["strong"]
    assert b.reverify()


def test_commutative_search_small_budget_is_empty():
    assert search_counterexample("THM_3_1", {"commutative": True}, budget=60) is None
    assert search_counterexample("THM_3_2", {"commutative": True}, budget=60) is None


def test_lem_counterexample_despite_inequalities():
    b = search_counterexample("LEM", {"regime": "involution"}, budget=300)
    assert b is not None and b.report.fails
    assert b.report.details["LEM_INEQ_holds"] is True
    assert b.report.details["right_continuous"] is False
    D = b.regenerate().to_connective()
    N = natural_negation(D, validate=False)
    assert check_law("LEM_INEQ", {"disjunction": D, "negation": N}).holds
    assert b.reverify()


def test_search_is_ordered_by_seed():
    a = search_counterexample("THM_3_1", {"start": 1}, budget=200)
    later = search_counterexample("THM_3_1", {"start": a.seed + 1}, budget=200)
    assert later is None or later.seed > a.seed
    again = search_counterexample("THM_3_1", {"start": a.seed}, budget=1)
    assert again.seed == a.seed and again.to_json() == a.to_json()


def test_bundle_serialization():
    b = search_counterexample("THM_3_1", {}, budget=200)
    d = json.loads(b.to_json())
    assert d["report"]["schema"] == SCHEMA
    assert d["seed"] == b.seed and d["target"] == "THM_3_1"
    lines = b.grid_csv.splitlines()
    assert lines[0] == "x,y,value"
    assert len(lines) == 1 + b.params["m"] ** 2


def test_unknown_target():
    with pytest.raises(UnknownTarget):
        search_counterexample("NOPE")
    assert {"THM_3_1", "THM_3_2", "LEM", "LC"} <= set(TARGETS)


def test_sweep_counts():
    s = sweep("THM_3_2", {"commutative": True}, budget=25)
    assert sum(s["counts"].values()) == 25
    assert s["failing_seeds"] == []


def test_tampered_bundle_does_not_reverify():
    b = search_counterexample("THM_3_1", {}, budget=200)
    fake = WitnessBundle(b.target, b.seed + 1, b.params, b.report)
    assert not fake.reverify()
