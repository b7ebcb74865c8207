import json
import math

import numpy as np
import pytest

from wl1interp.indexsets import (
    EnumerationBudgetError,
    IndexSet,
    TruncationNotFiniteError,
    WeightScheme,
    build_index_set,
    truncation_set,
    weighted_cardinality,
)


def test_range_1d_positions():
    iset = build_index_set("range_1d", N=5)
    assert list(iset) == [(1,), (2,), (3,), (4,), (5,)]
    assert iset.position((3,)) == 3
    assert (2,) in iset and (6,) not in iset


def test_canonical_ordering_degree_then_lex():
    iset = build_index_set("tensor_box", d=2, N_per_axis=2)
    members = list(iset)
    degrees = [math.prod(k + 1 for k in m) for m in members]
    assert degrees == sorted(degrees)
    # ties broken lexicographically
    assert members.index((0, 1)) < members.index((1, 0))
    # position/membership are mutually inverse
    for i, m in enumerate(members, start=1):
        assert iset.position(m) == i


def test_hyperbolic_cross_membership():
    iset = build_index_set("hyperbolic_cross", d=2, s=3)
    got = set(iset)
    assert got == {(0, 0), (0, 1), (1, 0), (0, 2), (2, 0)}
    for k in iset:
        assert math.prod(kl + 1 for kl in k) <= 3


def test_hyperbolic_cross_d1_size_is_floor_s():
    for s in range(1, 30):
        assert len(build_index_set("hyperbolic_cross", d=1, s=s)) == s


def test_enumeration_budget():
    with pytest.raises(EnumerationBudgetError):
        build_index_set("tensor_box", d=10, N_per_axis=100)
    with pytest.raises(EnumerationBudgetError):
        build_index_set("range_1d", N=10**8)


def test_duplicate_and_arity_rejection():
    with pytest.raises(ValueError):
        IndexSet(1, ((1,), (1,)))
    with pytest.raises(ValueError):
        IndexSet(2, ((1,),))


def test_json_round_trip():
    iset = build_index_set("hyperbolic_cross", d=3, s=4)
    again = IndexSet.from_json(iset.to_json())
    assert again == iset
    doc = json.loads(iset.to_json(weights=[1.0] * len(iset)))
    assert doc["d"] == 3 and len(doc["weights"]) == len(iset)


def test_subset_preserves_order():
    iset = build_index_set("tensor_box", d=2, N_per_axis=2)
    sub = iset.subset([(1, 1), (0, 0)])
    assert list(sub) == [(0, 0), (1, 1)]
    with pytest.raises(ValueError):
        iset.subset([(9, 9)])


# -- weight schemes ---------------------------------------------------------

def test_positional_schemes():
    lin = WeightScheme("linear")
    sq = WeightScheme("sqrt")
    pw = WeightScheme("power", param=3.0)
    for j in range(1, 10):
        assert lin.weight_of(j) == j
        assert sq.weight_of(j) == pytest.approx(math.sqrt(j))
        assert pw.weight_of(j) == pytest.approx(j ** 1.5)


def test_multi_index_schemes():
    assert WeightScheme("sobolev", param=2.0).weight_of((3, 4)) == pytest.approx(36.0)
    assert WeightScheme("mixed", param=1.0).weight_of((1, 2)) == pytest.approx(6.0)
    assert WeightScheme("hyperbolic").weight_of((1, 2)) == pytest.approx(math.sqrt(6))
    assert WeightScheme("legendre_dominating").weight_of((1, 2)) == pytest.approx(
        math.sqrt(15)
    )
    assert WeightScheme("spherical", param=2.4).weight_of((8, -3)) == pytest.approx(
        2.4 * 8 ** (1 / 6)
    )


def test_weights_clamped_at_one():
    # spherical at l = 0 and fractional powers below 1 clamp to 1
    assert WeightScheme("spherical", param=2.4).weight_of((0, 0)) == 1.0
    assert WeightScheme("table", table=(0.2, 5.0)).weight_of(1) == 1.0
    assert WeightScheme("constant", param=0.5).weight_of(7) == 1.0


def test_weights_for_uses_canonical_positions():
    iset = build_index_set("range_1d", N=4)
    w = WeightScheme("linear").weights_for(iset)
    assert np.allclose(w, [1, 2, 3, 4])
    iset2 = build_index_set("hyperbolic_cross", d=2, s=3)
    w2 = WeightScheme("hyperbolic").weights_for(iset2)
    assert w2[0] == 1.0  # (0,0)


def test_weighted_cardinality():
    scheme = WeightScheme("linear")
    iset = build_index_set("range_1d", N=6)
    assert weighted_cardinality([(1,), (3,)], scheme, iset) == pytest.approx(10.0)


def test_scheme_validation():
    with pytest.raises(ValueError):
        WeightScheme("nope")
    with pytest.raises(ValueError):
        WeightScheme("power")  # missing parameter
    with pytest.raises(ValueError):
        WeightScheme("table")
    with pytest.raises(TypeError):
        WeightScheme("linear").weight_of((1, 2))
    with pytest.raises(ValueError):
        WeightScheme("linear").weight_of(0)


# -- truncation sets --------------------------------------------------------

def test_half_budget_linear_weights():
    # omega_j = j, s = 50: keep j with j^2 <= 25
    tset = truncation_set(None, WeightScheme("linear"), 50.0)
    assert list(tset) == [(1,), (2,), (3,), (4,), (5,)]


def test_half_budget_monotone_in_s():
    scheme = WeightScheme("sqrt")
    prev = set()
    for s in (4, 9, 16, 36):
        cur = set(truncation_set(None, scheme, float(s)))
        assert prev <= cur
        prev = cur


def test_half_budget_on_finite_universe():
    iset = build_index_set("hyperbolic_cross", d=2, s=6)
    tset = truncation_set(iset, WeightScheme("hyperbolic"), 8.0)
    for k in tset:
        assert WeightScheme("hyperbolic").weight_of(k) ** 2 <= 4.0


def test_theorem62_rule():
    scheme = WeightScheme("linear")
    s = 100.0
    tset = truncation_set(None, scheme, s, rule="theorem62", p=0.5)
    thresh = s ** (0.5 - 2.0)
    for (j,) in tset:
        w = float(j)
        v = 2.0 * w * w
        assert w * v ** (1.0 - 4.0) >= thresh
    with pytest.raises(ValueError):
        truncation_set(None, scheme, s, rule="theorem62")  # missing p


def test_truncation_not_finite():
    with pytest.raises(TruncationNotFiniteError):
        truncation_set(None, WeightScheme("constant", param=1.0), 50.0,
                       scan_cap=5000)
