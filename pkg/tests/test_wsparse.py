import json
import math

import numpy as np
import pytest

from wl1interp.wsparse import (
    best_approx_oracle,
    lp_norm_domination,
    quasi_best_approx,
    stechkin_bound,
    weighted_cardinality,
    weighted_l0,
    weighted_norm,
)


def test_weighted_norm_values():
    # single active entry: omega^(2-p) |x|^p, p = 1
    assert weighted_norm([0.5, 0.0], [2.0, 9.0], 1.0) == pytest.approx(1.0)
    # p = 2 ignores the weights entirely
    assert weighted_norm([3.0, 4.0], [5.0, 7.0], 2.0) == pytest.approx(5.0)
    # p < 1
    x, om = [1.0, 8.0], [1.0, 2.0]
    expect = (1.0 + 2.0 ** 1.5 * 8.0 ** 0.5) ** 2.0
    assert weighted_norm(x, om, 0.5) == pytest.approx(expect)
    with pytest.raises(ValueError):
        weighted_norm(x, om, 0.0)
    with pytest.raises(ValueError):
        weighted_norm(x, om, 2.5)


def test_weighted_l0_and_cardinality():
    assert weighted_l0([1.0, 0.0, -2.0], [1.0, 5.0, 3.0]) == pytest.approx(10.0)
    assert weighted_cardinality([0, 2], [1.0, 5.0, 3.0]) == pytest.approx(10.0)
    assert weighted_l0([0.0, 0.0], [2.0, 2.0]) == 0.0


def test_quasi_best_frozen_example():
    # position 2 has omega^2 = 4 > remaining budget, so only position 1 fits
    r = quasi_best_approx([1.0, 1.0], [1.0, 2.0], 2.0, 1.0)
    assert r.support == (0,)
    assert r.error == pytest.approx(2.0)
    assert r.flavor == "quasi_best"


def test_quasi_best_stops_at_first_excess():
    # scores tie; greedy admits position order, halting on the first overflow
    r = quasi_best_approx([1.0, 1.0, 1.0], [1.0, 1.0, 10.0], 2.0, 1.0)
    assert r.support == (0, 1)


def test_quasi_best_tie_break_lower_position():
    r = quasi_best_approx([1.0, 1.0], [1.0, 1.0], 1.0, 1.0)
    assert r.support == (0,)


def test_oracle_matches_quasi_on_flat_weights():
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.standard_normal(8)
        s = rng.integers(1, 8)
        q = quasi_best_approx(x, np.ones(8), float(s), 2.0)
        b = best_approx_oracle(x, np.ones(8), float(s), 2.0)
        # with unit weights the greedy rearrangement is exactly optimal
        assert q.error == pytest.approx(b.error, abs=1e-12)


def test_sandwich_property():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = rng.integers(4, 12)
        x = rng.standard_normal(n) * (rng.random(n) < 0.6)
        om = 1.0 + 2.0 * rng.random(n)
        s = float(rng.uniform(1.0, np.sum(om**2)))
        p = float(rng.choice([0.5, 1.0, 1.5, 2.0]))
        q = quasi_best_approx(x, om, s, p)
        b = best_approx_oracle(x, om, s, p)
        assert b.error <= q.error + 1e-12
        if s >= np.max(om) ** 2:
            b3 = best_approx_oracle(x, om, 3.0 * s, p)
            q3 = quasi_best_approx(x, om, 3.0 * s, p)
            assert q3.error <= b.error + 1e-12
            assert b3.error <= q3.error + 1e-12


def test_errors_nonincreasing_in_s():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(10)
    om = 1.0 + rng.random(10)
    prev_q, prev_b = np.inf, np.inf
    for s in np.linspace(1.0, 15.0, 12):
        q = quasi_best_approx(x, om, s, 1.0).error
        b = best_approx_oracle(x, om, s, 1.0).error
        assert q <= prev_q + 1e-12 and b <= prev_b + 1e-12
        prev_q, prev_b = q, b


def test_oracle_tie_break_and_cap():
    r = best_approx_oracle([1.0, 1.0], [1.0, 1.0], 1.0, 1.0)
    assert r.support == (0,)
    with pytest.raises(ValueError):
        best_approx_oracle(np.ones(30), np.ones(30), 2.0, 1.0)


def test_stechkin_bound_holds():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = rng.integers(3, 15)
        x = rng.standard_normal(n)
        om = 1.0 + rng.random(n)
        winf2 = np.max(om) ** 2
        s = float(winf2 + rng.uniform(0.5, 10.0))
        p = float(rng.uniform(0.2, 1.0))
        q = float(rng.uniform(p + 0.05, 2.0))
        sigma = quasi_best_approx(x, om, s, q).error
        assert sigma <= stechkin_bound(x, om, s, p, q) * (1 + 1e-12)


def test_stechkin_requires_budget_above_peak_weight():
    with pytest.raises(ValueError):
        stechkin_bound([1.0], [2.0], 3.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        stechkin_bound([1.0], [1.0], 3.0, 1.0, 1.0)  # p < q violated


def test_lp_norm_domination():
    # single entry: both sides coincide exactly
    lhs, rhs = lp_norm_domination([3.0], [2.0], 0.5)
    assert lhs == pytest.approx(rhs)
    rng = np.random.default_rng(4)
    for _ in range(100):
        x = rng.standard_normal(6)
        om = 1.0 + 2.0 * rng.random(6)
        p = float(rng.uniform(0.1, 0.95))
        lhs, rhs = lp_norm_domination(x, om, p)
        assert lhs <= rhs * (1 + 1e-12)


def test_approx_result_json():
    r = quasi_best_approx([1.0, 1.0], [1.0, 2.0], 2.0, 1.0)
    doc = json.loads(r.to_json())
    assert doc["support"] == [0] and doc["flavor"] == "quasi_best"
    assert doc["error"] == pytest.approx(2.0)
