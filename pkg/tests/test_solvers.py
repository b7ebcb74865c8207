import numpy as np
import pytest

from wl1interp.solvers import (
    ConstraintSpec,
    certify_optimality,
    lp_oracle_wl1,
    solve_exact,
    solve_least_squares,
    solve_wl1,
    solve_wl2,
)


def test_lp_oracle_frozen_examples():
    A = np.array([[1.0, 1.0]])
    r = lp_oracle_wl1(A, [2.0], [1.0, 3.0])
    assert np.allclose(r.coefficients, [2.0, 0.0])
    assert r.objective == pytest.approx(2.0)
    # degenerate tie: lexicographic basis order puts the mass on column 1
    r2 = lp_oracle_wl1(A, [2.0], [1.0, 1.0])
    assert np.allclose(r2.coefficients, [2.0, 0.0])
    assert lp_oracle_wl1(A, [0.0], [1.0, 1.0]).objective == 0.0


def test_lp_oracle_caps_and_infeasible():
    with pytest.raises(ValueError):
        lp_oracle_wl1(np.ones((7, 4)), np.ones(7), np.ones(4))
    with pytest.raises(ValueError):
        lp_oracle_wl1(np.ones((2, 11)), np.ones(2), np.ones(11))
    r = lp_oracle_wl1(np.zeros((2, 3)), [1.0, 0.0], np.ones(3))
    assert r.status == "infeasible"


def test_solve_wl1_zero_rhs():
    A = np.random.default_rng(0).standard_normal((3, 6))
    r = solve_wl1(A, np.zeros(3), np.ones(6))
    assert r.status == "converged" and np.allclose(r.coefficients, 0.0)
    r2 = solve_wl1(A, np.zeros(3), np.ones(6), ConstraintSpec("ball", 0.1))
    assert np.allclose(r2.coefficients, 0.0)


def test_solve_wl1_square_singleton():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((5, 5)) + 5 * np.eye(5)
    y = rng.standard_normal(5)
    r = solve_wl1(A, y, np.ones(5))
    assert np.allclose(r.coefficients, np.linalg.solve(A, y), atol=1e-7)


def test_solve_wl1_matches_oracle():
    rng = np.random.default_rng(2)
    for _ in range(25):
        A = rng.standard_normal((4, 8))
        x = np.zeros(8)
        x[rng.choice(8, 2, replace=False)] = rng.standard_normal(2)
        y = A @ x
        om = 1.0 + 2.0 * rng.random(8)
        lp = lp_oracle_wl1(A, y, om)
        r = solve_wl1(A, y, om)
        assert abs(r.objective - lp.objective) <= 1e-6 * (1 + lp.objective)


def test_scaling_equivariance():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((4, 9))
    y = rng.standard_normal(4)
    om = 1.0 + rng.random(9)
    z1 = solve_wl1(A, y, om).coefficients
    z5 = solve_wl1(A, 5.0 * y, om).coefficients
    assert np.allclose(z5, 5.0 * z1, atol=1e-7)


def test_weighted_unweighted_reduction():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((4, 9))
    y = rng.standard_normal(4)
    om = 1.0 + 2.0 * rng.random(9)
    zw = solve_wl1(A, y, om).coefficients
    zu = solve_wl1(A / om[None, :], y, np.ones(9)).coefficients
    assert np.allclose(zw, zu / om, atol=1e-7)


def test_objective_monotone_in_eta():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((6, 15))
    y = rng.standard_normal(6)
    om = np.ones(15)
    objs = [solve_wl1(A, y, om, ConstraintSpec("ball", eta)).objective
            for eta in (0.01, 0.1, 0.5)]
    assert objs[0] >= objs[1] >= objs[2]


def test_ball_infeasible_detected():
    # zero matrix cannot reach a nonzero y
    r = solve_wl1(np.zeros((3, 4)), np.ones(3), np.ones(4),
                  ConstraintSpec("ball", 0.1))
    assert r.status == "infeasible"


def test_certificate_from_solver():
    rng = np.random.default_rng(6)
    A = rng.standard_normal((5, 10))
    x = np.zeros(10)
    x[[1, 7]] = [2.0, -1.0]
    y = A @ x
    om = 1.0 + rng.random(10)
    r = solve_wl1(A, y, om)
    cert = certify_optimality(A, y, om, r.coefficients, dual=r.certificate)
    assert cert["ok"]


def test_certificate_rejects_least_squares_solution():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((5, 10))
    y = rng.standard_normal(5)
    z_ls, *_ = np.linalg.lstsq(A, y, rcond=None)
    cert = certify_optimality(A, y, np.ones(10), z_ls)
    assert not cert["ok"]


def test_certificate_perturbation_increases_gap():
    rng = np.random.default_rng(8)
    A = rng.standard_normal((4, 8))
    x = np.zeros(8)
    x[2] = 1.5
    y = A @ x
    om = np.ones(8)
    r = solve_wl1(A, y, om)
    base = certify_optimality(A, y, om, r.coefficients, dual=r.certificate)
    z_pert = r.coefficients.copy()
    z_pert[5] += 1e-3
    pert = certify_optimality(A, y, om, z_pert, tol=1e-8, dual=r.certificate)
    assert pert["gap"] > base["gap"]
    assert not pert["ok"]


def test_wl2_frozen_examples():
    A = np.array([[1.0, 1.0]])
    r = solve_wl2(A, [2.0], [1.0, 1.0])
    assert np.allclose(r.coefficients, [1.0, 1.0])
    r2 = solve_wl2(A, [2.0], [1.0, 2.0])
    assert np.allclose(r2.coefficients, [1.6, 0.4])
    assert np.allclose(solve_wl2(A, [0.0], [1.0, 2.0]).coefficients, 0.0)


def test_wl2_rank_deficient_flagged():
    A = np.array([[1.0, 0.0], [1.0, 0.0]])  # duplicate rows
    r = solve_wl2(A, [1.0, 1.0], [1.0, 1.0])
    assert r.flags.get("rank_deficient")
    assert np.linalg.norm(A @ r.coefficients - [1.0, 1.0]) < 1e-8


def test_least_squares_contracts():
    rng = np.random.default_rng(9)
    A = rng.standard_normal((10, 20))
    x = np.zeros(20)
    x[:4] = rng.standard_normal(4)
    y = A[:, :4] @ x[:4]
    r = solve_least_squares(A, y, 4)
    assert np.linalg.norm(A @ r.coefficients - y) < 1e-10 * np.linalg.norm(y)
    # overdetermined: residual orthogonal to the column span
    y2 = rng.standard_normal(10)
    r2 = solve_least_squares(A, y2, 4)
    resid = A[:, :4] @ r2.coefficients[:4] - y2
    assert np.max(np.abs(A[:, :4].T @ resid)) < 1e-8 * np.linalg.norm(y2)
    with pytest.raises(ValueError):
        solve_least_squares(A, y2, 11)


def test_exact_solve_contracts():
    assert solve_exact(np.array([[2.0]]), [6.0]).coefficients[0] == pytest.approx(3.0)
    rng = np.random.default_rng(10)
    A = rng.standard_normal((10, 14))
    z0 = rng.standard_normal(10)
    y = A[:, :10] @ z0
    r = solve_exact(A, y)
    assert np.allclose(r.coefficients[:10], z0, rtol=1e-8)
    assert np.allclose(r.coefficients[10:], 0.0)


def test_exact_ill_conditioned_fallback():
    A = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]])
    r = solve_exact(A, [1.0, 1.0])
    assert r.flags.get("ill_conditioned")
    assert np.all(np.isfinite(r.coefficients))


def test_infeasible_equality():
    r = solve_wl1(np.zeros((3, 4)), np.ones(3), np.ones(4))
    assert r.status == "infeasible"


def test_weight_validation():
    A = np.ones((2, 3))
    with pytest.raises(ValueError):
        solve_wl1(A, np.ones(2), [0.5, 1.0, 1.0])
    with pytest.raises(ValueError):
        ConstraintSpec("ball", -1.0)
    with pytest.raises(ValueError):
        ConstraintSpec("box")
