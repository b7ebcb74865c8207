import math

import numpy as np
import pytest

from wl1interp.bases import OrthonormalSystem, evaluate
from wl1interp.experiments import (
    ExperimentConfig,
    MethodSpec,
    plant_target,
    run_interpolation_trial,
    run_phase_diagram,
    run_spherical_demo,
    runge_preset,
    spherical_index_set,
    summarize,
    tail_eta,
    target_function,
)
from wl1interp.indexsets import IndexSet, WeightScheme, build_index_set
from wl1interp.sampling import RandomStream


def test_named_targets():
    f, coef = target_function({"kind": "runge"})
    assert coef is None
    assert f(0.0) == pytest.approx(1.0)
    assert f(1.0) == pytest.approx(1.0 / 26.0)
    g, _ = target_function({"kind": "named", "name": "absolute_value"})
    assert g(-0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        target_function({"kind": "named", "name": "sinc"})
    with pytest.raises(ValueError):
        target_function({"kind": "mystery"})


def test_coefficient_target_matches_basis():
    system = OrthonormalSystem("chebyshev")
    iset = IndexSet(1, tuple((k,) for k in range(5)))
    vals = [0.0, 0.0, 2.0, 0.0, 0.0]
    f, coef = target_function({"kind": "coefficients", "values": vals},
                              system, iset)
    t = np.linspace(-1, 1, 11)
    assert np.allclose(f(t), 2.0 * evaluate(system, (2,), t))
    assert np.array_equal(coef, vals)
    with pytest.raises(ValueError):
        target_function({"kind": "coefficients", "values": [1.0]}, system, iset)
    with pytest.raises(ValueError):
        target_function({"kind": "coefficients", "values": vals})


def test_tail_eta_values():
    universe = build_index_set("range_1d", N=8)
    omega = WeightScheme("sqrt").weights_for(universe)
    x = np.array([(j + 1.0) ** -3 for j in range(8)])
    lam0 = universe.subset([(1,), (2,), (3,)])
    eta, radius = tail_eta(x, universe, lam0, omega)
    expect = sum(math.sqrt(j) * j**-3 for j in range(4, 9))
    assert eta == pytest.approx(expect)
    # radius scales as sqrt(m/s) * eta
    assert radius(16, 4.0) == pytest.approx(2.0 * eta)
    assert radius(32, 4.0) == pytest.approx(math.sqrt(2) * radius(16, 4.0))
    # a target fully inside Lambda0 has zero tail
    eta0, _ = tail_eta([1, 1, 1, 0, 0, 0, 0, 0], universe, lam0, omega)
    assert eta0 == 0.0
    with pytest.raises(ValueError):
        tail_eta([1.0], universe, lam0, omega)


def test_method_spec_validation():
    with pytest.raises(ValueError):
        MethodSpec("wl1", "w")  # missing weights
    with pytest.raises(ValueError):
        MethodSpec("theorem12", "t", weights=WeightScheme("sqrt"))  # missing s
    with pytest.raises(ValueError):
        MethodSpec("banana", "b")


def _small_config(methods, target, trials=1, m=20):
    system = OrthonormalSystem("chebyshev")
    iset = IndexSet(1, tuple((k,) for k in range(12)))
    return ExperimentConfig(
        system=system, index_set=iset, measure_tag=system.measure.tag,
        m=m, trials=trials, seed=123, methods=methods, target=target,
        grid_size=401, quad_nodes=80,
    )


def test_planted_recovery_with_certificate():
    vals = [0.0] * 12
    vals[5] = 1.0
    vals[1] = -0.7
    cfg = _small_config(
        (MethodSpec("wl1", "wl1_sqrt", weights=WeightScheme("sqrt")),),
        {"kind": "coefficients", "values": vals},
    )
    (row,) = run_interpolation_trial(cfg, 0)
    assert row.status == "converged"
    assert np.allclose(row.coefficients, vals, atol=1e-6)
    assert row.error_linf < 1e-6 and row.error_l2 < 1e-6


def test_exact_inversion_interpolates_samples():
    from wl1interp.sampling import SamplingMeasure, draw_points

    cfg = _small_config((MethodSpec("exact_inversion", "exact"),),
                        {"kind": "runge"}, m=12)
    (row,) = run_interpolation_trial(cfg, 0)
    # reconstruction matches f at the drawn nodes
    pts = draw_points(SamplingMeasure("chebyshev_1d"), 12, RandomStream(123, 0))
    f, _ = target_function({"kind": "runge"})
    rec = sum(
        zj * evaluate(cfg.system, idx, pts)
        for zj, idx in zip(row.coefficients, cfg.index_set)
    )
    assert np.max(np.abs(rec - f(pts))) < 1e-8


def test_least_squares_stays_in_leading_span():
    cfg = _small_config((MethodSpec("least_squares", "ls6", d=6),),
                        {"kind": "runge"})
    (row,) = run_interpolation_trial(cfg, 0)
    assert np.allclose(row.coefficients[6:], 0.0)


def test_theorem12_ball_constraint_path():
    vals = [(j + 1.0) ** -3 for j in range(12)]
    cfg = _small_config(
        (MethodSpec("theorem12", "thm", weights=WeightScheme("sqrt"), s=6.0),),
        {"kind": "coefficients", "values": vals},
    )
    (row,) = run_interpolation_trial(cfg, 0)
    assert row.status == "converged"
    assert row.diagnostics["eta"] > 0.0
    assert row.diagnostics["ball_radius"] > 0.0


def test_trial_determinism():
    cfg = _small_config(
        (MethodSpec("wl1", "wl1_lin", weights=WeightScheme("linear")),
         MethodSpec("wl2", "wl2_lin", alpha=WeightScheme("linear"))),
        {"kind": "runge"},
    )
    a = run_interpolation_trial(cfg, 3)
    b = run_interpolation_trial(cfg, 3)
    for ra, rb in zip(a, b):
        assert np.array_equal(ra.coefficients, rb.coefficients)
        assert ra.error_linf == rb.error_linf


def test_runge_preset_shapes():
    for name in ("runge-trig", "runge-legendre"):
        cfg = runge_preset(name, 7)
        assert cfg.m == 30 and cfg.trials == 100 and len(cfg.index_set) == 100
        assert [m.label for m in cfg.methods] == [
            "least_squares_15", "wl2_linear", "exact_inversion_30",
            "unweighted_l1", "wl1_sqrt", "wl1_linear",
        ]
    with pytest.raises(ValueError):
        runge_preset("runge-hermite", 0)


def test_summarize_medians():
    cfg = _small_config(
        (MethodSpec("least_squares", "ls6", d=6),), {"kind": "runge"}, trials=3
    )
    rows = []
    for t in range(3):
        rows.extend(run_interpolation_trial(cfg, t))
    summary = summarize(rows)
    errs = sorted(r.error_linf for r in rows)
    assert summary["ls6"]["trials"] == 3
    assert summary["ls6"]["failures"] == 0
    assert summary["ls6"]["error_linf"]["median"] == pytest.approx(errs[1])


def test_plant_target_respects_budget():
    rng = np.random.default_rng(5)
    omega = WeightScheme("linear").weights_for(build_index_set("range_1d", N=10))
    for _ in range(20):
        x = plant_target(omega, 14.0, rng)
        used = float(np.sum(omega[x != 0.0] ** 2))
        assert used <= 14.0 * (1 + 1e-12) + 1e-12
        assert np.any(x != 0.0)


def test_phase_diagram_small():
    system = OrthonormalSystem("real_trigonometric")
    iset = build_index_set("range_1d", N=15)
    out = run_phase_diagram(system, iset, WeightScheme("sqrt"),
                            m_values=[15], s_values=[2.0], trials=4,
                            stream=RandomStream(11))
    assert out["probability"].shape == (1, 1)
    assert 0.0 <= out["probability"][0, 0] <= 1.0


def test_spherical_index_set():
    iset = spherical_index_set(2)
    assert len(iset) == 9
    assert list(iset)[:4] == [(0, 0), (1, -1), (1, 0), (1, 1)]


def test_spherical_demo_recovers_planted():
    out = run_spherical_demo(ell_max=4, m=220, n_active=4, seed=21)
    assert out["status"] == "converged"
    assert out["relative_l2_error"] < 1e-6
    assert out["certificate"]["ok"]
    assert 0.0 <= out["theta_chi2_p_value"] <= 1.0
