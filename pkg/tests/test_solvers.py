"""Tests for the damped and plain gradient iterations and their stopping rules."""

import numpy as np
import pytest

from dsmsolve import (
    Preconditioner,
    SolveConfig,
    apriori_steps,
    build_preconditioner,
    dsm_step,
    landweber_solve,
    residuals_nonincreasing,
    solve_dsm,
)
from dsmsolve.problems import heat_instance


def identity_setup(n=3, a=1.0):
    A = np.eye(n)
    f = np.zeros(n)
    f[0] = 1.0
    return A, f, build_preconditioner(A, a)


def test_config_defaults_are_valid():
    cfg = SolveConfig()
    assert cfg.h == 1.0 and cfg.C == 1.01 and cfg.stopping == "discrepancy"
    assert cfg.max_iter == 10_000


@pytest.mark.parametrize(
    "kwargs",
    [
        {"h": 0.0},
        {"h": -1.0},
        {"C": 1.0},
        {"C": 2.0},
        {"C": 0.5},
        {"gamma": 0.0},
        {"gamma": 1.0},
        {"apriori_C": 0.0},
        {"stopping": "never"},
        {"max_iter": 0},
    ],
)
def test_config_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        SolveConfig(**kwargs)


def test_apriori_steps_reference_values():
    assert apriori_steps(0.01, 1.0, 1.0, 0.5) == 10
    assert apriori_steps(0.04, 0.5, 1.0, 0.5) == 10
    assert apriori_steps(1.0, 1.0, 1.0, 0.5) == 1
    assert apriori_steps(0.0001, 1.0, 1.0, 0.5) == 100


def test_apriori_steps_rejects_bad_arguments():
    with pytest.raises(ValueError):
        apriori_steps(0.0, 1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        apriori_steps(0.01, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        apriori_steps(0.01, 1.0, -1.0, 0.5)
    with pytest.raises(ValueError):
        apriori_steps(0.01, 1.0, 1.0, 1.5)


def test_identity_discrepancy_run_halves_residual():
    """Unit step on the identity with a = 1 halves the residual every step."""
    A, f, precond = identity_setup()
    result = solve_dsm(A, f, 0.01, precond)
    assert result.stop_reason == "discrepancy_met"
    assert result.iterations == 7
    assert len(result.residual_history) == 8
    for k, value in enumerate(result.residual_history):
        assert value == pytest.approx(2.0**-k, rel=1e-12)
    assert np.allclose(result.solution, f * (1.0 - 2.0**-7), rtol=1e-12, atol=1e-15)
    assert result.a_used == 1.0


def test_first_crossing_is_reported():
    A, f, precond = identity_setup()
    result = solve_dsm(A, f, 0.01, precond)
    threshold = 1.01 * 0.01
    assert result.residual_history[result.iterations] <= threshold
    assert result.residual_history[result.iterations - 1] > threshold


def test_initial_guess_already_below_threshold():
    A, f, precond = identity_setup()
    result = solve_dsm(A, f, 0.5, precond, u0=f)
    assert result.stop_reason == "initial_already_small"
    assert result.iterations == 0
    assert len(result.residual_history) == 1


def test_apriori_mode_runs_exactly_the_budget():
    A, f, precond = identity_setup()
    cfg = SolveConfig(h=0.5, stopping="apriori")
    result = solve_dsm(A, f, 0.04, precond, cfg)
    assert result.stop_reason == "apriori_reached"
    assert result.iterations == 10
    assert len(result.residual_history) == 11


def test_apriori_budget_capped_by_max_iter():
    A, f, precond = identity_setup()
    cfg = SolveConfig(stopping="apriori", max_iter=5)
    result = solve_dsm(A, f, 1e-8, precond, cfg)
    assert result.iterations == 5
    assert result.stop_reason == "max_iter"


def test_discrepancy_unreachable_hits_max_iter():
    A = np.diag([1.0, 0.0])
    f = np.array([1.0, 1.0])
    precond = build_preconditioner(A, 0.5)
    cfg = SolveConfig(max_iter=30)
    result = solve_dsm(A, f, 0.1, precond, cfg)
    assert result.stop_reason == "max_iter"
    assert result.iterations == 30
    assert result.residual_history[-1] >= 1.0 - 1e-12


def test_solver_input_validation():
    A, f, precond = identity_setup()
    with pytest.raises(ValueError, match="dimension mismatch"):
        solve_dsm(A, np.ones(4), 0.01, precond)
    with pytest.raises(ValueError, match="preconditioner"):
        solve_dsm(np.eye(4), np.ones(4), 0.01, precond)
    with pytest.raises(ValueError, match="nonnegative"):
        solve_dsm(A, f, -0.1, precond)
    with pytest.raises(ValueError, match="delta > 0"):
        solve_dsm(A, f, 0.0, precond)
    with pytest.raises(ValueError, match="initial guess"):
        solve_dsm(A, f, 0.01, precond, u0=np.ones(5))


def test_step_size_guard_for_damped_iteration():
    A, f, precond = identity_setup()  # ||T|| = 0.5
    with pytest.raises(ValueError, match="step size too large"):
        solve_dsm(A, f, 0.01, precond, SolveConfig(h=4.0))
    result = solve_dsm(A, f, 0.01, precond, SolveConfig(h=3.5))
    assert result.stop_reason == "discrepancy_met"


def test_landweber_identity_run():
    A = np.eye(3)
    f = np.array([1.0, 0.0, 0.0])
    result = landweber_solve(A, f, 0.01, SolveConfig(h=0.5))
    assert result.stop_reason == "discrepancy_met"
    assert result.iterations == 7
    for k, value in enumerate(result.residual_history):
        assert value == pytest.approx(2.0**-k, rel=1e-12)
    assert result.a_used is None


def test_landweber_step_size_guard():
    A = np.eye(2)
    f = np.array([1.0, 0.0])
    with pytest.raises(ValueError, match="step size too large"):
        landweber_solve(A, f, 0.01, SolveConfig(h=2.0))
    with pytest.raises(ValueError, match="dimension mismatch"):
        landweber_solve(A, np.ones(3), 0.01)


def test_dsm_step_is_one_damped_update():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((6, 4))
    f = rng.standard_normal(6)
    u = rng.standard_normal(4)
    precond = build_preconditioner(A, 0.2)
    expected = u - 0.8 * precond.apply_p(A @ u - f)
    assert np.allclose(dsm_step(precond, 0.8, u, f), expected, rtol=0, atol=0)


def test_residual_histories_never_increase():
    """Monotone residuals on random rectangular systems, both solvers, both modes."""
    for seed in range(25):
        rng = np.random.default_rng(seed)
        m, n = rng.integers(3, 12, size=2)
        A = rng.standard_normal((m, n))
        f = rng.standard_normal(m)
        delta = 0.05 * float(np.linalg.norm(f))
        a = float(rng.uniform(1e-3, 1.0))
        cfg = SolveConfig(max_iter=200)
        result = solve_dsm(A, f, delta, build_preconditioner(A, a), cfg)
        assert residuals_nonincreasing(result.residual_history), f"seed {seed}"
        h = float(1.5 / op_norm_squared(A))
        lw = landweber_solve(A, f, delta, SolveConfig(h=h, max_iter=200))
        assert residuals_nonincreasing(lw.residual_history), f"seed {seed} landweber"
        ap = solve_dsm(A, f, delta, build_preconditioner(A, a),
                       SolveConfig(stopping="apriori", apriori_C=2.0))
        assert residuals_nonincreasing(ap.residual_history), f"seed {seed} apriori"


def op_norm_squared(A):
    return float(np.linalg.svd(A, compute_uv=False)[0] ** 2)


def test_monotone_on_noisy_heat_instances():
    for seed in range(5):
        inst = heat_instance(20, 0.05, seed)
        precond = build_preconditioner(inst.A, 1e-3)
        result = solve_dsm(inst.A, inst.b_noisy, inst.delta, precond)
        assert residuals_nonincreasing(result.residual_history)
        assert result.stop_reason == "discrepancy_met"


def test_residuals_nonincreasing_helper():
    assert residuals_nonincreasing([3.0, 2.0, 2.0, 1.0])
    assert residuals_nonincreasing([1.0, 1.0 + 1e-13])
    assert not residuals_nonincreasing([1.0, 1.1])
    assert residuals_nonincreasing([])
    assert residuals_nonincreasing([5.0])
