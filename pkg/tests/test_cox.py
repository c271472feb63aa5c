import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from conftest import random_design
from funcfrail import cox
from funcfrail.cox import (CoxDesign, FrailtyConfig, approx_profile_loglik, breslow_cumhaz, inner_newton,
                           laplace_K_matrix, penalized_partial_loglik, ppl_hessian, ppl_score,
                           predict_risk, update_alpha)
from funcfrail.inference import concordance
from funcfrail.pipeline import PipelineSettings, fit_pipeline
from funcfrail.simulation import SimConfig, generate_dataset, substream
from oracles import breslow_double_loop, golden_section_max, ppl_literal


def fd_grad(f, x, h=1e-5):
    g = np.zeros_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def rel_err(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-8)


# ---------------------------------------------------------------------------
# design
# ---------------------------------------------------------------------------


def test_design_validation():
    with pytest.raises(ValueError):
        CoxDesign.build([1.0, -1.0], [1, 0])
    with pytest.raises(ValueError):
        CoxDesign.build([1.0, 2.0], [1, 2])
    with pytest.raises(ValueError):
        CoxDesign.build([1.0, 2.0], [1])


def test_rank_deficient_design_warns():
    Z = np.ones((5, 2))
    with pytest.warns(RuntimeWarning, match="rank deficient"):
        CoxDesign.build(np.arange(1.0, 6.0), np.ones(5), Z)


def test_incidence_matrix():
    d = CoxDesign.build([1.0, 2, 3, 4], [1, 1, 0, 1], group=["b", "a", "b", "c"])
    U = d.U
    assert U.shape == (4, 3)
    np.testing.assert_array_equal(U.sum(axis=1), 1)
    assert np.linalg.matrix_rank(U) == 3
    assert CoxDesign.build([1.0, 2.0], [1, 1]).unshared


def test_risk_sets_nested():
    d = random_design(np.random.default_rng(0), n=25, ties=True)
    sets = [set(d.risk.risk_set(t, d.time)) for t in d.risk.event_times]
    assert all(a >= b for a, b in zip(sets, sets[1:]))


# ---------------------------------------------------------------------------
# objective, score, Hessian
# ---------------------------------------------------------------------------


def test_null_model_loglik():
    n = 7
    d = CoxDesign.build(np.arange(1.0, n + 1), np.ones(n), np.zeros((n, 1)) + np.arange(n)[:, None])
    val = penalized_partial_loglik(np.zeros(1), np.zeros(n), 1.0, d)
    assert abs(val + math.log(math.factorial(n))) < 1e-12


def test_single_subject():
    d = CoxDesign.build([2.0], [1], np.array([[0.7]]))
    w = np.array([0.3])
    assert abs(penalized_partial_loglik(np.array([1.5]), w, 0.5, d) + 0.09) < 1e-15


def test_loglik_matches_literal_sum():
    rng = np.random.default_rng(3)
    d = random_design(rng, n=5, p=1, K=1, ties=True)
    theta, w = rng.standard_normal(2), rng.standard_normal(5)
    ref = ppl_literal(theta, w, 0.7, d.time, d.status, d.D.tolist(), d.group)
    assert abs(penalized_partial_loglik(theta, w, 0.7, d) - ref) < 1e-12


def test_loglik_overflow_safe():
    d = random_design(np.random.default_rng(4), n=20)
    val = penalized_partial_loglik(np.array([400.0, -300.0, 200.0]), np.zeros(20), 1.0, d)
    assert np.isfinite(val)


def test_symmetric_design_zero_score():
    Z = np.array([[1.0, -0.5], [-1.0, 0.5], [2.0, 0.3], [-2.0, -0.3]])
    t = np.array([1.0, 1.0, 2.0, 2.0])
    d = CoxDesign.build(t, np.ones(4), Z)
    s_t, _ = ppl_score(np.zeros(2), np.zeros(4), 1.0, d)
    np.testing.assert_allclose(s_t, 0.0, atol=1e-14)


def test_penalty_silent_at_zero_frailty():
    d = random_design(np.random.default_rng(5), n=15)
    theta = np.array([0.2, -0.1, 0.4])
    a = ppl_score(theta, np.zeros(15), 0.01, d)[1]
    b = ppl_score(theta, np.zeros(15), 100.0, d)[1]
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("groups", [None, 4])
def test_score_and_hessian_finite_differences(groups):
    rng = np.random.default_rng(6)
    d = random_design(rng, n=30, p=2, K=2, groups=groups, ties=True)
    p, nw = d.n_theta, d.n_groups
    alpha = 0.6
    for _ in range(5):
        x = np.concatenate([rng.normal(0, 0.5, p), rng.normal(0, 0.3, nw)])

        def f(v):
            return penalized_partial_loglik(v[:p], v[p:], alpha, d)

        def g(v):
            return np.concatenate(ppl_score(v[:p], v[p:], alpha, d))

        assert rel_err(g(x), fd_grad(f, x)) < 1e-6
        H = ppl_hessian(x[:p], x[p:], alpha, d)
        fd_H = -np.array([fd_grad(lambda v, k=k: g(v)[k], x, 1e-4) for k in range(x.size)])
        assert rel_err(H, fd_H) < 1e-5
        np.testing.assert_allclose(H, H.T, atol=1e-12)


def test_hessian_single_event_risk_set_of_one():
    d = CoxDesign.build([1.0], [1], np.array([[0.4]]))
    H = ppl_hessian(np.array([0.3]), np.array([0.1]), 0.25, d)
    np.testing.assert_allclose(H[:1, :1], 0.0, atol=1e-15)
    np.testing.assert_allclose(H[1:, 1:], 4.0, atol=1e-15)


def test_hessian_two_subjects_by_hand():
    # one event at t=1 with both at risk; weighted covariance of x over the risk set
    x = np.array([0.5, -1.2])
    theta = np.array([0.8])
    d = CoxDesign.build([1.0, 2.0], [1, 0], x[:, None])
    e = np.exp(x * theta[0])
    p = e / e.sum()
    var = p @ x**2 - (p @ x) ** 2
    assert abs(ppl_hessian(theta, None, None, d)[0, 0] - var) < 1e-14


def test_hessian_positive_definite_on_frailty_block():
    d = random_design(np.random.default_rng(8), n=20)
    H = ppl_hessian(np.zeros(3), np.zeros(20), 2.0, d)
    assert np.linalg.eigvalsh(H[3:, 3:]).min() > 0
    assert np.linalg.eigvalsh(H).min() > -1e-10


def test_location_invariance():
    rng = np.random.default_rng(9)
    d = random_design(rng, n=25, p=1, K=0, ties=True)
    # an intercept column shifts every eta by the same constant
    d2 = CoxDesign.build(d.time, d.status, np.hstack([d.Z, np.ones((25, 1))]))
    theta = np.array([0.7])
    for c in (-3.0, 0.5, 12.0):
        th2 = np.array([0.7, c])
        a = penalized_partial_loglik(theta, None, None, d)
        b = penalized_partial_loglik(th2, None, None, d2)
        assert abs(a - b) < 1e-10
        np.testing.assert_allclose(ppl_score(th2, None, None, d2)[0][:1], ppl_score(theta, None, None, d)[0],
                                   atol=1e-8)


def test_collinear_design_signalled():
    Z = np.tile(np.arange(5.0)[:, None], (1, 2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = CoxDesign.build(np.arange(1.0, 6.0), np.ones(5), Z)
    with pytest.raises(cox.CollinearityError):
        cox._solve_pd(np.zeros((2, 2)) - np.eye(2), np.ones(2))
    assert isinstance(cox.CollinearityError("x"), np.linalg.LinAlgError)
    assert d.n_theta == 2


# ---------------------------------------------------------------------------
# Newton iterations
# ---------------------------------------------------------------------------


def test_golden_section_cox_mle():
    rng = np.random.default_rng(10)
    z = rng.standard_normal(60)
    T = rng.exponential(size=60) * np.exp(-0.8 * z)
    status = (rng.random(60) < 0.8).astype(int)
    d = CoxDesign.build(T, status, z[:, None])
    res = inner_newton(d, None, (np.zeros(1), np.zeros(0)), FrailtyConfig(frailty_enabled=False))
    oracle = golden_section_max(lambda b: penalized_partial_loglik(np.array([b]), None, None, d), -5, 5)
    assert res.converged
    assert abs(res.theta[0] - oracle) < 1e-4


def test_tiny_alpha_removes_frailty():
    d = random_design(np.random.default_rng(11), n=80)
    start = (np.zeros(3), np.zeros(80))
    frail = inner_newton(d, 1e-8, start, FrailtyConfig())
    plain = inner_newton(d, None, start, FrailtyConfig(frailty_enabled=False))
    assert np.max(np.abs(frail.w)) < 1e-4
    assert np.max(np.abs(frail.theta - plain.theta)) < 1e-4


def test_monotone_inner_ascent():
    d = random_design(np.random.default_rng(12), n=60, groups=6)
    vals = []
    for k in range(1, 9):
        cfg = FrailtyConfig(max_inner=k, tol_inner=1e-14)
        vals.append(inner_newton(d, 0.8, (np.zeros(3), np.zeros(6)), cfg).ppl)
    assert np.all(np.diff(vals) >= -1e-12)


def test_alternating_reaches_same_point():
    d = random_design(np.random.default_rng(13), n=50, groups=5)
    start = (np.zeros(3), np.zeros(5))
    joint = inner_newton(d, 0.5, start, FrailtyConfig())
    alt = inner_newton(d, 0.5, start, FrailtyConfig(alternating=True, max_inner=200))
    assert alt.converged
    np.testing.assert_allclose(alt.theta, joint.theta, atol=1e-6)


def test_max_inner_exhaustion_flags():
    d = random_design(np.random.default_rng(14), n=40)
    res = inner_newton(d, 1.0, (np.zeros(3), np.zeros(40)), FrailtyConfig(max_inner=1, tol_inner=1e-14))
    assert not res.converged
    assert np.all(np.isfinite(res.theta))


def test_inner_iterations_on_simulated_data():
    ok = 0
    for r in range(100):
        data = generate_dataset(SimConfig(n=250, phi=1.0), 250, substream(31, r))
        res = fit_pipeline(data, PipelineSettings(), FrailtyConfig())
        ok += res.fit.converged and max(res.fit.diagnostics["inner_iters"]) <= 25
    assert ok >= 95


# ---------------------------------------------------------------------------
# Breslow, K matrix, alpha update
# ---------------------------------------------------------------------------


def test_breslow_nelson_aalen():
    d = random_design(np.random.default_rng(15), n=30, ties=True)
    H = breslow_cumhaz(d, np.zeros(30))
    t, v = breslow_double_loop(d.time, d.status, np.zeros(30))
    np.testing.assert_array_equal(H.times, t)
    np.testing.assert_array_equal(H.values, v)


def test_breslow_one_subject():
    d = CoxDesign.build([2.0], [1])
    H = breslow_cumhaz(d, np.array([0.4]))
    assert H(1.999) == 0.0
    assert abs(H(2.0) - math.exp(-0.4)) < 1e-15


def test_breslow_double_loop_random():
    rng = np.random.default_rng(16)
    d = random_design(rng, n=10, ties=True)
    eta = rng.standard_normal(10)
    H = breslow_cumhaz(d, eta)
    t, v = breslow_double_loop(d.time, d.status, eta)
    np.testing.assert_array_equal(H.times, t)
    np.testing.assert_allclose(H.values, v, rtol=1e-14)


def test_breslow_step_function():
    d = random_design(np.random.default_rng(17), n=40)
    H = breslow_cumhaz(d, np.random.default_rng(1).standard_normal(40))
    assert H(0.0) == 0.0
    assert np.all(np.diff(H.values) > 0)
    np.testing.assert_array_equal(H.times, np.unique(d.time[d.status == 1]))
    mid = (H.times[:-1] + H.times[1:]) / 2
    np.testing.assert_array_equal(H(mid), H.values[:-1])


def test_K_matrix_unshared():
    rng = np.random.default_rng(18)
    d = random_design(rng, n=12)
    theta, w = rng.standard_normal(3), rng.standard_normal(12)
    H = breslow_cumhaz(d, d.eta(theta, w))
    K = laplace_K_matrix(d, theta, w, 0.3, H)
    np.testing.assert_allclose(K, np.diag(H(d.time) * np.exp(d.eta(theta, w)) + 1 / 0.3), rtol=1e-14)


def test_K_matrix_one_subject():
    d = CoxDesign.build([1.0], [1])
    H = breslow_cumhaz(d, np.zeros(1))
    np.testing.assert_allclose(laplace_K_matrix(d, np.zeros(0), np.zeros(1), 1.0, H), [[2.0]])


def test_K_matrix_shared_accumulation():
    rng = np.random.default_rng(19)
    d = CoxDesign.build(rng.exponential(size=9), np.ones(9), rng.standard_normal((9, 2)),
                        group=[0, 1, 2] * 3)
    theta, w = rng.standard_normal(2), rng.standard_normal(3)
    H = breslow_cumhaz(d, d.eta(theta, w))
    ref = np.eye(3) / 0.4
    for i in range(9):
        u = np.zeros(3)
        u[d.group[i]] = 1
        ref += H(d.time[i]) * math.exp(d.D[i] @ theta + w[d.group[i]]) * np.outer(u, u)
    np.testing.assert_allclose(laplace_K_matrix(d, theta, w, 0.4, H), ref, rtol=1e-13)


def test_update_alpha_arithmetic():
    assert abs(update_alpha(np.zeros(4), 2.5 * np.eye(4), 4) - 0.4) < 1e-15
    assert abs(update_alpha(np.array([1.0, 1.0]), np.diag([2.0, 4.0]), 2) - 1.375) < 1e-15
    K = np.array([[2.0, 0.5], [0.5, 3.0]])
    assert abs(update_alpha(np.zeros(2), K, 2) - np.trace(np.linalg.inv(K)) / 2) < 1e-15


def test_update_alpha_clamped():
    assert update_alpha(np.zeros(2), 1e9 * np.eye(2), 2) == cox.ALPHA_BOUNDS[0]
    assert update_alpha(np.full(2, 1e4), np.eye(2), 2) == cox.ALPHA_BOUNDS[1]


@pytest.mark.parametrize("seed", [0, 1])
def test_alpha_against_profile_grid(seed):
    """Fixed point of the closed-form variance update versus a grid maximiser.

    The closed-form update drops the dependence of log|K| on w_hat(alpha);
    on flat profiles that moves its fixed point away from the maximiser.
    """
    data = generate_dataset(SimConfig(n=500, phi=1.0), 500, substream(41, seed))
    res = fit_pipeline(data, PipelineSettings(), FrailtyConfig())
    assert res.fit.converged and res.fit.alpha_hat > 0
    grid = np.exp(np.linspace(np.log(0.01), np.log(5), 25))
    prof = [approx_profile_loglik(res.design, a) for a in grid]
    k = int(np.argmax(prof))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    best = math.exp(golden_section_max(lambda la: approx_profile_loglik(res.design, math.exp(la)),
                                       math.log(lo), math.log(hi), tol=1e-3))
    a_hat = res.fit.alpha_hat
    assert abs(a_hat - best) < 0.2 * best, f"alpha_hat={a_hat:.3f} profile maximiser={best:.3f}"


# ---------------------------------------------------------------------------
# full fit
# ---------------------------------------------------------------------------


def test_no_frailty_gamma_close_to_truth():
    """The reference value 0.002 matches the per-coordinate mean squared error."""
    from funcfrail.simulation import run_replication
    cfg = SimConfig(n=1000, tau=0.01, phi=0.01, fit_no_frailty=False, seed=77)
    mse = [run_replication(cfg, None, r, FrailtyConfig(frailty_enabled=False)).mse for r in range(10)]
    assert 0.001 <= np.mean(mse) / 6 <= 0.004


def test_all_censored_refused():
    d = CoxDesign.build([1.0, 2.0, 3.0], [0, 0, 0], np.ones((3, 1)) * [[1], [2], [3]])
    with pytest.raises(ValueError, match="no events"):
        cox.fit(d)


def test_fit_matches_derivative_free_optimizer():
    rng = np.random.default_rng(20)
    d = random_design(rng, n=100, p=2, K=0)
    fit = cox.fit(d, FrailtyConfig(frailty_enabled=False))
    opt = minimize(lambda th: -penalized_partial_loglik(th, None, None, d), np.zeros(2), method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 20000})
    assert np.max(np.abs(fit.theta_hat - opt.x)) < 1e-3


def test_frailty_fit_diagnostics_and_round_trip():
    d = random_design(np.random.default_rng(21), n=80, groups=8)
    f = cox.fit(d)
    assert f.converged and f.alpha_hat > 0
    assert set(f.diagnostics) >= {"inner_iters", "outer_iters", "converged", "final_ppl"}
    g = cox.FrailtyFit.from_dict(f.to_dict())
    assert g.to_dict() == f.to_dict()
    assert f.baseline(0.0) == 0.0


def test_fixed_alpha_matches_inner_solve():
    d = random_design(np.random.default_rng(22), n=40)
    f = cox.fit(d, FrailtyConfig(fixed_alpha=0.3))
    r = inner_newton(d, 0.3, (np.zeros(3), np.zeros(40)), FrailtyConfig())
    np.testing.assert_allclose(f.theta_hat, r.theta, atol=1e-12)
    assert f.alpha_hat == 0.3


# ---------------------------------------------------------------------------
# prediction
# ---------------------------------------------------------------------------


def test_predict_zero_covariates():
    d = random_design(np.random.default_rng(23), n=30)
    f = cox.fit(d)
    np.testing.assert_array_equal(predict_risk(f, np.zeros((4, 2)), np.zeros((4, 1))), 0.0)


def test_predict_in_sample_consistency():
    d = random_design(np.random.default_rng(24), n=30, groups=5)
    f = cox.fit(d)
    eta = predict_risk(f, d.Z, d.scores, include_frailty=True, group_new=d.group)
    np.testing.assert_array_equal(eta, d.eta(f.theta_hat, f.w_hat))


def test_predict_dimension_mismatch():
    f = cox.fit(random_design(np.random.default_rng(25), n=30))
    with pytest.raises(ValueError):
        predict_risk(f, np.zeros((3, 3)), np.zeros((3, 1)))
    with pytest.raises(ValueError):
        predict_risk(f, np.zeros((3, 2)), None)


def test_out_of_sample_concordance():
    from funcfrail.simulation import run_replication
    cfg = SimConfig(n=500, tau=0.01, phi=0.01, fit_no_frailty=False, seed=78)
    ci = [run_replication(cfg, None, r).ci_out for r in range(10)]
    assert abs(np.mean(ci) - 0.836) <= 0.03


def test_scale_invariance_of_concordance():
    rng = np.random.default_rng(26)
    d = random_design(rng, n=60, p=2, K=1)
    d10 = CoxDesign.build(d.time, d.status, 10 * d.Z, 10 * d.scores)
    f, f10 = cox.fit(d), cox.fit(d10)
    np.testing.assert_allclose(f10.theta_hat * 10, f.theta_hat, atol=1e-6)
    c = concordance(d.time, d.status, d.eta(f.theta_hat))
    c10 = concordance(d.time, d.status, d10.eta(f10.theta_hat))
    assert c == c10


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 100_000), shift=st.floats(-50, 50))
def test_location_invariance_property(seed, shift):
    rng = np.random.default_rng(seed)
    d = random_design(rng, n=15, p=1, K=1, ties=bool(seed % 2))
    theta = rng.standard_normal(2)
    t = cox._eta_terms(d, d.eta(theta))
    t2 = cox._eta_terms(d, d.eta(theta) + shift)
    assert abs(t.loglik - t2.loglik) < 1e-10 * max(1, abs(t.loglik))
    np.testing.assert_allclose(d.D.T @ t2.grad, d.D.T @ t.grad, atol=1e-8)
