import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from liquidity_merton.coupled import hjb_residual
from liquidity_merton.errors import DomainError, UnsupportedModel, WrongRegime
from liquidity_merton.log_utility import (asymptotic_log, efficiency_loss_log,
                                          illiquid_fraction_path, large_sharpe_log, solve_log,
                                          zeta)
from liquidity_merton.model import ModelParams, merton_log

TABLE_PRESETS = [dict(), dict(lambda01=0.05), dict(lambda01=0.02), dict(lambda10=4.0),
                 dict(L=0.1), dict(lambda01=0.5, lambda10=10.0)]


def test_zeta_without_shocks_is_merton_objective(base):
    p = base.replace(lambda01=0.0)
    pi = np.linspace(0, 0.99, 50)
    assert np.allclose(zeta(pi, p), ((p.mu - p.r) * pi - pi**2 * p.sigma**2 / 2) / p.rho)
    assert solve_log(p).pi_star == pytest.approx(merton_log(p).pi_hat)


def test_zeta_zero_at_origin(base):
    assert zeta(0.0, base) == 0.0
    assert zeta(0.0, base.replace(L=0.2)) == 0.0


@pytest.mark.parametrize("pi", [-0.01, 1.0])
def test_zeta_domain(base, pi):
    with pytest.raises(DomainError):
        zeta(pi, base)


def test_zeta_argmax_by_dense_scan(base):
    grid = np.arange(0.0, 1.0, 1e-6)
    scan = grid[np.argmax(zeta(grid, base))]
    assert solve_log(base).pi_star == pytest.approx(scan, abs=2e-6)
    assert round(scan, 3) == 0.879


def test_solve_log_base(base):
    sol = solve_log(base)
    assert sol.pi_star == pytest.approx(0.879, abs=5e-4)
    assert sol.c0_rate == base.rho


def test_solve_log_jump_loss(base):
    assert solve_log(base.replace(L=0.1)).pi_star == pytest.approx(0.521, abs=1e-3)


def test_solve_log_no_shocks(base):
    p = base.replace(lambda01=0.0)
    sol, m = solve_log(p), merton_log(p)
    assert sol.pi_star == pytest.approx(m.pi_hat)
    assert sol.b == pytest.approx(m.value_coeff, abs=1e-12)
    assert sol.theta == pytest.approx(0.0, abs=1e-12)


def test_solve_log_requires_alpha_equal_r(base):
    with pytest.raises(UnsupportedModel):
        solve_log(base.replace(alpha=0.03))


@pytest.mark.parametrize("change, printed", [(dict(), 1.08), (dict(lambda01=0.5, lambda10=10.0), 1.06)])
def test_efficiency_loss_printed(base, change, printed):
    p = base.replace(**change)
    assert 100 * efficiency_loss_log(solve_log(p), p) == pytest.approx(printed, abs=0.005)


def test_asymptotic_log_base(base):
    a = asymptotic_log(base)
    assert a.pi_approx(0.1) == pytest.approx(0.846, abs=5e-4)
    assert 100 * a.loss_approx(0.1) == pytest.approx(1.15, abs=0.01)


def test_asymptotic_log_fast_recovery(base):
    assert asymptotic_log(base.replace(lambda10=4.0)).pi_approx(0.1) == pytest.approx(0.899, abs=5e-4)


def test_asymptotic_log_pi1_vanishes_for_fast_recovery(base):
    pi1 = [asymptotic_log(base.replace(lambda10=l10)).pi1 for l10 in (10.0, 100.0, 1000.0)]
    assert pi1[0] > pi1[1] > pi1[2] >= 0
    assert pi1[2] < 1e-6


def test_asymptotic_log_wrong_regime(base):
    with pytest.raises(WrongRegime):
        asymptotic_log(base.replace(mu=0.2))


def test_large_sharpe_log_limit(base):
    p = base.replace(mu=0.15)
    pis = [solve_log(p.replace(lambda01=lam)).pi_star for lam in (1e-2, 1e-3, 1e-4)]
    assert pis[0] < pis[1] < pis[2] < 1
    assert 1 - pis[2] < 1e-3
    with pytest.raises(WrongRegime):
        large_sharpe_log(base)


def test_large_sharpe_log_coefficient_vs_exact_argmax():
    s2 = 1 / 36
    p = ModelParams(mu=0.05 + 2 * s2, lambda10=0.05)
    a = large_sharpe_log(p)
    assert a.pi1 == pytest.approx(1 / (2 * s2))
    for lam in (1e-4, 1e-5):
        exact = (1 - solve_log(p.replace(lambda01=lam)).pi_star) / lam
        assert exact == pytest.approx(a.pi1, rel=5 * lam * 100 + 1e-3)


def test_large_sharpe_loglog_coefficient(base):
    p = base.replace(mu=0.15)
    assert large_sharpe_log(p).loglog == pytest.approx(1 / (p.rho * (p.rho + p.lambda10)))


@pytest.mark.parametrize("pi0", [0.0, 1.0])
def test_fraction_path_fixed_points(base, pi0):
    assert np.all(illiquid_fraction_path(pi0, base, np.linspace(0, 5, 11)) == pi0)


def test_fraction_path_against_integrator(base):
    a = 1 + base.lambda10 / base.rho
    ref = solve_ivp(lambda t, y: base.rho * y * (1 - y**a), (0, 1), [0.5], method="DOP853",
                    rtol=1e-13, atol=1e-15).y[0, -1]
    assert illiquid_fraction_path(0.5, base, [1.0])[0] == pytest.approx(ref, abs=1e-8)


@given(st.floats(0.0, 1.0))
def test_fraction_path_monotone(pi0):
    path = illiquid_fraction_path(pi0, ModelParams(), np.linspace(0, 20, 41))
    assert np.all(np.diff(path) >= -1e-15)
    assert np.all((path >= pi0 - 1e-15) & (path <= 1))


def test_illiquid_consumption_below_liquid(base):
    sol = solve_log(base)
    pi = np.linspace(0, 1, 1001)
    c1 = sol.c1_rate(pi)
    assert c1[0] == sol.c0_rate
    assert np.all(c1 <= sol.c0_rate)
    # pi^a is below double resolution for small pi, so strictness is checked where visible
    assert np.all(c1[pi >= 0.6] < sol.c0_rate)
    assert np.all(np.diff(c1) <= 0)


def test_value_shape_decreasing_to_minus_infinity(base):
    sol = solve_log(base)
    pi = np.linspace(0.6, 0.999, 500)
    assert np.all(np.diff(sol.h(pi)) < 0)
    assert np.all(np.diff(sol.h(np.linspace(0, 0.6, 100))) <= 0)
    assert sol.h(1.0) == -np.inf


def test_closed_form_hjb_residual(base):
    sol = solve_log(base)
    rep = hjb_residual(sol, base)
    assert rep.max < 1e-8


@pytest.mark.parametrize("change", TABLE_PRESETS)
def test_pi_star_below_merton(base, change):
    p = base.replace(**change)
    assert solve_log(p).pi_star < merton_log(p).pi_hat


def test_asymptotic_ratio_bounded(base):
    a = asymptotic_log(base)
    ratios = []
    for lam in (1e-2, 1e-3, 1e-4):
        pi = solve_log(base.replace(lambda01=lam)).pi_star
        ratios.append(abs(pi - a.pi_approx(lam)) / lam**2)
    assert max(ratios) / min(ratios) < 2


@pytest.mark.parametrize("change", TABLE_PRESETS)
def test_loss_below_first_order(base, change):
    p = base.replace(**change)
    assert solve_log(p).theta <= asymptotic_log(p).loss_approx(p.lambda01)


@given(st.floats(0.0, 0.5), st.floats(0.0, 0.3))
def test_loss_in_unit_interval(lam, L):
    p = ModelParams(lambda01=lam, L=L)
    th = solve_log(p).theta
    assert -1e-12 <= th < 1
    assert math.isfinite(th)
