import math

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from liquidity_merton.dks import (consumption_gap, consumption_gap_printed, dks_asymptotics_and_hom,
                                  dks_f0, dks_f0_hom, dks_fraction, dks_fraction_bracketed,
                                  dks_fraction_first_order, dks_ode_f0, dks_solve, dks_theta1,
                                  dks_theta_hom, merton_terminal_log)
from liquidity_merton.errors import DomainError, UnsupportedModel, WrongRegime
from liquidity_merton.homogenized import fast_switching_params
from liquidity_merton.log_utility import solve_log
from liquidity_merton.model import ModelParams

T = 2.0


@pytest.fixture
def dks():
    return ModelParams(L=0.1)


def test_no_haircut_is_merton(base):
    assert dks_solve(base, T).pi_star == pytest.approx(0.9, abs=1e-14)


def test_fraction_example(dks):
    pi = dks_fraction(dks)
    assert pi == pytest.approx(0.520, abs=5e-4)
    assert pi == pytest.approx(dks_fraction_bracketed(dks), abs=1e-9)


@given(lam=st.floats(0.0, 2.0), L=st.floats(0.0, 0.9), mu=st.floats(0.05, 0.2),
       sigma=st.floats(0.1, 0.5))
@example(lam=0.0, L=5e-324, mu=0.125, sigma=0.5)
def test_closed_root_matches_bracketed(lam, L, mu, sigma):
    p = ModelParams(mu=mu, sigma=sigma, lambda01=lam, L=L)
    assert dks_fraction(p) == pytest.approx(dks_fraction_bracketed(p), abs=1e-9)
    assert 0.0 <= dks_fraction(p) <= 1.0


def test_fraction_first_order(dks):
    gaps = []
    for lam in (1e-2, 1e-3):
        p = dks.replace(lambda01=lam)
        gaps.append(abs(dks_fraction(p) - dks_fraction_first_order(p)) / lam**2)
    assert max(gaps) < 2 * min(gaps)
    assert dks_fraction_first_order(dks) < 0.9


def test_closed_form_matches_ode(dks):
    t = np.linspace(0.0, T, 9)
    assert np.allclose(dks_f0(dks, T, t), dks_ode_f0(dks, T, t), atol=1e-10)


def test_terminal_values(dks):
    sol = dks_solve(dks, T)
    assert sol.f0(T) == 0.0
    assert sol.f1(T, 0.4) == pytest.approx(math.log(1 - 0.4 * 0.1))
    assert sol.theta(T) == 0.0
    with pytest.raises(DomainError):
        sol.f1(T + 1, 0.4)


def test_f1_solves_its_equation(dks):
    # f1_t + r + lambda10 (f0 - f1 + log(1 - pi L)) = 0
    sol = dks_solve(dks, T)
    pi, t, h = 0.6, 0.7, 1e-5
    df1 = (sol.f1(t + h, pi) - sol.f1(t - h, pi)) / (2 * h)
    rhs = -(dks.r + dks.lambda10 * (sol.f0(t) - sol.f1(t, pi) + math.log(1 - pi * dks.L)))
    assert df1 == pytest.approx(rhs, abs=1e-7)


def test_first_order_loss_positive_and_fading(dks):
    t = np.linspace(0.0, T, 21)
    th = dks_theta1(dks, T, t)
    assert th[-1] == 0.0
    assert np.all(th[:-1] > 0) and np.all(np.diff(th) < 0)


def test_first_order_loss_matches_exact(dks):
    ratios = []
    for lam in (1e-3, 1e-4):
        p = dks.replace(lambda01=lam)
        exact = dks_solve(p, T).theta(0.0)
        ratios.append(abs(exact - lam * dks_theta1(p, T, 0.0)) / lam**2)
    assert max(ratios) < 2 * min(ratios)


def test_first_order_loss_survives_fast_return(dks):
    big = dks.replace(lambda10=1e7)
    limit = -math.log(1 - (dks.mu - dks.r) * dks.L / dks.sigma**2) * T
    assert dks_theta1(big, T, 0.0) == pytest.approx(limit, rel=1e-5)
    assert limit > 0


def test_homogenized_loss_without_haircut(base):
    t = np.array([0.0, 1.0, T])
    lam = base.liquid_time_fraction
    expected = -np.expm1((T - t) * (lam - 1) * base.theta**2 / 2)
    assert np.allclose(dks_theta_hom(base, T, t), expected)


@pytest.mark.parametrize("L_bar", [0.0, 0.1])
def test_exact_value_approaches_homogenized(dks, L_bar):
    target = dks_f0_hom(dks, T, 0.0, L_bar)
    gaps = [abs(dks_f0(fast_switching_params(dks, eps, L_bar), T, 0.0) - target)
            for eps in (1e-2, 1e-3, 1e-4)]
    assert gaps[2] < gaps[1] < gaps[0] and gaps[2] < 1e-3
    pi = dks_fraction(fast_switching_params(dks, 1e-5, L_bar))
    assert pi == pytest.approx((dks.mu - dks.r - dks.lambda01 * L_bar) / dks.sigma**2, abs=1e-3)


def test_consumption_gap(dks):
    ratios = []
    for lam in (1e-3, 1e-4):
        p = dks.replace(lambda01=lam)
        measured = dks_fraction(p) - solve_log(p).pi_star
        assert measured > 0
        ratios.append(abs(measured - consumption_gap(p)) / lam**2)
    assert max(ratios) < 2 * min(ratios)
    p = dks.replace(lambda01=1e-3)
    assert consumption_gap_printed(p) < consumption_gap(p) / 10


def test_asymptotics_bundle(dks):
    a = dks_asymptotics_and_hom(dks, T)
    assert a.t[0] == 0.0 and a.t[-1] == T
    assert a.theta1[-1] == 0.0 and a.theta_hom[-1] == 0.0
    assert a.pi_hom == pytest.approx(0.9)
    assert a.f0_hom[0] == pytest.approx(merton_terminal_log(dks, T, 0.0) - T * dks.theta**2 / 2
                                        * (1 - dks.liquid_time_fraction))


def test_errors(dks):
    with pytest.raises(UnsupportedModel):
        dks_solve(dks.replace(alpha=0.04), T)
    with pytest.raises(DomainError):
        dks_solve(dks, 0.0)
    with pytest.raises(WrongRegime):
        dks_theta1(dks.replace(mu=0.1), T, 0.0)
