import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liquidity_merton.coupled import solve_coupled
from liquidity_merton.errors import UnsupportedModel, WrongRegime
from liquidity_merton.hara import (abel_roots, asymptotic_hara, boundary_f0, closed_form_hyperbolic,
                                   compensating_loss, equivalent_wealth_loss, implicit_abel,
                                   implicit_sqrt, large_sharpe_hyperbolic, phi_rhs,
                                   solve_hyperbolic, solve_liquid_hara, solve_phi_generic,
                                   table_loss)
from liquidity_merton.model import ModelParams, hara_delta, merton_hara


def _H(p, x, B):
    g = p.gamma
    K = p.rho - g * p.r + p.lambda10
    return -K * x + (1 - g) * x ** (g / (g - 1)) + p.lambda10 * B


def test_boundary_root_residual(hyperbolic):
    f0 = boundary_f0(hyperbolic)
    f_hat = merton_hara(hyperbolic).value_coeff
    assert abs(_H(hyperbolic, f0, f_hat)) < 1e-12 * f_hat


@pytest.mark.parametrize("g, mu", [(-1.0, 0.1), (0.5, 0.0625), (-0.5, 0.0875)])
def test_boundary_tends_to_merton_for_fast_recovery(g, mu):
    p = ModelParams(gamma=g, mu=mu)
    f_hat = merton_hara(p).value_coeff
    gaps = [abs(boundary_f0(p.replace(lambda10=l10)) / f_hat - 1) for l10 in (2.0, 200.0, 2e4)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-5


def test_boundary_side_of_merton():
    # all-cash investor is worse off: larger multiplier for gamma < 0, smaller for gamma > 0
    for g, mu in ((-1.0, 0.1), (-0.5, 0.0875)):
        p = ModelParams(gamma=g, mu=mu, lambda01=0.0)
        assert boundary_f0(p) > merton_hara(p).value_coeff
    p = ModelParams(gamma=0.5, mu=0.0625, lambda01=0.0)
    assert boundary_f0(p) < merton_hara(p).value_coeff


@pytest.mark.parametrize("g", [-1.0, -0.5, 0.5])
def test_boundary_equals_merton_without_excess_return(g):
    # with mu = r = alpha the frozen stock is as good as cash
    p = ModelParams(gamma=g, mu=0.05, lambda01=0.0)
    f_hat = merton_hara(p).value_coeff
    assert _H(p, f_hat, f_hat) == pytest.approx(0.0, abs=1e-12 * f_hat)
    assert boundary_f0(p) == pytest.approx(f_hat, rel=1e-12)


def test_sqrt_profile_endpoints(square_root):
    prof = solve_phi_generic(square_root)
    # phi grows like sqrt(z) off the origin
    assert prof.phi(1e-12) == pytest.approx(implicit_sqrt(square_root, 1e-12), rel=1e-6)
    assert prof.phi(1e-12) < 2e-6
    assert prof.phi(80.0) == pytest.approx(prof.asymptote, rel=1e-12)
    assert prof.asymptote == pytest.approx((1 - 0.5) * prof.f0 ** (0.5 / (0.5 - 1)))


def test_generic_matches_hyperbolic_closed_form(hyperbolic):
    prof = solve_phi_generic(hyperbolic)
    F = closed_form_hyperbolic(hyperbolic, merton_hara(hyperbolic).value_coeff)
    pi = np.linspace(0, 0.999, 400)
    assert np.max(np.abs(prof.value(pi) - F.F(pi)) / F.F(pi)) < 1e-6


def test_generic_matches_abel(abel):
    prof = solve_phi_generic(abel)
    for z in (1e-3, 0.1, 1.0, 5.0):
        assert prof.phi(z) == pytest.approx(implicit_abel(abel, z), rel=1e-6)


def test_hyperbolic_closed_form_at_zero(hyperbolic):
    F = closed_form_hyperbolic(hyperbolic, merton_hara(hyperbolic).value_coeff)
    beta = hyperbolic.rho + hyperbolic.r + hyperbolic.lambda10
    assert F.F(0.0) == pytest.approx((1 + F.eta) ** 2 / beta**2)
    assert F.c1_rate(0.0) == pytest.approx(beta / (1 + F.eta))
    assert F.c1_rate_printed(0.0) == pytest.approx(beta / (1 + F.eta))


def test_hyperbolic_pole(hyperbolic):
    F = closed_form_hyperbolic(hyperbolic, merton_hara(hyperbolic).value_coeff)
    vals = F.F(1 - np.array([1e-2, 1e-4, 1e-6]))
    assert np.all(np.diff(vals) > 0) and vals[-1] > 1e5


def test_hyperbolic_consumption_matches_first_order_condition(hyperbolic):
    F = closed_form_hyperbolic(hyperbolic, merton_hara(hyperbolic).value_coeff)
    pi = np.linspace(0.01, 0.99, 50)
    h = 1e-6
    dF = (F.F(pi + h) - F.F(pi - h)) / (2 * h)
    assert np.allclose(F.c1_rate(pi), (F.F(pi) + pi * dF) ** -0.5, rtol=1e-7)


def test_solve_hyperbolic_base(hyperbolic):
    sol = solve_hyperbolic(hyperbolic)
    assert sol.pi_star == pytest.approx(0.857, abs=5e-4)
    assert 100 * table_loss(sol.b, sol.f_hat, -1.0) == pytest.approx(1.92, abs=0.005)


def test_solve_hyperbolic_jump_loss(hyperbolic):
    assert solve_hyperbolic(hyperbolic.replace(L=0.1)).pi_star == pytest.approx(0.691, abs=5e-4)


def test_solve_hyperbolic_no_shocks(hyperbolic):
    p = hyperbolic.replace(lambda01=0.0)
    sol = solve_hyperbolic(p)
    m = merton_hara(p)
    assert sol.b == pytest.approx(m.value_coeff, rel=1e-12)
    assert sol.pi_star == pytest.approx(m.pi_hat, abs=1e-8)


def test_solve_hyperbolic_no_shocks_constrained(hyperbolic):
    # pi_hat = 1.8 is out of reach: the value is Merton's with the fraction held at 1
    p = hyperbolic.replace(lambda01=0.0, mu=0.15)
    sol = solve_hyperbolic(p)
    drift = 2 * 2.0 * (p.mu - p.r - 0.5 * 2.0 * p.sigma**2)
    assert merton_hara(p).pi_hat > 1
    assert sol.b == pytest.approx((2.0 / hara_delta(p, drift)) ** 2, rel=1e-10)
    assert sol.pi_star == pytest.approx(1.0, abs=1e-8)


def test_hyperbolic_requires_gamma(square_root):
    with pytest.raises(UnsupportedModel):
        solve_hyperbolic(square_root)


def test_implicit_sqrt_values(square_root):
    prof = solve_phi_generic(square_root)
    assert implicit_sqrt(square_root, 0.0) == 0.0
    assert implicit_sqrt(square_root, 40.0) == pytest.approx(prof.asymptote, rel=1e-10)
    for z in (0.01, 0.1, 1.0):
        assert implicit_sqrt(square_root, z) == pytest.approx(prof.phi(z), rel=1e-8)


def test_implicit_abel_limits(abel):
    prof = solve_phi_generic(abel)
    assert implicit_abel(abel, 1e-8) > 1e3
    assert implicit_abel(abel, 40.0) == pytest.approx(prof.asymptote, rel=1e-10)
    roots = abel_roots(abel)
    assert roots.discriminant < 0


def test_implicit_abel_wrong_gamma(square_root):
    with pytest.raises((WrongRegime, UnsupportedModel)):
        implicit_abel(square_root, 1.0)


def test_liquid_sqrt_base_row(square_root):
    sol = solve_coupled(square_root)
    assert sol.pi_star == pytest.approx(0.895, abs=0.002)
    assert 100 * table_loss(sol.b, sol.merton_coeff, 0.5) == pytest.approx(0.589, abs=0.03)


def test_liquid_sqrt_jump_row(square_root):
    assert solve_coupled(square_root.replace(L=0.1)).pi_star == pytest.approx(0.888, abs=0.002)


@pytest.mark.parametrize("g, mu", [(-1.0, 0.1), (0.5, 0.0625)])
def test_liquid_no_shocks(g, mu):
    p = ModelParams(gamma=g, mu=mu, lambda01=0.0)
    assert solve_liquid_hara(p).b == pytest.approx(merton_hara(p).value_coeff, rel=1e-12)


def test_asymptotic_hyperbolic_base(hyperbolic):
    a = asymptotic_hara(hyperbolic)
    assert a.pi_approx(0.1) == pytest.approx(0.683, abs=5e-4)
    assert 100 * table_loss(a.b_approx(0.1), a.f_hat, -1.0) == pytest.approx(2.36, abs=0.01)


def test_asymptotic_sqrt_base(square_root):
    a = asymptotic_hara(square_root)
    assert 100 * table_loss(a.b_approx(0.1), a.f_hat, 0.5) == pytest.approx(0.623, abs=0.03)


def test_asymptotic_flat_profile(hyperbolic):
    # a flat illiquid profile (xi(pi_hat) -> f_hat) gives no first-order correction
    b1 = [abs(asymptotic_hara(hyperbolic.replace(lambda10=l10)).b1) for l10 in (2.0, 2e3, 2e6)]
    assert b1[0] > b1[1] > b1[2]
    assert b1[2] < 1e-6 * b1[0]


def test_large_sharpe_hyperbolic_limit(hyperbolic):
    p = hyperbolic.replace(mu=0.05 + 3 / 36)
    a = large_sharpe_hyperbolic(p)
    assert a.pi_approx(1e-12) == pytest.approx(1.0, abs=1e-5)
    r = (1 - a.pi_approx(2e-4)) / (1 - a.pi_approx(1e-4))
    assert r == pytest.approx(math.sqrt(2))
    exact = [1 - solve_coupled(p.replace(lambda01=lam), residual_check=False).pi_star
             for lam in (1e-4, 2e-4)]
    assert exact[1] / exact[0] == pytest.approx(math.sqrt(2), rel=0.02)


def test_large_sharpe_hyperbolic_coefficient(hyperbolic):
    p = hyperbolic.replace(mu=0.05 + 3 / 36)
    a = large_sharpe_hyperbolic(p)
    lam = 1e-5
    exact = (1 - solve_coupled(p.replace(lambda01=lam), residual_check=False).pi_star) / math.sqrt(lam)
    assert exact == pytest.approx(a.pi1, rel=5e-3)
    # the unconstrained-value form misses by the factor sqrt(b0 / f_hat)
    assert a.pi1_printed / a.pi1 == pytest.approx(math.sqrt(a.f_hat / merton_hara(p).value_coeff))


def test_large_sharpe_hyperbolic_regime(hyperbolic):
    with pytest.raises(WrongRegime):
        large_sharpe_hyperbolic(hyperbolic)


@pytest.mark.parametrize("g, mu", [(-1.0, 0.1), (-0.5, 0.0875), (0.5, 0.0625), (-3.0, 0.15),
                                   (0.3, 0.07)])
def test_profile_ode_residual_and_monotonicity(g, mu):
    p = ModelParams(gamma=g, mu=mu)
    prof = solve_phi_generic(p)
    z = np.geomspace(1e-4, 15, 200)
    h = 1e-6 * z
    d = (prof.phi(z + h) - prof.phi(z - h)) / (2 * h)
    rhs = phi_rhs(p, merton_hara(p).value_coeff)(prof.phi(z))
    vals = prof.phi(z)
    assert np.max(np.abs(d - rhs) / np.maximum(np.abs(rhs), np.abs(vals))) < 1e-6
    assert np.all(np.diff(vals) * np.sign(g) >= -1e-9 * np.abs(vals[1:]))


@pytest.mark.parametrize("g, mu", [(-1.0, 0.1), (-0.5, 0.0875)])
def test_crunch_growth_rate(g, mu):
    p = ModelParams(gamma=g, mu=mu)
    prof = solve_phi_generic(p)
    K = p.rho - g * p.r + p.lambda10
    for eps in (1e-3, 1e-4):
        assert prof.phi(eps) * eps ** (-g) == pytest.approx((1 - g) ** (1 - g) * K**g, rel=0.05)


def test_finite_crunch_value(square_root):
    p = square_root
    prof = solve_phi_generic(p)
    f_hat = merton_hara(p).value_coeff
    target = p.lambda10 * f_hat / (p.rho - p.gamma * p.r + p.lambda10)
    assert prof.f_plus_1 == pytest.approx(target, rel=1e-12)
    assert prof.value(1 - 1e-9) == pytest.approx(target, rel=1e-4)


@pytest.mark.parametrize("g, mu", [(-1.0, 0.1), (-0.5, 0.0875), (0.5, 0.0625)])
def test_consumption_nonincreasing(g, mu):
    sol = solve_coupled(ModelParams(gamma=g, mu=mu), residual_check=False)
    pi = np.linspace(0, 0.9999, 2000)
    c = sol.c1_rate(pi)
    assert np.all(np.diff(c) <= 1e-12)
    assert np.all(c >= 0)


@given(st.floats(1.0001, 2.0), st.sampled_from([-1.0, -0.5, 0.5]))
def test_loss_forms(ratio, g):
    b = ratio if g < 0 else 1 / ratio
    eq, comp = equivalent_wealth_loss(b, 1.0, g), compensating_loss(b, 1.0, g)
    assert 0 < eq < 1 and comp > 0
    assert (1 - eq) * (1 + comp) == pytest.approx(1.0)
    assert table_loss(b, 1.0, g) == pytest.approx(comp if g < 0 else eq)
