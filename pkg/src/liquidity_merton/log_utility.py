"""Infinite-horizon log utility: closed-form solution, efficiency loss and asymptotics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedModel, WrongRegime
from .model import ModelParams, jump_map, jump_map_derivative, log_constant, merton_log
from .numerics import find_root

PI_CLAMP = 1e-12


def _exponent(p: ModelParams) -> float:
    """``a = 1 + lambda10/rho``, the crunch exponent."""
    return 1.0 + p.lambda10 / p.rho


def _log1m_pow(pi, a: float):
    """``log(1 - pi**a)`` with ``-inf`` at (or within 1e-12 of) ``pi = 1``."""
    pi = np.asarray(pi, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(pi >= 1.0 - PI_CLAMP, -np.inf, np.log1p(-np.power(pi, a)))
    return out


def zeta(pi, p: ModelParams):
    """Objective whose maximiser over ``[0, 1)`` is the liquid stock fraction.

    ``((mu - r) pi - sigma^2 pi^2 / 2) / rho
    + lambda01 / (rho + lambda10) * log(1 - g(pi)^a)
    + lambda01 / rho * log(1 - pi L)``.
    """
    arr = np.asarray(pi, dtype=float)
    if np.any(arr < 0) or np.any(arr >= 1) or np.any(np.isnan(arr)):
        raise DomainError("zeta requires 0 <= pi < 1")
    a = _exponent(p)
    g = jump_map(arr, p.L)
    out = ((p.mu - p.r) * arr - 0.5 * p.sigma**2 * arr**2) / p.rho
    if p.lambda01 > 0:
        out = out + p.lambda01 / (p.rho + p.lambda10) * _log1m_pow(g, a)
        out = out + p.lambda01 / p.rho * np.log1p(-arr * p.L)
    return float(out) if np.ndim(out) == 0 else out


def zeta_slope(pi: float, p: ModelParams) -> float:
    """``rho * d(zeta)/d(pi)``; strictly decreasing, so zeta is strictly concave."""
    a = _exponent(p)
    g = jump_map(pi, p.L)
    out = (p.mu - p.r) - p.sigma**2 * pi
    if p.lambda01 > 0:
        ga = g ** (a - 1.0)
        crunch = ga * jump_map_derivative(pi, p.L) / (1.0 - ga * g)
        out -= p.lambda01 * (crunch + p.L / (1.0 - pi * p.L))
    return out


def maximize_zeta(p: ModelParams) -> float:
    """Argmax of :func:`zeta` on ``[0, 1)``.

    The first-order condition is strictly decreasing and tends to ``-inf``
    at ``pi -> 1`` when ``lambda01 > 0``, so the maximiser is the unique root
    of the slope when the slope is positive at zero, and zero otherwise.
    """
    if zeta_slope(0.0, p) <= 0:
        return 0.0
    if p.lambda01 == 0:
        return min(p.theta / p.sigma, 1.0)
    hi = 1.0 - 1e-3
    while zeta_slope(hi, p) > 0:
        hi = 1.0 - (1.0 - hi) * 1e-2
        if 1.0 - hi < 1e-15:
            return hi
    return find_root(lambda x: zeta_slope(x, p), 0.0, hi, xtol=1e-15)


@dataclass(frozen=True)
class LogSolution:
    """Solution of the infinite-horizon log problem with ``alpha = r``.

    ``V0(x) = log(x)/rho + b`` in the liquid regime and
    ``V1(pi, x) = log(x)/rho + h(pi)`` in the illiquid regime.
    """

    params: ModelParams
    b: float
    pi_star: float
    zeta_star: float
    h_hat: float
    pi_hat: float

    gamma = 0.0

    @property
    def exponent(self) -> float:
        return _exponent(self.params)

    @property
    def c0_rate(self) -> float:
        return self.params.rho

    def h(self, pi):
        """Illiquid value shape; ``-inf`` at ``pi = 1``."""
        p = self.params
        out = (log_constant(p) + p.lambda10 * self.b + _log1m_pow(pi, self.exponent)) / (p.rho + p.lambda10)
        return float(out) if np.ndim(out) == 0 else out

    def h_prime(self, pi):
        p = self.params
        a = self.exponent
        pi = np.asarray(pi, dtype=float)
        out = -a * pi ** (a - 1.0) / ((p.rho + p.lambda10) * (1.0 - pi**a))
        return float(out) if np.ndim(out) == 0 else out

    def c1_rate(self, pi):
        """Illiquid consumption per unit wealth, ``rho (1 - pi**a)``."""
        out = self.params.rho * (1.0 - np.power(np.asarray(pi, dtype=float), self.exponent))
        return float(out) if np.ndim(out) == 0 else out

    # Uniform interface used by the residual checker and the simulator.
    def illiquid_value(self, pi):
        return self.h(pi)

    @property
    def liquid_coeff(self) -> float:
        return self.b

    @property
    def theta(self) -> float:
        return efficiency_loss_log(self, self.params)


def solve_log(p: ModelParams) -> LogSolution:
    """Closed-form log solution; requires ``alpha == r``."""
    if p.alpha != p.r:
        raise UnsupportedModel("the log closed form needs alpha == r; use solve_coupled")
    m = merton_log(p)
    pi_star = maximize_zeta(p)
    z_star = float(zeta(pi_star, p))
    c0 = log_constant(p)
    b = c0 / p.rho + z_star * (p.rho + p.lambda10) / (p.rho * (p.rho + p.lambda01 + p.lambda10))
    return LogSolution(p, b, pi_star, z_star, m.value_coeff, m.pi_hat)


def loss_from_value(b: float, h_hat: float, rho: float) -> float:
    """Fraction of wealth a Merton investor gives up to match value ``b``."""
    return 1.0 - math.exp(rho * (b - h_hat))


def efficiency_loss_log(sol: LogSolution, p: ModelParams) -> float:
    return loss_from_value(sol.b, merton_log(p).value_coeff, p.rho)


@dataclass(frozen=True)
class LogAsymptotics:
    """First-order small-``lambda01`` coefficients.

    Interior regime: ``pi* ~ pi_hat - lambda01 * pi1`` and
    ``b ~ h_hat + lambda01 * b1``; ``theta1 = -rho * b1`` is the linear loss
    per unit ``lambda01``. Large-Sharpe regime: ``1 - pi* ~ lambda01 * pi1``;
    ``loglog`` is the coefficient of ``lambda01 log(lambda01)`` in the value.
    """

    pi_hat: float
    pi1: float
    b1: float
    theta1: float
    regime: str
    theta1_simplified: float = float("nan")
    loglog: float = float("nan")
    h_hat: float = float("nan")
    rho: float = float("nan")

    def pi_approx(self, lambda01: float) -> float:
        if self.regime == "large_sharpe":
            return 1.0 - lambda01 * self.pi1
        return self.pi_hat - lambda01 * self.pi1

    def loss_approx(self, lambda01: float) -> float:
        """Loss of the first-order value ``h_hat + lambda01 b1``."""
        return 1.0 - math.exp(self.rho * lambda01 * self.b1)


def asymptotic_log(p: ModelParams) -> LogAsymptotics:
    """Small-``lambda01`` expansion around the Merton solution (``pi_hat < 1``)."""
    m = merton_log(p)
    pi_hat = m.pi_hat
    if not pi_hat < 1:
        raise WrongRegime("interior expansion needs pi_hat < 1; see large_sharpe_log")
    a = _exponent(p)
    rho, lam10, L = p.rho, p.lambda10, p.L
    g = jump_map(pi_hat, L)
    ga = g ** (a - 1.0)
    pi1 = (L / (1.0 - pi_hat * L)
           + (1.0 - L) / (1.0 - pi_hat * L) ** 2 * ga / (1.0 - ga * g)) / p.sigma**2
    c0 = log_constant(p)
    h_hat = m.value_coeff
    b1 = ((c0 + lam10 * h_hat) / (rho + lam10) - h_hat
          + math.log1p(-pi_hat * L) / rho + math.log1p(-ga * g) / (rho + lam10)) / rho
    simplified = p.theta**2 / (2 * lam10) - math.log1p(-pi_hat * L) / rho
    return LogAsymptotics(pi_hat, pi1, b1, -rho * b1, "interior", simplified,
                          h_hat=h_hat, rho=rho)


def large_sharpe_log(p: ModelParams) -> LogAsymptotics:
    """Expansion when the Merton fraction is at least one and ``mu - r > sigma^2``."""
    pi_hat = merton_log(p).pi_hat
    if pi_hat < 1 or not (p.mu - p.r > p.sigma**2):
        raise WrongRegime("large-Sharpe expansion needs pi_hat >= 1 and mu - r > sigma^2")
    rho = p.rho
    pi1 = rho / ((p.mu - p.r - p.sigma**2) * (rho + p.lambda10))
    # Leading value: constrained Merton with pi = 1.
    b0 = log_constant(p) / rho + (p.mu - p.r - 0.5 * p.sigma**2) / rho**2
    return LogAsymptotics(1.0, pi1, float("nan"), float("nan"), "large_sharpe",
                          loglog=1.0 / (rho * (rho + p.lambda10)), h_hat=b0, rho=rho)


def illiquid_fraction_path(pi0: float, p: ModelParams, t_grid):
    """Stock fraction during a freeze under the optimal log consumption.

    Solves ``dPi = rho Pi (1 - Pi^a) dt`` exactly: with ``w = Pi^{-a}`` the
    equation is linear, giving ``Pi(t) = (1 + (pi0^{-a} - 1) e^{-a rho t})^{-1/a}``.
    Evaluated in log form to avoid overflow for small ``pi0``.
    """
    if not 0 <= pi0 <= 1:
        raise DomainError("illiquid_fraction_path requires 0 <= pi0 <= 1")
    t = np.asarray(t_grid, dtype=float)
    if pi0 == 0.0:
        return np.zeros_like(t)
    if pi0 == 1.0:
        return np.ones_like(t)
    a = _exponent(p)
    log_c = -a * math.log(pi0) + math.log1p(-(pi0**a))
    s = log_c - a * p.rho * t
    return np.exp(-np.logaddexp(0.0, s) / a)
