"""Terminal log-wealth model with a haircut on frozen stock holdings.

The investor maximises ``E[log(X_T (1 - 1{frozen at T} pi_T L))]`` without
consumption. For ``alpha = r`` the value functions are
``J0 = log x + f0(t)`` and ``J1 = log x + f1(t, pi)`` in closed form. The
illiquid value used here charges the haircut ``log(1 - pi L)`` on every
exit from a freeze as well as at the horizon, which makes the liquid stock
fraction constant in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NoConvergence, UnsupportedModel, WrongRegime
from .model import ModelParams, jump_map, validate_params
from .numerics import find_root


def dks_foc(pi: float, p: ModelParams) -> float:
    """``(mu - r) - sigma^2 pi - lambda01 L / (1 - L pi)``; decreasing in ``pi``."""
    return (p.mu - p.r) - p.sigma**2 * pi - p.lambda01 * p.L / (1.0 - p.L * pi)


def dks_fraction(p: ModelParams) -> float:
    """Liquid stock fraction: the smaller root of the first-order condition, clipped to [0, 1].

    ``(sigma^2 + (mu-r) L - sqrt((sigma^2 - (mu-r) L)^2 + 4 sigma^2 L^2 lambda01)) / (2 sigma^2 L)``
    for ``L > 0`` and ``(mu - r)/sigma^2`` for ``L = 0``.
    """
    s2, e, L = p.sigma**2, p.mu - p.r, p.L
    if L == 0:
        root = e / s2
    else:
        disc = (s2 - e * L) ** 2 + 4.0 * s2 * L**2 * p.lambda01
        B = s2 + e * L
        if B > 0:
            # rationalised smaller root; stable for small lambda01 and tiny L
            root = 2.0 * (e - p.lambda01 * L) / (B + math.sqrt(disc))
        else:
            root = (B - math.sqrt(disc)) / (2.0 * s2 * L)
    return min(max(root, 0.0), 1.0)


def dks_fraction_bracketed(p: ModelParams) -> float:
    """Same fraction from a bracketed Brent solve of :func:`dks_foc` on ``[0, 1]``."""
    f0, f1 = dks_foc(0.0, p), dks_foc(1.0, p)
    if f0 <= 0:
        return 0.0
    if f1 >= 0:
        return 1.0
    return find_root(lambda x: dks_foc(x, p), 0.0, 1.0, xtol=1e-15)


def _drift(p: ModelParams, pi: float) -> float:
    """``r + (mu-r) pi - sigma^2 pi^2 / 2 + (lambda01/lambda10)(r + lambda10 log(1 - pi L))``."""
    return (p.r + (p.mu - p.r) * pi - 0.5 * p.sigma**2 * pi**2
            + p.lambda01 / p.lambda10 * (p.r + p.lambda10 * math.log1p(-pi * p.L)))


def dks_f0(p: ModelParams, T: float, t, pi: float | None = None):
    """Closed-form liquid value offset ``f0(t)`` at the constant fraction ``pi``."""
    if pi is None:
        pi = dks_fraction(p)
    tau = T - np.asarray(t, dtype=float)
    l01, l10 = p.lambda01, p.lambda10
    lam = l01 + l10
    A = _drift(p, pi)
    e10, eall = np.exp(-l10 * tau), np.exp(-lam * tau)
    first = A * (-np.expm1(-lam * tau)) / lam - p.r / l10 * (e10 - eall)
    second = l01 * p.r / l10**2 * np.expm1(-l10 * tau) + A * tau
    out = first * l01 / lam + second * l10 / lam
    return float(out) if np.ndim(out) == 0 else out


def merton_terminal_log(p: ModelParams, T: float, t):
    """``(r + theta^2/2)(T - t)``, the Merton log-wealth offset."""
    out = (p.r + 0.5 * p.theta**2) * (T - np.asarray(t, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DksSolution:
    """Closed-form solution; ``theta(t) = 1 - exp(f0(t) - f0_Merton(t))``."""

    params: ModelParams
    T: float
    pi_star: float

    def f0(self, t):
        return dks_f0(self.params, self.T, t, self.pi_star)

    def f1(self, t: float, pi):
        """``log(1 - pi L) + int_0^{T-t} e^{-lambda10 (T-t-u)} (r + lambda10 f0(T-u)) du``."""
        p, T = self.params, self.T
        tau = T - t
        if tau < 0:
            raise DomainError("t must not exceed T")

        def integrand(u):
            return math.exp(-p.lambda10 * (tau - u)) * (p.r + p.lambda10 * self.f0(T - u))

        base = quad(integrand, 0.0, tau, limit=200)[0] if tau > 0 else 0.0
        return base + np.log1p(-np.asarray(pi, dtype=float) * p.L)

    def theta(self, t):
        return -np.expm1(self.f0(t) - merton_terminal_log(self.params, self.T, t))

    def theta1_t(self, t):
        return dks_theta1(self.params, self.T, t)

    def theta_hom_t(self, t, L_bar: float = 0.0):
        return dks_theta_hom(self.params, self.T, t, L_bar)


def dks_solve(p: ModelParams, T: float) -> DksSolution:
    """Liquid fraction and closed-form value offsets.

    Raises
    ------
    UnsupportedModel
        If ``alpha != r``.
    NoConvergence
        If the closed-form root disagrees with the bracketed solve.
    """
    validate_params(p)
    if p.alpha != p.r:
        raise UnsupportedModel("closed form needs alpha == r")
    if not T > 0:
        raise DomainError("T must be positive")
    pi = dks_fraction(p)
    check = dks_fraction_bracketed(p)
    if abs(pi - check) > 1e-9:
        raise NoConvergence(f"closed-form root {pi} disagrees with bracketed root {check}")
    return DksSolution(p, float(T), pi)


def _require_interior(p: ModelParams):
    pi_hat = (p.mu - p.r) / p.sigma**2
    if not 0 < pi_hat < 1:
        raise WrongRegime("expansion needs 0 < (mu - r)/sigma^2 < 1")
    return pi_hat


def dks_theta1(p: ModelParams, T: float, t):
    """First-order loss per unit ``lambda01``.

    ``theta^2 / (2 lambda10^2) (e^{-lambda10 tau} + lambda10 tau - 1)
    - log(1 - (mu - r) L / sigma^2) tau`` with ``tau = T - t``.
    """
    pi_hat = _require_interior(p)
    tau = T - np.asarray(t, dtype=float)
    l10 = p.lambda10
    out = (p.theta**2 / (2.0 * l10**2) * (np.expm1(-l10 * tau) + l10 * tau)
           - math.log1p(-pi_hat * p.L) * tau)
    return float(out) if np.ndim(out) == 0 else out


def dks_fraction_first_order(p: ModelParams) -> float:
    """``pi_hat - lambda01 L / (sigma^2 - (mu - r) L)``."""
    pi_hat = _require_interior(p)
    return pi_hat - p.lambda01 * p.L / (p.sigma**2 - (p.mu - p.r) * p.L)


def dks_theta_hom(p: ModelParams, T: float, t, L_bar: float = 0.0):
    """Fast-switching loss ``1 - exp((T-t)/2 (lambda_bar theta_tilde^2 - theta^2))``.

    ``theta_tilde = (mu - r - lambda01 L_bar) / sigma``.
    """
    tau = T - np.asarray(t, dtype=float)
    th_t = (p.mu - p.r - p.lambda01 * L_bar) / p.sigma
    out = -np.expm1(0.5 * tau * (p.liquid_time_fraction * th_t**2 - p.theta**2))
    return float(out) if np.ndim(out) == 0 else out


def dks_f0_hom(p: ModelParams, T: float, t, L_bar: float = 0.0):
    """Fast-switching limit ``(T-t) r + lambda_bar (T-t) (mu - r - lambda01 L_bar)^2 / (2 sigma^2)``."""
    tau = T - np.asarray(t, dtype=float)
    out = tau * p.r + p.liquid_time_fraction * tau * (p.mu - p.r - p.lambda01 * L_bar) ** 2 / (
        2.0 * p.sigma**2)
    return float(out) if np.ndim(out) == 0 else out


def consumption_gap(p: ModelParams) -> float:
    """First-order gap between the terminal-wealth and consumption fractions.

    ``lambda01 (1 - L) / (sigma^2 (1 - pi_hat L)^2) g^{lambda10/rho} / (1 - g^{1 + lambda10/rho})``
    with ``g = g(pi_hat)``.
    """
    pi_hat = _require_interior(p)
    g = jump_map(pi_hat, p.L)
    e = p.lambda10 / p.rho
    return p.lambda01 * (1 - p.L) / (p.sigma**2 * (1 - pi_hat * p.L) ** 2) * g**e / (1 - g ** (1 + e))


def consumption_gap_printed(p: ModelParams) -> float:
    """The alternative form without ``sigma^2`` and with ``1 - g^{lambda10/rho}`` below."""
    pi_hat = _require_interior(p)
    g = jump_map(pi_hat, p.L)
    e = p.lambda10 / p.rho
    return p.lambda01 * (1 - p.L) / (1 - pi_hat * p.L) ** 2 * g**e / (1 - g**e)


@dataclass(frozen=True)
class DksAsymptotics:
    t: np.ndarray
    theta1: np.ndarray
    pi_first_order: float
    pi_hom: float
    theta_hom: np.ndarray
    f0_hom: np.ndarray
    consumption_gap: float


def dks_asymptotics_and_hom(p: ModelParams, T: float, L_bar: float = 0.0,
                            t=None) -> DksAsymptotics:
    """Small-``lambda01`` loss, fast-switching limits and the consumption gap on a time grid."""
    validate_params(p)
    _require_interior(p)
    t = np.linspace(0.0, T, 101) if t is None else np.asarray(t, dtype=float)
    pi_hom = (p.mu - p.r - p.lambda01 * L_bar) / p.sigma**2
    return DksAsymptotics(t, dks_theta1(p, T, t), dks_fraction_first_order(p), pi_hom,
                          dks_theta_hom(p, T, t, L_bar), dks_f0_hom(p, T, t, L_bar),
                          consumption_gap(p))


def dks_ode_f0(p: ModelParams, T: float, t_eval, pi: float | None = None) -> np.ndarray:
    """Reference ``f0`` from the linear ODE system behind the closed form.

    In time-to-go, with ``G = f1 - log(1 - pi L)``:
    ``f0' = r + (mu-r) pi - sigma^2 pi^2/2 + lambda01 (log(1 - pi L) + G - f0)`` and
    ``G' = r + lambda10 (f0 - G)``, both zero at the horizon.
    """
    from scipy.integrate import solve_ivp

    if pi is None:
        pi = dks_fraction(p)
    q = p.r + (p.mu - p.r) * pi - 0.5 * p.sigma**2 * pi**2 + p.lambda01 * math.log1p(-pi * p.L)

    def rhs(_, y):
        f0, G = y
        return [q + p.lambda01 * (G - f0), p.r + p.lambda10 * (f0 - G)]

    tau = T - np.asarray(t_eval, dtype=float)
    order = np.argsort(tau)
    sol = solve_ivp(rhs, (0.0, float(tau.max())), [0.0, 0.0], t_eval=tau[order],
                    rtol=1e-12, atol=1e-14, method="DOP853")
    out = np.empty_like(tau)
    out[order] = sol.y[0]
    return out
