"""Full coupled liquid/illiquid HJB system solved by Picard iteration.

Given the liquid constant ``B`` the illiquid shape is the profile of
:class:`~liquidity_merton.illiquid.IlliquidProfile` built on ``B``; given
the illiquid shape, the liquid equation is solved for a new ``B`` and the
optimal fraction. The map ``B -> B_new`` is iterated to its fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence
from .hara import (compensating_loss, equivalent_wealth_loss, liquid_equation,
                   solve_liquid_b)
from .illiquid import IlliquidProfile
from .log_utility import loss_from_value
from .model import ModelParams, jump_map, jump_map_derivative, log_constant, merton, validate_params
from .numerics import fixed_point, maximize_on_interval


def log_liquid_objective(p: ModelParams, profile):
    """``pi -> q(pi)/rho + lambda01 (h(g(pi)) + log(1 - pi L)/rho)`` for log utility."""

    def obj(pi):
        pi = np.asarray(pi, dtype=float)
        q = ((p.mu - p.r) * pi - 0.5 * p.sigma**2 * pi**2) / p.rho
        if p.lambda01 == 0:
            return q
        with np.errstate(divide="ignore", invalid="ignore"):
            val = q + p.lambda01 * (profile.value(jump_map(pi, p.L)) + np.log1p(-pi * p.L) / p.rho)
        return np.where(np.isnan(val), -np.inf, val)

    def slope(pi):
        d = ((p.mu - p.r) - p.sigma**2 * pi) / p.rho
        if p.lambda01 > 0:
            gp = jump_map(pi, p.L)
            d += p.lambda01 * (profile.value_prime(gp) * jump_map_derivative(pi, p.L)
                               - p.L / (p.rho * (1.0 - pi * p.L)))
        return float(d)

    return obj, slope


def log_best_fraction(p: ModelParams, profile) -> tuple[float, float]:
    obj, slope = log_liquid_objective(p, profile)
    upper = 1.0 if p.lambda01 == 0 else 1.0 - 1e-9
    extra = 1.0 - np.array([1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    return maximize_on_interval(obj, 0.0, upper, extra_points=extra, derivative=slope)


def log_liquid_update(p: ModelParams, profile) -> tuple[float, float]:
    """Liquid constant implied by a fixed illiquid shape: ``(rho + lambda01) b = c0 + sup{...}``."""
    pi_star, sup = log_best_fraction(p, profile)
    return (log_constant(p) + sup) / (p.rho + p.lambda01), pi_star


@dataclass
class CoupledSolution:
    """Fixed point of the coupled system.

    ``v0_coeff`` is ``b`` (log: ``V0 = log(x)/rho + b``; power:
    ``V0 = b x^gamma / gamma``); ``profile`` gives the illiquid shape and
    consumption rule.
    """

    params: ModelParams
    v0_coeff: float
    profile: IlliquidProfile
    pi_star: float
    iterations: int
    residual: float
    merton_coeff: float
    coupled: bool = True
    trace: list = field(default_factory=list)

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def b(self) -> float:
        return self.v0_coeff

    @property
    def liquid_coeff(self) -> float:
        return self.v0_coeff

    def illiquid_value(self, pi):
        return self.profile.value(pi)

    def v1_profile(self, n: int = 401):
        """``(pi_grid, values)`` of the illiquid shape on a uniform grid in ``[0, 1)``."""
        pi = np.linspace(0.0, 1.0, n)[:-1]
        return pi, self.profile.value(pi)

    @property
    def c0_rate(self) -> float:
        if self.gamma == 0:
            return self.params.rho
        return self.v0_coeff ** (1.0 / (self.gamma - 1.0))

    def c1_rate(self, pi):
        return self.profile.c1_rate(pi)

    @property
    def theta(self) -> float:
        """Equivalent-wealth efficiency loss against the unconstrained Merton value."""
        if self.gamma == 0:
            return loss_from_value(self.v0_coeff, self.merton_coeff, self.params.rho)
        return equivalent_wealth_loss(self.v0_coeff, self.merton_coeff, self.gamma)

    @property
    def theta_comp(self) -> float:
        """Compensating-wealth loss; for log utility ``exp(rho (h_hat - b)) - 1``."""
        if self.gamma == 0:
            return math.exp(self.params.rho * (self.merton_coeff - self.v0_coeff)) - 1.0
        return compensating_loss(self.v0_coeff, self.merton_coeff, self.gamma)


def solve_coupled(p: ModelParams, tol: float = 1e-10, damping: float = 0.5,
                  max_iter: int = 500, coupled: bool = True,
                  residual_check: bool = True) -> CoupledSolution:
    """Solve the coupled (or, with ``coupled=False``, uncoupled) HJB system.

    Each Picard step rebuilds the illiquid profile on the current liquid
    constant and re-solves the liquid equation; Aitken extrapolation
    accelerates the damped iteration. The uncoupled system freezes the
    illiquid profile at the Merton constant.

    Raises
    ------
    InfiniteValue
        For ``gamma > 0`` with a nonpositive discount margin.
    NoConvergence
        When the iteration does not settle within ``max_iter`` map
        evaluations; the exception carries the iteration trace.
    """
    validate_params(p)
    m = merton(p).require_finite()
    base = m.value_coeff
    g = p.gamma

    if g == 0:
        shape = IlliquidProfile(p, 0.0)

        def profile_for(B):
            return shape.with_constant(B)

        def step(B):
            return log_liquid_update(p, profile_for(B))[0]
    else:
        def profile_for(B):
            return IlliquidProfile(p, B)

        def step(B):
            return solve_liquid_b(p, profile_for(B), B)[0]

    if coupled:
        res = fixed_point(step, base, tol=tol, damping=damping, max_iter=max_iter)
        B, iters, trace = res.value, res.iterations, res.trace
    else:
        B, iters, trace = base, 0, []
    prof = profile_for(B)
    if g == 0:
        b, pi_star = log_liquid_update(p, prof)
    else:
        b, pi_star = solve_liquid_b(p, prof, B)
    if coupled and abs(b - B) > max(10 * tol, 1e-9 * abs(B)):
        raise NoConvergence(f"final liquid update moved b by {abs(b - B)}", trace)
    if not coupled:
        iters = 1
    sol = CoupledSolution(p, b, prof, pi_star, iters, float("nan"), base, coupled, trace)
    if residual_check:
        rep = hjb_residual(sol, p)
        sol.residual = rep.max
    return sol


@dataclass(frozen=True)
class ResidualReport:
    """Absolute HJB residuals; power-utility residuals are relative to ``f``."""

    illiquid_max: float
    illiquid_mean: float
    liquid: float

    @property
    def max(self) -> float:
        return max(self.illiquid_max, self.liquid)


def _fd_derivative(fun, pi: np.ndarray) -> np.ndarray:
    """Five-point central difference with a step scaled to the distance from 0 and 1."""
    h = 1e-3 * np.minimum(pi, 1.0 - pi)
    return (-fun(pi + 2 * h) + 8 * fun(pi + h) - 8 * fun(pi - h) + fun(pi - 2 * h)) / (12 * h)


def hjb_residual(sol, p: ModelParams, grid=None) -> ResidualReport:
    """Residuals of both HJB equations for a candidate solution.

    ``sol`` needs ``liquid_coeff``, ``illiquid_value(pi)`` and ``gamma``.
    The illiquid equation is evaluated with finite-difference derivatives of
    the value shape and the consumption that maximises the Hamiltonian; the
    liquid equation with an independent maximisation over ``pi``. Points with
    ``pi > 1 - 1e-4`` are excluded.
    """
    b = sol.liquid_coeff
    g = p.gamma
    if grid is None:
        grid = np.linspace(0.0, 1.0, 1001)
    pi = np.asarray(grid, dtype=float)
    pi = pi[(pi > 1e-6) & (pi <= 1.0 - 1e-4)]
    V = sol.illiquid_value
    v = np.asarray(V(pi), dtype=float)
    dv = _fd_derivative(V, pi)
    d = p.alpha - p.r
    if g == 0:
        y = 1.0 / p.rho - pi * dv
        res = (-p.rho * v + (p.r + d * pi) / p.rho + pi * (1.0 - pi) * d * dv
               - np.log(y) - 1.0 + p.lambda10 * (b - v))
    else:
        w = v - pi * dv / g
        res = (-p.rho * v + g * (p.r + d * pi) * v + pi * (1.0 - pi) * d * dv
               + (1.0 - g) * w ** (g / (g - 1.0)) + p.lambda10 * (b - v)) / v
    res = np.abs(res)

    class _Shape:
        def value(self, x):
            return V(x)

        def value_prime(self, x):
            return _fd_derivative(V, np.asarray(x, dtype=float))

        def xi(self, x, L):
            x = np.asarray(x, dtype=float)
            return V(jump_map(x, L)) * (1.0 - x * L) ** g

        def xi_prime(self, x, L):
            return np.nan

    shape = _Shape()
    if g == 0:
        obj, _ = log_liquid_objective(p, shape)
        upper = 1.0 if p.lambda01 == 0 else 1.0 - 1e-9
        _, sup = maximize_on_interval(obj, 0.0, upper, n_grid=2001)
        liquid = abs(-(p.rho + p.lambda01) * b + log_constant(p) + sup)
    else:
        liquid = abs(liquid_equation(p, shape, b) / b)
    return ResidualReport(float(res.max()), float(res.mean()), float(liquid))
