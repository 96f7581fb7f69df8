"""Illiquid-regime value shapes built from the consumption-rate ODE.

During a freeze the state is the stock fraction ``pi``; we work in
``z = -log(pi)`` so that the cash crunch ``pi -> 1`` sits at ``z = 0`` and
the all-cash state ``pi = 0`` at ``z = inf``. Let ``kappa = c / x`` be the
optimal consumption rate. Solving the illiquid HJB equation for the value
shape in terms of ``(z, kappa)`` gives

* log utility: ``h = (alpha/rho - (1-pi)(alpha-r)/kappa + log(kappa) - 1 + lambda10 B) / (rho + lambda10)``
* power utility: ``f = ((1-gamma) kappa^gamma + lambda10 B - (1-pi)(alpha-r) gamma kappa^(gamma-1)) / (rho - gamma alpha + lambda10)``

where ``B`` is the liquid-regime value constant the investor returns to.
Differentiating these identities yields a first-order ODE for ``kappa``
alone, regular at ``z = 0`` with ``kappa(0) = 0``. For ``alpha = r`` it is
autonomous and solved by separable quadrature plus a high-order integrator;
for ``alpha < r`` it is integrated forward from the crunch, where the
regular solution leaves ``z = 0`` with a fixed slope and every nearby
trajectory is attracted to it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import DomainError, NoConvergence
from .model import ModelParams, jump_map, jump_map_derivative
from .profiles import Z_MAX, AutonomousProfile, graded_grid


def _kappa_rhs_autonomous(p: ModelParams, B: float):
    """``d kappa / dz`` for ``alpha = r``."""
    g = p.gamma
    if g == 0:
        a = p.rho + p.lambda10

        def rhs(k):
            return a * (1.0 - np.asarray(k) / p.rho)

        return rhs
    K = p.rho - g * p.r + p.lambda10
    A0 = p.lambda10 * B

    def rhs(k):
        k = np.maximum(np.asarray(k, dtype=float), 0.0)
        return (K - (1.0 - g) * k - A0 * k ** (1.0 - g)) / (1.0 - g)

    return rhs


def _kappa_rhs_general(p: ModelParams, B: float):
    """``d kappa / dz`` for any ``alpha <= r`` (non-autonomous)."""
    g = p.gamma
    d = p.alpha - p.r
    if g == 0:
        a = p.rho + p.lambda10

        def rhs(z, k):
            pi = math.exp(-z)
            return k * (a * (1.0 - k / p.rho) + pi * d) / (k + (1.0 - pi) * d)

        return rhs
    Ka = p.rho - g * p.alpha + p.lambda10
    lamB = p.lambda10 * B

    def rhs(z, k):
        pi = math.exp(-z)
        num = (Ka * k - (1.0 - g) * k * k - lamB * k ** (2.0 - g)
               + d * k * ((1.0 - pi) * g + pi))
        return num / ((1.0 - g) * (k + (1.0 - pi) * d))

    return rhs


def kappa_at_zero_fraction(p: ModelParams, B: float) -> float:
    """Consumption rate at ``pi = 0`` (all cash), the equilibrium of the rate ODE."""
    g = p.gamma
    if g == 0:
        return p.rho
    from .hara import boundary_f0

    return boundary_f0(p, B) ** (1.0 / (g - 1.0))


class IlliquidProfile:
    """Value shape and consumption rule in the illiquid regime.

    Parameters
    ----------
    p : ModelParams
    B : float
        Liquid value constant reached when the freeze ends (``f_hat`` for the
        uncoupled system, the current iterate for the coupled one, ``b`` for
        log utility).
    """

    def __init__(self, p: ModelParams, B: float, z_max: float = Z_MAX):
        self.params = p
        self.B = float(B)
        self.gamma = p.gamma
        self.autonomous = p.alpha == p.r
        self.kappa_inf = kappa_at_zero_fraction(p, B)
        if self.autonomous:
            self._build_autonomous(z_max)
        else:
            self._build_forward()
        self.grid = graded_grid(1e-6, z_max)
        self.values = self.phi(self.grid) if self.gamma != 0 else np.log(self.kappa(self.grid))

    def with_constant(self, B: float) -> "IlliquidProfile":
        """Copy with a new liquid constant; only valid for log utility, whose rate profile ignores ``B``."""
        if self.gamma != 0:
            raise DomainError("with_constant is only valid for log utility")
        twin = object.__new__(IlliquidProfile)
        twin.__dict__.update(self.__dict__)
        twin.B = float(B)
        return twin

    # -- construction -----------------------------------------------------
    def _build_autonomous(self, z_max: float):
        p = self.params
        rhs = _kappa_rhs_autonomous(p, self.B)
        k_inf = self.kappa_inf

        def distance(k):
            val, _ = quad(lambda s: 1.0 / rhs(s), 0.0, k, epsabs=1e-16, epsrel=1e-13, limit=200)
            return val

        slope0 = float(rhs(0.0))
        k_start = min(slope0 * 1e-8, 0.5 * k_inf)
        self._profile = AutonomousProfile(rhs, distance, k_inf, k_start, 0.0, z_max=z_max)

    def crunch_slope(self) -> float:
        """``lim kappa / z`` at ``z = 0`` on the regular solution."""
        p, g = self.params, self.gamma
        d = p.alpha - p.r
        if g == 0:
            return p.rho + p.lambda10
        return (p.rho - g * p.alpha + p.lambda10 + d) / (1.0 - g) - d

    def _build_forward(self, z_start: float = 1e-9, z_far: float = 60.0):
        # With kappa = c z, z dc/dz = G(c) - c and G' < 1 at the regular slope, so
        # deviations shrink like a negative power of z along the forward integration.
        p = self.params
        rhs = _kappa_rhs_general(p, self.B)
        slope = self.crunch_slope()
        if not slope + (p.alpha - p.r) > 0:
            raise NoConvergence("no regular consumption rate at the cash crunch")
        k_inf = self.kappa_inf
        eps = 1e-7 * k_inf
        nu = -(rhs(80.0, k_inf + eps) - rhs(80.0, k_inf - eps)) / (2 * eps)
        if not nu > 0:
            raise NoConvergence("all-cash equilibrium of the rate ODE is not attracting")
        sol = solve_ivp(lambda z, y: [rhs(z, y[0])], (z_start, z_far), [slope * z_start],
                        method="DOP853", rtol=1e-12, atol=1e-15, dense_output=True)
        if not sol.success:
            raise NoConvergence(f"rate integration failed: {sol.message}")
        self._slope = slope
        self._z_start = z_start
        self._fwd = sol.sol
        self._z_far = z_far

    # -- evaluation ---------------------------------------------------------
    def kappa(self, z):
        """Consumption per unit wealth at ``z = -log(pi)``."""
        z_arr = np.asarray(z, dtype=float)
        if self.autonomous:
            out = np.asarray(self._profile(z_arr), dtype=float)
        else:
            flat = z_arr.ravel()
            res = self._fwd(np.clip(flat, self._z_start, self._z_far))[0]
            near = flat < self._z_start
            res[near] = self._slope * flat[near]
            out = res.reshape(z_arr.shape)
        out = np.where(z_arr <= 0, 0.0, out)
        return float(out) if z_arr.ndim == 0 else out

    def c1_rate(self, pi):
        pi = np.asarray(pi, dtype=float)
        if np.any(pi < 0) or np.any(pi > 1):
            raise DomainError("c1_rate requires 0 <= pi <= 1")
        with np.errstate(divide="ignore"):
            z = np.where(pi > 0, -np.log(np.where(pi > 0, pi, 1.0)), np.inf)
        out = np.where(np.isinf(z), self.kappa_inf, self.kappa(np.where(np.isinf(z), 1.0, z)))
        return float(out) if out.ndim == 0 else out

    def value_from_kappa(self, pi, k):
        """Value shape (``h`` or ``f``) at fraction ``pi`` from the rate ``k`` via the HJB identity."""
        p, g = self.params, self.gamma
        pi = np.asarray(pi, dtype=float)
        d = p.alpha - p.r
        k = np.asarray(k, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if g == 0:
                cross = 0.0 if d == 0 else (1.0 - pi) * d / k
                return (p.alpha / p.rho - cross + np.log(k) - 1.0 + p.lambda10 * self.B) / (p.rho + p.lambda10)
            cross = 0.0 if d == 0 else (1.0 - pi) * d * g * k ** (g - 1.0)
            return ((1.0 - g) * k**g + p.lambda10 * self.B - cross) / (p.rho - g * p.alpha + p.lambda10)

    def value(self, pi):
        """``h(pi)`` (log) or ``f(pi)`` (power); infinite at the crunch unless ``gamma > 0``."""
        pi = np.asarray(pi, dtype=float)
        if np.any(pi < 0) or np.any(pi > 1):
            raise DomainError("value requires 0 <= pi <= 1")
        inner = (pi > 0) & (pi < 1)
        safe = np.where(inner, pi, 0.5)
        out = self.value_from_kappa(safe, self.kappa(-np.log(safe)))
        out = np.where(pi <= 0, self.value_at_zero, out)
        out = np.where(pi >= 1, self.value_at_one, out)
        return float(out) if out.ndim == 0 else out

    def value_z(self, z):
        """Derivative of the value shape in ``z``: ``1/kappa - 1/rho`` or ``gamma (kappa^(gamma-1) - f)``."""
        z = np.asarray(z, dtype=float)
        k = self.kappa(z)
        if self.gamma == 0:
            return 1.0 / k - 1.0 / self.params.rho
        return self.gamma * (k ** (self.gamma - 1.0) - self.value_from_kappa(np.exp(-z), k))

    def value_prime(self, pi):
        """Derivative in ``pi``."""
        pi = np.asarray(pi, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -self.value_z(-np.log(pi)) / pi

    @property
    def value_at_zero(self) -> float:
        return float(self.value_from_kappa(0.0, self.kappa_inf))

    @property
    def value_at_one(self) -> float:
        p, g = self.params, self.gamma
        if g > 0:
            return p.lambda10 * self.B / (p.rho - g * p.alpha + p.lambda10)
        return -math.inf if g == 0 else math.inf

    # -- power-utility views -------------------------------------------------
    def phi(self, z):
        """``(1 - gamma) kappa^gamma``; equals ``K f - lambda10 B`` when ``alpha = r``."""
        if self.gamma == 0:
            raise DomainError("phi is defined for power utility only")
        k = np.asarray(self.kappa(z), dtype=float)
        with np.errstate(divide="ignore"):
            out = (1.0 - self.gamma) * k**self.gamma
        return float(out) if out.ndim == 0 else out

    @property
    def f0(self) -> float:
        return self.value_at_zero

    @property
    def asymptote(self) -> float:
        return (1.0 - self.gamma) * self.kappa_inf**self.gamma

    @property
    def f_plus_1(self) -> float:
        return self.value_at_one

    # -- liquid-regime coupling ------------------------------------------------
    def xi(self, pi, L: float):
        """Post-shock continuation ``f(g(pi)) (1 - pi L)^gamma`` (power utility)."""
        pi = np.asarray(pi, dtype=float)
        out = self.value(jump_map(pi, L)) * (1.0 - pi * L) ** self.gamma
        return float(out) if out.ndim == 0 else out

    def xi_prime(self, pi: float, L: float) -> float:
        g = self.gamma
        gp = jump_map(pi, L)
        return float(self.value_prime(gp) * jump_map_derivative(pi, L) * (1.0 - pi * L) ** g
                     - g * L * self.value(gp) * (1.0 - pi * L) ** (g - 1.0))
