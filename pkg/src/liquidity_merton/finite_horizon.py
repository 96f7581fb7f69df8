"""Finite-horizon log utility with at most one anticipated freeze.

The illiquid value is ``W = k_hat(t) log x + h1(t, pi)`` and the liquid value
``V = k_hat(t) log x + h0(t)``. The solver works in time-to-go
``tau = T - t`` with the rescaled loss exponent ``w = (h1 - h_hat) / k_hat``,
which removes the ``log k_hat`` singularity at the horizon:

    w_tau = -lambda10 w - theta^2/2 - (w + log(1 - pi w_pi)) / k_hat,
    w(tau=0, pi) = log(1 - pi).

The percent efficiency loss of the illiquid investor is ``1 - exp(w)``.
Near ``pi = 1`` the solution behaves like ``R(tau) log(1 - pi)``; the solver
removes that part exactly and discretises only the bounded remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, GridTooCoarse, NoConvergence, UnsupportedModel, WrongRegime
from .model import ModelParams, jump_map, jump_map_derivative, merton_log, validate_params
from .numerics import maximize_on_interval

ARG_FLOOR = 1e-12


@dataclass(frozen=True)
class MertonFinite:
    """Finite-horizon Merton benchmark ``V_hat = k_hat(t) log x + h_hat(t)``."""

    params: ModelParams
    T: float

    def _tau(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.T + 1e-12):
            raise DomainError("t must lie in [0, T]")
        return np.maximum(self.T - t, 0.0)

    def k_hat(self, t):
        out = -np.expm1(-self.params.rho * self._tau(t)) / self.params.rho
        return float(out) if np.ndim(out) == 0 else out

    def h_hat(self, t):
        return _h_hat_tau(self.params, self._tau(t))

    def c_rate(self, t):
        """Merton consumption per unit wealth, ``1 / k_hat(t)`` (infinite at ``t = T``)."""
        with np.errstate(divide="ignore"):
            out = 1.0 / np.asarray(self.k_hat(t), dtype=float)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def pi_hat(self) -> float:
        p = self.params
        return (p.mu - p.r) / p.sigma**2


def merton_finite_log(p: ModelParams, T: float) -> MertonFinite:
    validate_params(p)
    if not T > 0:
        raise DomainError("T must be positive")
    return MertonFinite(p, float(T))


def _k_tau(p: ModelParams, tau):
    return -np.expm1(-p.rho * np.asarray(tau, dtype=float)) / p.rho


def _h_hat_tau(p: ModelParams, tau):
    rho = p.rho
    tau = np.asarray(tau, dtype=float)
    k = _k_tau(p, tau)
    with np.errstate(divide="ignore", invalid="ignore"):
        klog = np.where(k > 0, k * np.log(np.where(k > 0, k, 1.0)), 0.0)
    growth = (p.mu - p.r) ** 2 / (2 * p.sigma**2 * rho**2) + (p.r - rho) / rho**2
    # 1 - e^{-x}(1 + x), written to keep accuracy for small x
    x = rho * tau
    poly = -np.expm1(-x) - x * np.exp(-x)
    out = -klog + growth * poly
    return float(out) if np.ndim(out) == 0 else out


def _crunch_weight(p: ModelParams, tau):
    """``(1 - e^{-(rho+lambda10) tau}) / (rho + lambda10)``."""
    a = p.rho + p.lambda10
    return -np.expm1(-a * np.asarray(tau, dtype=float)) / a


def _crunch_ratio(p: ModelParams, tau: float) -> float:
    """Crunch weight divided by ``k_hat``; tends to one at the horizon."""
    if tau < 1e-12:
        return 1.0
    return float(_crunch_weight(p, tau) / _k_tau(p, tau))


def cash_crunch_shift(t, pi, d: float, p: ModelParams, T: float):
    """Asymptotic change ``h1(t, 1 - d y) - h1(t, 1 - y)`` for small cash share ``y``.

    Equals ``(1 - e^{-(rho+lambda10)(T-t)}) / (rho + lambda10) * log d``; the
    ``pi`` argument only fixes the shape of the output.
    """
    if not 0 < d <= 1:
        raise DomainError("d must lie in (0, 1]")
    t = np.asarray(t, dtype=float)
    if np.any(t > T) or np.any(t < 0):
        raise DomainError("t must lie in [0, T]")
    out = _crunch_weight(p, T - t) * math.log(d) + 0.0 * np.asarray(pi, dtype=float)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class H1Surface:
    """Rescaled illiquid value on a ``(t, pi)`` grid.

    ``w[j, i]`` is ``(h1 - h_hat) / k_hat`` at ``t_grid[j]``, ``pi_grid[i]``
    and ``v`` is its regular part ``w - R log(1 - pi)``, where ``R`` is the
    crunch weight divided by ``k_hat``. The last ``pi`` node is the crunch
    node at ``1 - dpi``.
    """

    params: ModelParams
    T: float
    t_grid: np.ndarray
    pi_grid: np.ndarray
    v: np.ndarray
    steps: int
    floored_nodes: int

    @property
    def dpi(self) -> float:
        return float(self.pi_grid[1] - self.pi_grid[0])

    @property
    def ratio(self) -> np.ndarray:
        return np.array([_crunch_ratio(self.params, tau) for tau in self.T - self.t_grid])

    @property
    def w(self) -> np.ndarray:
        return self.v + self.ratio[:, None] * np.log1p(-self.pi_grid)[None, :]

    @property
    def k_hat(self) -> np.ndarray:
        return _k_tau(self.params, self.T - self.t_grid)

    @property
    def h_hat(self) -> np.ndarray:
        return _h_hat_tau(self.params, self.T - self.t_grid)

    @property
    def h1(self) -> np.ndarray:
        return self.h_hat[:, None] + self.k_hat[:, None] * self.w

    @property
    def loss(self) -> np.ndarray:
        return -np.expm1(self.w)

    def w_at(self, j: int, pi):
        """``w`` at time index ``j``: interpolated regular part plus the exact log part.

        Beyond the last node the regular part is held constant, which is the
        crunch asymptotics.
        """
        pi = np.asarray(pi, dtype=float)
        ratio = _crunch_ratio(self.params, self.T - self.t_grid[j])
        with np.errstate(divide="ignore"):
            out = np.interp(pi, self.pi_grid, self.v[j]) + ratio * np.log1p(-pi)
        return float(out) if np.ndim(out) == 0 else out

    def w_pi_at(self, j: int, pi: float) -> float:
        """``d w / d pi`` from the interpolated regular part and the exact log part."""
        grid = self.pi_grid
        i = int(np.clip(np.searchsorted(grid, pi, side="right") - 1, 0, len(grid) - 2))
        dv = (self.v[j, i + 1] - self.v[j, i]) / (grid[i + 1] - grid[i])
        ratio = _crunch_ratio(self.params, self.T - self.t_grid[j])
        return float(dv - ratio / (1.0 - pi))


def solve_h1(p: ModelParams, T: float, n_pi: int = 400, n_t: int = 201,
             dt_max: float | None = None, safety: float = 0.5,
             tau0: float = 1e-9, order: int = 2) -> H1Surface:
    """Explicit upwind scheme for the rescaled illiquid equation.

    The log singularity is split off exactly: ``w = R(tau) log(1 - pi) + v``
    with ``R`` the crunch weight over ``k_hat``. Since ``R`` solves
    ``R' = (1 - R)/k_hat - lambda10 R``, the regular part obeys

        v_tau = -lambda10 v - theta^2/2
                - (v + log(1 - pi (1 - R) - pi (1 - pi) v_pi)) / k_hat,

    with ``v = 0`` at the horizon. The grid is ``{0, dpi, ..., 1 - dpi}`` with
    ``dpi = 1 / n_pi``, and the last node carries the crunch condition
    ``h1(1 - dpi) = h1(1 - 2 dpi) - weight(tau) log 2``, which in ``v`` reads
    ``v(1 - dpi) = v(1 - 2 dpi)``. ``v_pi`` is a forward (upwind) difference
    of the given ``order``; time stepping is forward Euler (``order=1``) or
    Heun (``order=2``). Steps are capped by ``dt_max`` (default
    ``min(dpi / 5, 1e-3)``) and by the monotonicity bound of the linearised
    scheme, which is tight near the horizon where ``k_hat -> 0``.

    Raises
    ------
    UnsupportedModel
        If ``alpha != r``.
    GridTooCoarse
        If fewer than four ``pi`` nodes or fewer than two time nodes are requested.
    NoConvergence
        If the solution becomes non-finite.
    """
    validate_params(p)
    if p.alpha != p.r:
        raise UnsupportedModel("finite-horizon solver needs alpha == r")
    if not T > 0:
        raise DomainError("T must be positive")
    if n_pi < 4 or n_t < 2:
        raise GridTooCoarse("need n_pi >= 4 and n_t >= 2")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    dpi = 1.0 / n_pi
    if dt_max is None:
        dt_max = min(dpi / 5.0, 1e-3)
    pi = np.arange(n_pi) * dpi
    x = pi[:-1]
    adv = x * (1.0 - x)
    half_th2 = 0.5 * p.theta**2

    def slope(v):
        d = (v[1:] - v[:-1]) / dpi
        if order == 2:
            d[:-1] = (-3.0 * v[:-2] + 4.0 * v[1:-1] - v[2:]) / (2.0 * dpi)
        return d

    def rhs(v, tau_now):
        k = float(_k_tau(p, tau_now))
        R = _crunch_ratio(p, tau_now)
        arg = 1.0 - x * (1.0 - R) - adv * slope(v)
        low = arg < ARG_FLOOR
        if np.any(low):
            arg = np.maximum(arg, ARG_FLOOR)
        return -p.lambda10 * v[:-1] - half_th2 - (v[:-1] + np.log(arg)) / k, arg, int(low.sum()), k

    t_grid = np.linspace(0.0, T, n_t)
    tau_out = (T - t_grid)[::-1]
    out = np.zeros((n_t, n_pi))
    v = np.zeros(n_pi)
    tau = min(tau0, tau_out[1] * 1e-3)
    steps, floored = 0, 0
    for j in range(1, n_t):
        target = tau_out[j]
        while tau < target - 1e-15:
            r1, arg, nlow, k = rhs(v, tau)
            floored += nlow
            rate = (1.0 + order * (adv / dpi) / arg) / k + p.lambda10
            dt = min(dt_max, safety / float(rate.max()), target - tau)
            if order == 1:
                v[:-1] += dt * r1
            else:
                # Heun's method (strong-stability-preserving RK2)
                v1 = v.copy()
                v1[:-1] += dt * r1
                v1[-1] = v1[-2]
                r2 = rhs(v1, tau + dt)[0]
                v[:-1] += 0.5 * dt * (r1 + r2)
            v[-1] = v[-2]
            tau += dt
            steps += 1
        if not np.all(np.isfinite(v)):
            raise NoConvergence(f"non-finite solution at tau={tau}")
        out[j] = v
    return H1Surface(p, float(T), t_grid, pi, out[::-1].copy(), steps, floored)


def pi_zero_column(p: ModelParams, T: float, t) -> float:
    """``h1(t, 0)`` by quadrature of the derivative-free equation at ``pi = 0``.

    ``h1_tau = -(rho + lambda10) h1 + r k_hat - 1 + lambda10 h_hat - log k_hat``.
    """
    lam = p.rho + p.lambda10

    def src(u):
        k = float(_k_tau(p, u))
        return (p.r * k - 1.0 + p.lambda10 * float(_h_hat_tau(p, u)) - math.log(k)) * math.exp(
            -lam * (T - t - u))

    span = T - t
    if span <= 0:
        return 0.0
    breaks = [b for b in (1e-6, 1e-3) if b < span] or None
    val, _ = quad(src, 0.0, span, limit=200, points=breaks)
    return val


def _liquid_objective(p: ModelParams, surf: H1Surface, j: int):
    """``pi -> (mu-r) pi - sigma^2 pi^2/2 + lambda01 [log(1 - pi L) + w(g(pi))]``."""

    def obj(x):
        x = np.asarray(x, dtype=float)
        q = (p.mu - p.r) * x - 0.5 * p.sigma**2 * x**2
        if p.lambda01 == 0:
            return q
        with np.errstate(divide="ignore"):
            return q + p.lambda01 * (np.log1p(-x * p.L) + surf.w_at(j, jump_map(x, p.L)))

    return obj


def solve_h0(p: ModelParams, T: float, surf: H1Surface) -> tuple[np.ndarray, np.ndarray]:
    """Liquid value ``h0(t)`` and fraction ``pi*(t)`` on ``surf.t_grid``.

    With ``D = h0 - h_hat`` and ``Xi(t)`` the sup of :func:`_liquid_objective`,
    ``D_tau = -(rho + lambda01) D + k_hat (Xi - theta^2/2)`` and ``D = 0`` at the
    horizon. The source is integrated exactly against the exponential kernel
    with piecewise-linear interpolation between time nodes.
    """
    t = surf.t_grid
    n = len(t)
    xi = np.empty(n)
    pi_star = np.empty(n)
    upper = 1.0 if p.lambda01 == 0 else 1.0 - 1e-9
    for j in range(n):
        pi_star[j], xi[j] = maximize_on_interval(_liquid_objective(p, surf, j), 0.0, upper,
                                                 n_grid=401)
    tau = (T - t)[::-1]
    src = (surf.k_hat * (xi - 0.5 * p.theta**2))[::-1]
    lam = p.rho + p.lambda01
    D = np.zeros(n)
    for j in range(1, n):
        dt = tau[j] - tau[j - 1]
        e = math.exp(-lam * dt)
        # exact integral of e^{-lam (tau_j - s)} times the linear interpolant of src
        if lam * dt > 1e-8:
            w1 = (1.0 - e) / lam
            w_new = (lam * dt - 1.0 + e) / (lam**2 * dt)
        else:
            w1, w_new = dt, 0.5 * dt
        D[j] = e * D[j - 1] + src[j - 1] * (w1 - w_new) + src[j] * w_new
    h0 = surf.h_hat + D[::-1]
    return h0, pi_star


@dataclass(frozen=True)
class FiniteAsymptotics:
    """First-order small-``lambda01`` corrections on the surface time grid."""

    t_grid: np.ndarray
    pi_star: np.ndarray
    h0: np.ndarray


def finite_asymptotics(p: ModelParams, T: float, surf: H1Surface | None = None) -> FiniteAsymptotics:
    """Expansion of ``pi*(t)`` and ``h0(t)`` around the Merton solution.

    ``pi* = pi_hat + lambda01/sigma^2 [-L/(1 - pi_hat L) + w_pi(t, g(pi_hat)) g'(pi_hat)]``
    and ``h0 = h_hat + lambda01 [int_t^T e^{-rho(s-t)} (h1(s, g(pi_hat)) - h_hat(s)) ds
    + log(1 - pi_hat L)(1 - e^{-rho(T-t)}(1 + rho(T-t)))/rho^2]``.
    """
    m = merton_log(p)
    pi_hat = m.pi_hat
    if not pi_hat < 1:
        raise WrongRegime("finite-horizon expansion needs pi_hat < 1")
    if surf is None:
        surf = solve_h1(p, T)
    gp = jump_map(pi_hat, p.L)
    dg = jump_map_derivative(pi_hat, p.L)
    t = surf.t_grid
    slope = np.array([surf.w_pi_at(j, gp) for j in range(len(t))])
    pi_star = pi_hat + p.lambda01 / p.sigma**2 * (-p.L / (1.0 - pi_hat * p.L) + slope * dg)
    # k_hat * w(g(pi_hat)) is h1 - h_hat along the Merton jump target
    gap = surf.k_hat * np.array([surf.w_at(j, gp) for j in range(len(t))])
    tau = (T - t)[::-1]
    src = gap[::-1]
    integ = np.zeros(len(t))
    for j in range(1, len(t)):
        dt = tau[j] - tau[j - 1]
        e = math.exp(-p.rho * dt)
        integ[j] = e * integ[j - 1] + 0.5 * dt * (src[j] + e * src[j - 1])
    x = p.rho * (T - t)
    poly = (-np.expm1(-x) - x * np.exp(-x)) / p.rho**2
    h0 = surf.h_hat + p.lambda01 * (integ[::-1] + math.log1p(-pi_hat * p.L) * poly)
    return FiniteAsymptotics(t, pi_star, h0)


@dataclass
class FiniteHorizonSolution:
    """Finite-horizon log solution on a ``(t, pi)`` grid.

    ``loss_surface`` is ``1 - exp((h1 - h_hat) / k_hat)``; at ``t = T`` it is
    the horizon limit ``pi`` (only the cash share can be consumed).
    """

    T: float
    t_grid: np.ndarray
    pi_grid: np.ndarray
    k_hat: np.ndarray
    h_hat: np.ndarray
    h0: np.ndarray
    h1: np.ndarray
    pi_star_t: np.ndarray
    loss_surface: np.ndarray
    surface: H1Surface = field(repr=False)

    def c1_rate(self, j: int) -> np.ndarray:
        """Illiquid consumption per unit wealth ``1 / (k_hat - pi h1_pi)`` at time index ``j``."""
        s = self.surface
        w = s.w[j]
        dw = np.append((w[1:] - w[:-1]) / s.dpi, np.nan)
        k = self.k_hat[j]
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / (k * (1.0 - self.pi_grid * dw))


def solve_finite_horizon(p: ModelParams, T: float, n_pi: int = 400, n_t: int = 201,
                         dt_max: float | None = None) -> FiniteHorizonSolution:
    surf = solve_h1(p, T, n_pi=n_pi, n_t=n_t, dt_max=dt_max)
    h0, pi_star = solve_h0(p, T, surf)
    return FiniteHorizonSolution(T, surf.t_grid, surf.pi_grid, surf.k_hat, surf.h_hat, h0,
                                 surf.h1, pi_star, surf.loss, surf)


def infinite_horizon_w(p: ModelParams, pi):
    """Long-horizon limit of ``w``: ``(-theta^2/2 + rho log(1 - pi^a)) / (rho + lambda10)``.

    This is ``rho (h(pi) - h_hat)`` for the infinite-horizon illiquid value
    with the liquid constant held at the Merton value, the coupling used by
    the finite-horizon equation.
    """
    pi = np.asarray(pi, dtype=float)
    a = 1.0 + p.lambda10 / p.rho
    with np.errstate(divide="ignore"):
        out = (-0.5 * p.theta**2 + p.rho * np.log1p(-pi**a)) / (p.rho + p.lambda10)
    return float(out) if np.ndim(out) == 0 else out
