"""Monotone solutions of autonomous first-order ODEs with a singular start.

Both illiquid-regime value shapes (log and power utility) reduce, in the
variable ``z = -log(pi)``, to ``y'(z) = G(y)`` with ``y`` leaving a singular
or degenerate point at ``z = 0`` and settling on an equilibrium ``y_inf`` of
``G`` as ``z -> inf``. Separability gives the exact inverse

    z(y) = integral from y_0 to y of ds / G(s),

which is used to start the solution off the singular point; a high-order
integrator then carries it across the bulk and a linearised exponential
tail handles very large ``z``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import GridTooCoarse, NoConvergence
from .numerics import find_root

Z_MAX = 20.0
N_GRID = 400


def graded_grid(z_min: float = 1e-6, z_max: float = Z_MAX, n: int = N_GRID) -> np.ndarray:
    """Geometric grid on ``[z_min, z_max]``, dense near ``z = 0``."""
    return np.geomspace(z_min, z_max, n)


class AutonomousProfile:
    """Callable monotone profile ``y(z)`` for ``z > 0``.

    Parameters
    ----------
    rhs : callable
        ``G(y)``, vectorised. Must keep one sign between the start value and
        ``y_inf``.
    distance : callable
        ``distance(y)`` returns the exact ``z`` at which the profile takes the
        value ``y`` (the separable quadrature from the singular end).
    y_inf : float
        Equilibrium approached as ``z -> inf``.
    y_start : float
        A value near the singular end; the ODE is integrated from
        ``z0 = distance(y_start)``.
    y_singular : float
        Limit of ``y`` as ``z -> 0`` (may be infinite); used to bracket the
        inverse quadrature for ``z < z0``.
    z_max : float
        End of the integrated range; beyond it the linearisation around
        ``y_inf`` is used.
    """

    def __init__(self, rhs: Callable, distance: Callable[[float], float], y_inf: float,
                 y_start: float, y_singular: float, z_max: float = Z_MAX,
                 rtol: float = 1e-12, atol: float = 1e-14):
        self.rhs = rhs
        self.distance = distance
        self.y_inf = float(y_inf)
        self.y_start = float(y_start)
        self.y_singular = float(y_singular)
        self.z_max = float(z_max)
        self.z0 = float(distance(y_start))
        if not (0 < self.z0 < z_max):
            raise GridTooCoarse(f"start distance z0={self.z0} outside (0, {z_max})")
        # Linear decay rate at the equilibrium: y - y_inf ~ C exp(k z), k < 0.
        eps = 1e-7 * max(1.0, abs(self.y_inf))
        self.decay = float((rhs(self.y_inf + eps) - rhs(self.y_inf - eps)) / (2 * eps))
        if not self.decay < 0:
            raise NoConvergence("equilibrium is not attracting")
        # Past ~50 decay lengths the linearised tail is exact to rounding; stopping
        # there keeps the step count bounded when the decay is fast.
        self.z_max = min(self.z_max, self.z0 + 50.0 / -self.decay)
        sol = solve_ivp(lambda z, y: rhs(y), (self.z0, self.z_max), [self.y_start],
                        method="DOP853", rtol=rtol, atol=atol, dense_output=True)
        if not sol.success:
            raise NoConvergence(f"profile integration failed: {sol.message}")
        self._dense = sol.sol
        self.y_end = float(sol.y[0, -1])

    def _inverse(self, z: float) -> float:
        """Solve ``distance(y) = z`` for ``0 < z < z0``."""
        a = self.y_start
        if math.isfinite(self.y_singular):
            b = self.y_singular
        else:
            # Walk towards the singular end until the distance drops below z.
            direction = 1.0 if self.y_singular > 0 else -1.0
            scale = max(1.0, abs(self.y_start))
            b = self.y_start
            for _ in range(2000):
                b = b + direction * scale
                if self.distance(b) < z:
                    break
                scale *= 2.0
            else:
                raise NoConvergence(f"could not bracket the profile at z={z}")
        return find_root(lambda y: self.distance(y) - z, a, b, xtol=1e-15 * max(1.0, abs(a)))

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=float)
        out = np.empty_like(z_arr, dtype=float)
        flat_z = z_arr.ravel()
        flat_out = out.ravel()
        mid = (flat_z >= self.z0) & (flat_z <= self.z_max)
        if np.any(mid):
            flat_out[mid] = self._dense(flat_z[mid])[0]
        far = flat_z > self.z_max
        if np.any(far):
            flat_out[far] = self.y_inf + (self.y_end - self.y_inf) * np.exp(
                self.decay * (flat_z[far] - self.z_max))
        near = flat_z < self.z0
        for i in np.flatnonzero(near):
            zi = flat_z[i]
            flat_out[i] = self.y_singular if zi <= 0 else self._inverse(zi)
        return float(flat_out[0]) if z_arr.ndim == 0 else flat_out.reshape(z_arr.shape)

    def derivative(self, z):
        """``y'(z) = G(y(z))``."""
        return self.rhs(self(z))


def improper_distance(inv_rhs: Callable[[float], float], lower: float, upper: float) -> float:
    """Adaptive quadrature of ``1/G`` used by the ``distance`` callbacks."""
    val, err = quad(inv_rhs, lower, upper, epsabs=1e-15, epsrel=1e-13, limit=400)
    return val
