"""Small numerical helpers shared by the solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import NoConvergence

ROOT_XTOL = 1e-12


def bracket_root(fun: Callable[[float], float], x0: float, step: float,
                 lower: float = -math.inf, upper: float = math.inf,
                 max_expand: int = 200) -> tuple[float, float]:
    """Find ``a < b`` with a sign change of ``fun`` by expanding away from ``x0``.

    The search alternates between both sides of ``x0``, doubling ``step`` each
    round, and never leaves ``(lower, upper)`` (open bounds are approached
    geometrically).
    """
    f0 = fun(x0)
    if f0 == 0.0:
        return x0, x0
    lo, hi = x0, x0
    flo = fhi = f0
    s = step
    for _ in range(max_expand):
        new_hi = hi + s if math.isinf(upper) else hi + 0.5 * (upper - hi)
        f_new = fun(new_hi)
        if np.sign(f_new) != np.sign(fhi):
            return hi, new_hi
        hi, fhi = new_hi, f_new
        new_lo = lo - s if math.isinf(lower) else lo - 0.5 * (lo - lower)
        f_new = fun(new_lo)
        if np.sign(f_new) != np.sign(flo):
            return new_lo, lo
        lo, flo = new_lo, f_new
        s *= 2.0
    raise NoConvergence(f"no sign change found around x0={x0}")


def find_root(fun: Callable[[float], float], a: float, b: float,
              xtol: float = ROOT_XTOL, rtol: float = 4 * np.finfo(float).eps) -> float:
    """Bracketed Brent root with the package-wide tolerance."""
    fa, fb = fun(a), fun(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise NoConvergence(f"root not bracketed on [{a}, {b}]: f={fa}, {fb}")
    return brentq(fun, a, b, xtol=xtol, rtol=rtol, maxiter=500)


def maximize_on_interval(fun: Callable, a: float, b: float, n_grid: int = 201,
                         xtol: float = 1e-12, extra_points=(),
                         derivative: Callable[[float], float] | None = None) -> tuple[float, float]:
    """Global-then-local maximisation of a scalar function on ``[a, b]``.

    ``fun`` must accept numpy arrays. A coarse scan locates the best cell,
    which is then refined: by a bracketed root of ``derivative`` when one is
    supplied and changes sign across the cell, otherwise by bounded Brent.
    Returns ``(argmax, max)``.
    """
    grid = np.unique(np.concatenate([np.linspace(a, b, n_grid), np.asarray(extra_points, float)]))
    grid = grid[(grid >= a) & (grid <= b)]
    vals = np.asarray(fun(grid), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    best_x, best_v = float(grid[i]), float(vals[i])
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    if hi <= lo:
        return best_x, best_v
    if derivative is not None:
        d_lo, d_hi = derivative(lo), derivative(hi)
        if d_lo > 0 > d_hi:
            x = brentq(derivative, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
            v = float(np.asarray(fun(np.array([x])))[0])
            if v >= best_v - 1e-15 * max(1.0, abs(best_v)):
                return float(x), v
        elif d_lo > 0 and d_hi > 0 and i == len(grid) - 1:
            return best_x, best_v
    res = minimize_scalar(lambda x: -float(fun(np.array([x]))[0]), bounds=(lo, hi),
                          method="bounded", options={"xatol": xtol, "maxiter": 500})
    if np.isfinite(res.fun) and -res.fun > best_v:
        best_x, best_v = float(res.x), float(-res.fun)
    return best_x, best_v


@dataclass
class FixedPointResult:
    value: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)


def fixed_point(step: Callable[[float], float], x0: float, tol: float = 1e-10,
                damping: float = 0.5, max_iter: int = 500, accelerate: bool = True) -> FixedPointResult:
    """Damped Picard iteration ``x <- (1 - d) x + d T(x)`` with Aitken extrapolation.

    When ``accelerate`` is set, every round applies the map twice and takes
    the Aitken delta-squared extrapolate (Steffensen's method); rounds whose
    second difference is too small fall back to the damped update. The
    iteration stops once two successive iterates differ by less than ``tol``.
    ``iterations`` counts evaluations of ``step``.
    """
    x = float(x0)
    trace = []
    evals = 0
    while evals < max_iter:
        t1 = step(x)
        evals += 1
        trace.append((x, t1))
        if abs(t1 - x) < tol:
            return FixedPointResult(t1, evals, True, trace)
        x_damped = (1.0 - damping) * x + damping * t1
        if not accelerate:
            x = x_damped
            continue
        t2 = step(t1)
        evals += 1
        trace.append((t1, t2))
        if abs(t2 - t1) < tol:
            return FixedPointResult(t2, evals, True, trace)
        denom = t2 - 2.0 * t1 + x
        if denom != 0.0 and abs(denom) > 1e-3 * abs(t2 - t1):
            x_new = x - (t1 - x) ** 2 / denom
        else:
            x_new = x_damped
        if not np.isfinite(x_new):
            x_new = x_damped
        x = x_new
    raise NoConvergence(f"fixed point not reached in {max_iter} map evaluations", trace)
