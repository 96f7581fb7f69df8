"""Model parameters, the post-shock jump map and the Merton benchmarks."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import DomainError, InfiniteValue, InvalidParams


@dataclass(frozen=True)
class ModelParams:
    """Market and preference constants of the two-regime liquidity model.

    Regime 0 is liquid (geometric Brownian motion with drift ``mu`` and
    volatility ``sigma``); regime 1 is a freeze, during which the stock grows
    deterministically at ``alpha``. Freezes start at rate ``lambda01`` with an
    instantaneous relative price drop ``L`` and end at rate ``lambda10``.
    ``gamma = 0`` denotes log utility, otherwise ``u(c) = c**gamma / gamma``.
    """

    mu: float = 0.075
    sigma: float = 1.0 / 6.0
    r: float = 0.05
    alpha: float = 0.05
    rho: float = 0.05
    gamma: float = 0.0
    lambda01: float = 0.1
    lambda10: float = 2.0
    L: float = 0.0

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def theta(self) -> float:
        """Sharpe ratio of the liquid regime."""
        return (self.mu - self.r) / self.sigma

    @property
    def is_log(self) -> bool:
        return self.gamma == 0.0

    @property
    def liquid_time_fraction(self) -> float:
        """Stationary probability of the liquid regime."""
        return self.lambda10 / (self.lambda01 + self.lambda10)

    def generator(self) -> np.ndarray:
        """Infinitesimal generator of the liquidity chain (state 0 = liquid)."""
        return np.array(
            [[-self.lambda01, self.lambda01], [self.lambda10, -self.lambda10]]
        )


def validate_params(p: ModelParams) -> ModelParams:
    """Return ``p`` unchanged if every standing assumption holds.

    Raises
    ------
    InvalidParams
        Naming the first violated constraint.
    """
    for name in ("mu", "sigma", "r", "alpha", "rho", "gamma", "lambda01", "lambda10", "L"):
        value = getattr(p, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise InvalidParams(f"{name} must be a finite real number, got {value!r}")
    checks = [
        (p.sigma > 0, "sigma > 0"),
        (p.rho > 0, "rho > 0"),
        (p.lambda01 >= 0, "lambda01 >= 0"),
        (p.lambda10 > 0, "lambda10 > 0"),
        (0 <= p.L < 1, "0 <= L < 1"),
        (p.gamma < 1, "gamma < 1"),
        (p.alpha <= p.r, "alpha <= r"),
    ]
    for ok, constraint in checks:
        if not ok:
            raise InvalidParams(f"constraint violated: {constraint}")
    return p


def jump_map(pi, L: float):
    """Stock fraction right after a freeze starts with a relative drop ``L``.

    ``g(pi) = pi (1 - L) / (1 - pi L)``; increasing and convex on [0, 1].
    Accepts scalars or arrays.
    """
    arr = np.asarray(pi, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1) or np.any(np.isnan(arr)):
        raise DomainError("jump_map requires 0 <= pi <= 1")
    out = arr * (1.0 - L) / (1.0 - arr * L)
    return float(out) if np.ndim(out) == 0 else out


def jump_map_derivative(pi, L: float):
    """d/dpi of :func:`jump_map`."""
    arr = np.asarray(pi, dtype=float)
    out = (1.0 - L) / (1.0 - arr * L) ** 2
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class MertonSolution:
    """Unconstrained Merton benchmark.

    For log utility ``value_coeff`` is ``h_hat`` in ``V(x) = log(x)/rho + h_hat``;
    for power utility it is ``f_hat`` in ``V(x) = f_hat x**gamma / gamma``.
    ``delta`` is ``nan`` in the log case.
    """

    gamma: float
    pi_hat: float
    c_rate: float
    theta: float
    delta: float
    value_coeff: float
    finite: bool = True

    def require_finite(self) -> "MertonSolution":
        if not self.finite:
            raise InfiniteValue(
                f"Merton value is infinite: gamma={self.gamma} > 0 and delta={self.delta} <= 0"
            )
        return self


def log_constant(p: ModelParams) -> float:
    """``r/rho - 1 + log(rho)``, the wealth-free part of the log consumption term."""
    return p.r / p.rho - 1.0 + math.log(p.rho)


def merton_log(p: ModelParams) -> MertonSolution:
    theta = p.theta
    h_hat = log_constant(p) / p.rho + theta**2 / (2.0 * p.rho**2)
    return MertonSolution(
        gamma=0.0,
        pi_hat=theta / p.sigma,
        c_rate=p.rho,
        theta=theta,
        delta=float("nan"),
        value_coeff=h_hat,
    )


def hara_delta(p: ModelParams, theta_sq: float | None = None) -> float:
    """Discount margin ``rho - gamma r - theta**2 gamma / (2 (1 - gamma))``."""
    g = p.gamma
    th2 = p.theta**2 if theta_sq is None else theta_sq
    return p.rho - g * p.r - th2 * g / (2.0 * (1.0 - g))


def merton_hara(p: ModelParams) -> MertonSolution:
    """Merton solution for power utility (``gamma != 0``).

    ``pi_hat`` is the unconstrained optimum and may exceed one. When
    ``gamma > 0`` and ``delta <= 0`` the value is infinite and ``finite`` is
    False; ``value_coeff`` and ``c_rate`` are then ``inf``/``nan``.
    """
    g = p.gamma
    if g == 0:
        raise DomainError("merton_hara requires gamma != 0; use merton_log")
    theta = p.theta
    delta = hara_delta(p)
    pi_hat = (p.mu - p.r) / ((1.0 - g) * p.sigma**2)
    if delta <= 0:
        # gamma < 0 with delta <= 0 cannot happen under rho > 0, r >= 0,
        # but a negative r could produce it; treat it the same way.
        return MertonSolution(g, pi_hat, float("nan"), theta, delta, float("inf"), False)
    f_hat = ((1.0 - g) / delta) ** (1.0 - g)
    return MertonSolution(g, pi_hat, delta / (1.0 - g), theta, delta, f_hat, True)


def merton(p: ModelParams) -> MertonSolution:
    """Dispatch to :func:`merton_log` or :func:`merton_hara` on ``p.gamma``."""
    return merton_log(p) if p.is_log else merton_hara(p)
