"""Fast-switching limit of the liquidity model.

Rates are rescaled to ``lambda01/eps`` and ``lambda10/eps`` and the shock size
to ``L = eps * L_bar``. As ``eps -> 0`` the chain averages the stock into a
geometric Brownian motion and the investor behaves like a Merton investor
facing a modified Sharpe ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfiniteValue, UnsupportedModel
from .model import ModelParams, hara_delta, log_constant, validate_params


@dataclass(frozen=True)
class HomogenizedSolution:
    """Limiting strategy, value constant and efficiency loss.

    ``pi_star`` is the limiting stock fraction in the Merton form
    ``theta_hom / ((1 - gamma) sigma)``; for log utility ``pi_star_printed``
    keeps the alternative ``theta_hom / (2 sigma)``. ``B0`` is the value
    constant (log: additive, power: multiplicative). ``theta_loss`` is
    negative when the modified Sharpe ratio beats the liquid one.
    """

    gamma: float
    lambda_bar: float
    L_bar: float
    theta_hom: float
    pi_star: float
    pi_star_printed: float
    B0: float
    theta_loss: float
    avg_drift: float
    avg_vol: float

    @property
    def is_loss(self) -> bool:
        return self.theta_loss >= 0.0


def _averaged(p: ModelParams, L_bar: float) -> tuple[float, float, float]:
    lam = p.liquid_time_fraction
    drift = p.alpha + (p.mu - p.alpha - p.lambda01 * L_bar) * lam
    return lam, drift, math.sqrt(lam) * p.sigma


def homogenize_log(p: ModelParams, L_bar: float = 0.0) -> HomogenizedSolution:
    """Fast-switching limit for log utility.

    ``B0 = c0/rho + lambda_bar theta_hom^2 / (2 rho^2)`` and the loss is
    ``1 - exp((lambda_bar theta_hom^2 - theta^2) / (2 rho))``.
    """
    validate_params(p)
    if not p.is_log:
        raise UnsupportedModel("homogenize_log needs gamma == 0")
    lam, drift, vol = _averaged(p, L_bar)
    th = (p.mu - p.r - p.lambda01 * L_bar + p.lambda01 / p.lambda10 * (p.alpha - p.r)) / p.sigma
    B0 = log_constant(p) / p.rho + lam * th**2 / (2.0 * p.rho**2)
    loss = -math.expm1((lam * th**2 - p.theta**2) / (2.0 * p.rho))
    return HomogenizedSolution(0.0, lam, L_bar, th, th / p.sigma, th / (2.0 * p.sigma),
                               B0, loss, drift, vol)


def homogenize_hara(p: ModelParams, L_bar: float = 0.0) -> HomogenizedSolution:
    """Fast-switching limit for power utility.

    The modified Sharpe ratio weights the freeze growth by ``1/gamma``:
    ``(mu - r - lambda01 L_bar + lambda01 (alpha - r) / (lambda10 gamma)) / sigma``.

    Raises
    ------
    InfiniteValue
        If the modified discount margin is nonpositive (only for ``gamma > 0``).
    """
    validate_params(p)
    g = p.gamma
    if g == 0:
        raise UnsupportedModel("homogenize_hara needs gamma != 0")
    lam, drift, vol = _averaged(p, L_bar)
    th = (p.mu - p.r - p.lambda01 * L_bar
          + p.lambda01 / (p.lambda10 * g) * (p.alpha - p.r)) / p.sigma
    delta_hom = hara_delta(p, lam * th**2)
    delta = hara_delta(p)
    if delta_hom <= 0 or delta <= 0:
        raise InfiniteValue(f"nonpositive discount margin: {delta_hom}, {delta}")
    B0 = (1.0 - g) ** (1.0 - g) * delta_hom ** (g - 1.0)
    loss = 1.0 - (delta_hom / delta) ** ((g - 1.0) / g)
    pi = th / ((1.0 - g) * p.sigma)
    return HomogenizedSolution(g, lam, L_bar, th, pi, pi, B0, loss, drift, vol)


def homogenize(p: ModelParams, L_bar: float = 0.0) -> HomogenizedSolution:
    return homogenize_log(p, L_bar) if p.is_log else homogenize_hara(p, L_bar)


def fast_switching_params(p: ModelParams, eps: float, L_bar: float = 0.0) -> ModelParams:
    """Parameters of the ``eps``-rescaled model: rates divided by ``eps``, ``L = eps L_bar``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return p.replace(lambda01=p.lambda01 / eps, lambda10=p.lambda10 / eps, L=eps * L_bar)
