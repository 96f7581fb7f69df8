"""Monte Carlo evaluation of consumption/investment policies.

Two estimators of ``E[int_0^T e^{-rho t} u(c_t) dt]`` are provided, with a
bound on the neglected tail beyond the truncation horizon ``T``.

``scheme="segment"`` samples the regime switch times exactly. For homothetic
policies (constant liquid fraction, consumption proportional to wealth) the
frozen-regime trajectory is deterministic and is solved once; inside a
liquid spell only the spell length and the Brownian endpoint are drawn, and
the utility collected is replaced by its conditional mean given both (closed
form for log utility, Gauss-Legendre over the Brownian bridge for power
utility). The estimator has no time-discretisation error.

``scheme="euler"`` steps wealth and the illiquid fraction on a time grid,
splitting steps exactly at switch times. It is slower and used as a
cross-check.

Random numbers come from counter-based Philox streams keyed by the seed and
a block index, with a fixed block size, so results do not depend on how the
work is chunked.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import expit

from .errors import InvalidParams, Ruin
from .model import ModelParams, hara_delta, jump_map, merton, validate_params

BLOCK = 16384


@dataclass(frozen=True)
class Policy:
    """Homothetic policy: consumption proportional to wealth.

    ``liquid_fraction`` is the constant stock fraction while liquid,
    ``liquid_rate`` the liquid consumption per unit wealth, and
    ``illiquid_rate(pi)`` the frozen-regime consumption per unit wealth.
    """

    gamma: float
    liquid_fraction: float
    liquid_rate: float
    illiquid_rate: Callable
    clip: bool = True

    def __post_init__(self):
        if self.liquid_rate < 0:
            raise InvalidParams("liquid consumption rate must be nonnegative")
        pi = self.liquid_fraction
        if not (0.0 <= pi <= 1.0):
            if not self.clip:
                raise InvalidParams("liquid fraction must lie in [0, 1]")
            object.__setattr__(self, "liquid_fraction", min(max(pi, 0.0), 1.0))

    def liquid_consumption(self, x):
        return self.liquid_rate * np.asarray(x, dtype=float)

    def illiquid_consumption(self, pi, x):
        return np.asarray(self.illiquid_rate(pi), dtype=float) * np.asarray(x, dtype=float)


def merton_policy(p: ModelParams) -> Policy:
    """Merton fraction (clipped to [0, 1]) and Merton consumption in both regimes."""
    m = merton(p).require_finite()
    rate = m.c_rate
    return Policy(p.gamma, m.pi_hat, rate, lambda pi: np.full(np.shape(pi), rate, dtype=float))


def policy_from_solution(sol) -> Policy:
    """Policy of a solved model (log, HARA or coupled solution object).

    The illiquid fraction itself is not part of the policy: it evolves with
    the consumption rule inside the simulator.
    """
    p = sol.params
    rate = sol.c0_rate if not callable(sol.c0_rate) else sol.c0_rate()

    def illiquid(pi):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(sol.c1_rate(np.asarray(pi, dtype=float)), dtype=float)
        return np.where(np.asarray(pi) >= 1.0, 0.0, np.nan_to_num(out, nan=0.0))

    return Policy(p.gamma, float(sol.pi_star), float(rate), illiquid)


@dataclass(frozen=True)
class SimulationEstimate:
    """Monte Carlo estimate with its standard error and run settings."""

    mean: float
    std_err: float
    n_paths: int
    horizon_used: float
    dt: float
    seed: int
    tail_bound: float
    scheme: str

    def to_record(self) -> dict:
        return asdict(self)

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.mean - target) <= k * self.std_err


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) + (int(block) << 64)))


def _utility(gamma: float):
    if gamma == 0:
        return np.log
    return lambda c: np.power(c, gamma) / gamma


# --- illiquid spell: deterministic trajectory ---------------------------------

@dataclass
class _Spell:
    """Deterministic frozen-regime trajectory from a fixed starting fraction.

    ``state(s)`` returns, for spell lengths ``s``, the log-wealth change
    ``A(s)``, the stock fraction and the utility collected per unit of the
    starting wealth scale:
    log: ``int_0^s e^{-rho u}(log k1(Pi_u) + A(u)) du``;
    power: ``int_0^s e^{-rho u} k1(Pi_u)^gamma e^{gamma A(u)} / gamma du``.
    """

    state: Callable
    s_max: float

    def _at(self, row, tau):
        tau = np.minimum(np.asarray(tau, dtype=float), self.s_max)
        return self.state(tau)[row]

    def growth(self, tau):
        return self._at(0, tau)

    def fraction(self, tau):
        return self._at(1, tau)

    def realized(self, tau):
        return self._at(2, tau)


def _rate_table(policy: Policy):
    """Tabulate the illiquid rate per unit cash, ``k1(pi) / (1 - pi)``, against ``log(1 - pi)``.

    This ratio stays bounded as the cash share vanishes, so the table can be
    held constant beyond its ends.
    """
    log_y = np.linspace(math.log(1e-14), 0.0, 2000)
    y = np.exp(log_y)
    rates = np.maximum(np.asarray(policy.illiquid_rate(-np.expm1(log_y)), dtype=float), 0.0)
    ratio = rates / y

    def per_cash(log_cash):
        return np.interp(log_cash, log_y, ratio)

    return per_cash, ratio


def _check_cash_admissible(policy: Policy, ratio: np.ndarray) -> None:
    """Raise :class:`Ruin` if the frozen-regime rule spends the cash in finite time.

    For ``u(0) = -inf`` the rate per unit cash must stay bounded as the cash
    share vanishes; a rule with ``k1(1) > 0`` makes it grow like ``1/(1 - pi)``.
    """
    if policy.gamma > 0:
        return
    at_edge = float(ratio[0])
    reference = float(np.interp(math.log(1e-3), np.linspace(math.log(1e-14), 0.0, ratio.size), ratio))
    if at_edge > 1e3 * max(reference, 1e-300):
        raise Ruin("cash exhausted during a freeze: consumption does not vanish with the cash share")


def _illiquid_spell(p: ModelParams, policy: Policy, pi0: float, horizon: float) -> _Spell:
    g = policy.gamma
    per_cash, ratio = _rate_table(policy)
    if pi0 <= 0.0:
        k = float(policy.illiquid_rate(np.array([0.0]))[0])
        rate = p.rho - g * (p.r - k)

        def closed(tau):
            if g == 0:
                e = np.exp(-p.rho * tau)
                value = (math.log(k) * -np.expm1(-p.rho * tau) / p.rho
                         + (p.r - k) * (-np.expm1(-p.rho * tau) - p.rho * tau * e) / p.rho**2)
            else:
                value = k**g / g * (tau if rate == 0 else -np.expm1(-rate * tau) / rate)
            return (p.r - k) * tau, np.zeros_like(tau), value

        return _Spell(closed, horizon)
    _check_cash_admissible(policy, ratio)
    z0 = math.log(pi0) - math.log1p(-pi0) if pi0 < 1 else 40.0

    def rhs(t, y):
        z, A = y[0], y[1]
        log_cash = -np.logaddexp(0.0, z)
        pi = expit(z)
        ratio = float(per_cash(log_cash))
        k = ratio * math.exp(log_cash)
        dz = (p.alpha - p.r) + ratio
        dA = p.r + (p.alpha - p.r) * pi - k
        if g == 0:
            util = math.log(max(k, 1e-300)) + A
        else:
            util = max(k, 1e-300) ** g * math.exp(g * A) / g
        return [dz, dA, math.exp(-p.rho * t) * util]

    sol = solve_ivp(rhs, (0.0, horizon), [z0, 0.0, 0.0], method="LSODA", rtol=1e-10,
                    atol=1e-12, dense_output=True)

    def dense(tau):
        flat = np.ravel(tau)
        y = sol.sol(flat) if flat.size else np.zeros((3, 0))
        return (y[1].reshape(np.shape(tau)), expit(y[0]).reshape(np.shape(tau)),
                y[2].reshape(np.shape(tau)))

    return _Spell(dense, horizon)


# --- estimators ----------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _tail_bound(p: ModelParams, policy: Policy, horizon: float, mean_abs_scale: float) -> float:
    """Size of the utility collected after ``horizon``.

    ``mean_abs_scale`` is the mean of ``|log x_T|`` (log) or ``|x_T^gamma / gamma|``
    (power). The consumption rates at the start of each regime set the
    utility per unit wealth; for log utility the wealth drift adds a term in
    ``1 / rho^2``.
    """
    rates = np.array([policy.liquid_rate,
                      float(policy.illiquid_rate(np.array([jump_map(policy.liquid_fraction,
                                                                    p.L)]))[0])])
    rates = rates[rates > 0]
    fade = math.exp(-p.rho * horizon)
    if policy.gamma == 0:
        log_k = float(np.max(np.abs(np.log(rates)))) if rates.size else 0.0
        drift = abs(p.r) + abs(p.alpha - p.r) + 0.5 * p.theta**2 + float(np.max(rates, initial=0.0))
        return fade * ((mean_abs_scale + log_k) / p.rho + drift / p.rho**2)
    k_g = float(np.max(rates**policy.gamma)) if rates.size else 1.0
    eff = hara_delta(p) if hara_delta(p) > 0 else p.rho
    return fade * mean_abs_scale * k_g / eff


def _bridge_moments(rho: float, tau: np.ndarray):
    """Regression of ``int_0^tau e^{-rho s} W_s ds`` on ``W_tau``.

    Returns ``p1 = int_0^tau s e^{-rho s} ds``, the slope ``beta`` and the
    residual variance of the integral given ``W_tau``.
    """
    e = np.exp(-rho * tau)
    p1 = (-np.expm1(-rho * tau) - rho * tau * e) / rho**2
    q2 = (-np.expm1(-2 * rho * tau) - 2 * rho * tau * e**2) / (4 * rho**2)
    var_i = 2.0 / rho * (q2 - e * p1)
    with np.errstate(invalid="ignore", divide="ignore"):
        beta = np.where(tau == 0, 0.0, p1 / tau)
    return p1, beta, np.maximum(var_i - beta * p1, 0.0)


def _liquid_power_given_end(p: ModelParams, policy: Policy, log_x: np.ndarray,
                            tau: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``E[int_0^tau e^{-rho s} u(c_s) ds | W_tau = w]`` for power utility.

    Given its endpoint the Brownian path is a bridge with mean ``s w / tau``
    and variance ``s (tau - s) / tau``; the time integral uses Gauss-Legendre.
    """
    g, pi, k = policy.gamma, policy.liquid_fraction, policy.liquid_rate
    m = p.r + (p.mu - p.r) * pi - k - 0.5 * p.sigma**2 * pi**2
    vol = p.sigma * pi
    half = 0.5 * tau[:, None]
    s = half * (_GL_NODES[None, :] + 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        slope = np.where(tau > 0, w / tau, 0.0)[:, None]
        bridge_var = np.where(tau[:, None] > 0, s * (tau[:, None] - s) / tau[:, None], 0.0)
    expo = -p.rho * s + g * (m * s + vol * slope * s) + 0.5 * (g * vol) ** 2 * bridge_var
    integral = half[:, 0] * (np.exp(expo) @ _GL_WEIGHTS)
    return np.exp(g * log_x) * k**g / g * integral


def _segment_block(p: ModelParams, policy: Policy, spell: _Spell | None, n: int,
                   rng: np.random.Generator, horizon: float, log_x0: float,
                   rao_blackwell: bool = True):
    g, pi = policy.gamma, policy.liquid_fraction
    m = p.r + (p.mu - p.r) * pi - policy.liquid_rate - 0.5 * p.sigma**2 * pi**2
    vol = p.sigma * pi
    jump = math.log1p(-pi * p.L) if pi * p.L < 1 else -np.inf
    log_k0 = math.log(policy.liquid_rate) if (g == 0 and policy.liquid_rate > 0) else -np.inf
    t = np.zeros(n)
    log_x = np.full(n, log_x0)
    acc = np.zeros(n)
    alive = np.ones(n, dtype=bool)
    regime = 0
    while alive.any():
        idx = np.flatnonzero(alive)
        ti, lx = t[idx], log_x[idx]
        disc = np.exp(-p.rho * ti)
        left = horizon - ti
        rate = p.lambda01 if regime == 0 else p.lambda10
        tau = rng.exponential(1.0 / rate, size=idx.size) if rate > 0 else np.full(idx.size, np.inf)
        cut = np.minimum(tau, left)
        if regime == 0:
            w = np.sqrt(cut) * rng.standard_normal(idx.size)
            if g == 0:
                p1, beta, resid = _bridge_moments(p.rho, cut)
                integral = beta * w
                if not rao_blackwell:
                    integral = integral + np.sqrt(resid) * rng.standard_normal(idx.size)
                frac = -np.expm1(-p.rho * cut)
                acc[idx] += disc * ((log_k0 + lx) * frac / p.rho + m * p1 + vol * integral)
            else:
                acc[idx] += disc * _liquid_power_given_end(p, policy, lx, cut, w)
            log_x[idx] = lx + m * cut + vol * w + np.where(tau < left, jump, 0.0)
        else:
            if g == 0:
                acc[idx] += disc * (lx * -np.expm1(-p.rho * cut) / p.rho + spell.realized(cut))
            else:
                acc[idx] += disc * np.exp(g * lx) * spell.realized(cut)
            log_x[idx] = lx + spell.growth(cut)
        t[idx] = ti + tau
        alive[idx] = t[idx] < horizon
        regime = 1 - regime
    if not np.all(np.isfinite(acc)):
        raise Ruin("non-finite utility: wealth or consumption reached zero")
    scale = np.abs(log_x) if g == 0 else np.abs(np.exp(g * log_x) / g)
    return acc, float(np.mean(scale))


def _euler_block(p: ModelParams, policy: Policy, n: int, rng: np.random.Generator,
                 horizon: float, dt: float, log_x0: float):
    g, pi = policy.gamma, policy.liquid_fraction
    u = _utility(g)
    m = p.r + (p.mu - p.r) * pi - policy.liquid_rate - 0.5 * p.sigma**2 * pi**2
    vol = p.sigma * pi
    t = np.zeros(n)
    log_x = np.full(n, log_x0)
    frac = np.zeros(n)
    regime = np.zeros(n, dtype=int)
    nxt = rng.exponential(1.0 / p.lambda01, size=n) if p.lambda01 > 0 else np.full(n, np.inf)
    acc = np.zeros(n)
    while True:
        active = t < horizon
        if not active.any():
            break
        h = np.where(active, np.minimum(dt, np.minimum(nxt, horizon) - t), 0.0)
        liquid = regime == 0
        x = np.exp(log_x)
        c = np.where(liquid, policy.liquid_rate, policy.illiquid_rate(np.minimum(frac, 1.0))) * x
        with np.errstate(divide="ignore"):
            acc += np.where(active, np.exp(-p.rho * t) * u(c) * h, 0.0)
        z = rng.standard_normal(n)
        d_liq = m * h + vol * np.sqrt(h) * z
        k1 = c / x
        d_ill = (p.r + (p.alpha - p.r) * frac - k1) * h
        new_frac = frac + h * (frac * (1.0 - frac) * (p.alpha - p.r) + frac * k1)
        log_x = np.where(liquid, log_x + d_liq, log_x + d_ill)
        frac = np.where(liquid, frac, new_frac)
        if np.any(frac[~liquid] >= 1.0) and (g <= 0):
            raise Ruin("cash exhausted during a freeze; reduce dt or check the consumption rule")
        t = t + h
        switch = active & (t >= nxt - 1e-15)
        if switch.any():
            to_ill = switch & liquid
            to_liq = switch & ~liquid
            frac = np.where(to_ill, jump_map(pi, p.L), frac)
            log_x = np.where(to_ill, log_x + math.log1p(-pi * p.L), log_x)
            regime = np.where(to_ill, 1, np.where(to_liq, 0, regime))
            k = int(switch.sum())
            rates = np.where(to_ill[switch], p.lambda10, p.lambda01)
            with np.errstate(divide="ignore"):
                draws = rng.exponential(1.0, size=k) / rates
            nxt[switch] = t[switch] + draws
    if not np.all(np.isfinite(acc)):
        raise Ruin("non-finite utility: wealth or consumption reached zero")
    scale = np.abs(log_x) if g == 0 else np.abs(np.exp(g * log_x) / g)
    return acc, float(np.mean(scale))


class _Moments:
    """Running mean and squared deviations, merged blockwise (Chan et al.)."""

    def __init__(self):
        self.n, self.mean, self.m2 = 0, 0.0, 0.0

    def add(self, values: np.ndarray) -> None:
        n_b = values.size
        mean_b = float(values.mean())
        m2_b = float(np.sum((values - mean_b) ** 2))
        n = self.n + n_b
        delta = mean_b - self.mean
        self.mean += delta * n_b / n
        self.m2 += m2_b + delta**2 * self.n * n_b / n
        self.n = n

    @property
    def std_err(self) -> float:
        if self.n < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


def evaluate_policy(p: ModelParams, policy: Policy, T_trunc: float = 150.0,
                    dt: float = 1.0 / 2000.0, n_paths: int = 100_000, seed: int = 0,
                    scheme: str = "segment", x0: float = 1.0,
                    rao_blackwell: bool = True) -> SimulationEstimate:
    """Expected discounted utility of ``policy`` starting liquid with wealth ``x0``.

    Utility is collected on ``[0, T_trunc]``; ``tail_bound`` estimates the
    remainder from the utility scale at the horizon. ``dt`` is used only by
    the Euler scheme. The segment scheme replaces the utility of each liquid
    spell by its conditional mean given the spell length and the Brownian
    endpoint; with ``rao_blackwell=False`` (log utility only) it draws the
    discounted Brownian integral exactly instead.

    Raises
    ------
    InvalidParams
        For invalid parameters, a nonpositive ``n_paths`` or an unknown scheme.
    Ruin
        If wealth or consumption hits zero along a path, which signals a
        policy that is not admissible for ``u(0) = -inf``.
    """
    validate_params(p)
    if n_paths < 1 or T_trunc <= 0 or dt <= 0:
        raise InvalidParams("need n_paths >= 1, T_trunc > 0 and dt > 0")
    if policy.gamma != p.gamma:
        raise InvalidParams("policy and parameters disagree on gamma")
    if scheme not in ("segment", "euler"):
        raise InvalidParams(f"unknown scheme {scheme!r}")
    if not rao_blackwell and p.gamma != 0:
        raise InvalidParams("realised-utility sampling is implemented for log utility only")
    log_x0 = math.log(x0)
    spell = None
    if scheme == "segment" and p.lambda01 > 0:
        spell = _illiquid_spell(p, policy, jump_map(policy.liquid_fraction, p.L), T_trunc)
    moments, scales = _Moments(), []
    n_blocks = -(-n_paths // BLOCK)
    for b in range(n_blocks):
        n = min(BLOCK, n_paths - b * BLOCK)
        rng = _rng(seed, b)
        if scheme == "segment":
            vals, scale = _segment_block(p, policy, spell, n, rng, T_trunc, log_x0,
                                         rao_blackwell)
        else:
            vals, scale = _euler_block(p, policy, n, rng, T_trunc, dt, log_x0)
        moments.add(vals)
        scales.append(scale * n)
    mean, se = moments.mean, moments.std_err
    tail = _tail_bound(p, policy, T_trunc, sum(scales) / n_paths)
    return SimulationEstimate(mean, se, n_paths, T_trunc, dt if scheme == "euler" else 0.0,
                              seed, tail, scheme)


@dataclass(frozen=True)
class PolicyComparison:
    """Paired estimate of ``value(a) - value(b)`` under common random numbers."""

    diff: float
    std_err: float
    a: SimulationEstimate
    b: SimulationEstimate


def compare_policies(p: ModelParams, a: Policy, b: Policy, T_trunc: float = 150.0,
                     n_paths: int = 100_000, seed: int = 0) -> PolicyComparison:
    """Segment-scheme comparison of two policies on the same random stream."""
    validate_params(p)
    spells = [_illiquid_spell(p, pol, jump_map(pol.liquid_fraction, p.L), T_trunc)
              if p.lambda01 > 0 else None for pol in (a, b)]
    diff, stats = _Moments(), [_Moments(), _Moments()]
    for blk in range(-(-n_paths // BLOCK)):
        n = min(BLOCK, n_paths - blk * BLOCK)
        va, _ = _segment_block(p, a, spells[0], n, _rng(seed, blk), T_trunc, 0.0)
        vb, _ = _segment_block(p, b, spells[1], n, _rng(seed, blk), T_trunc, 0.0)
        diff.add(va - vb)
        stats[0].add(va)
        stats[1].add(vb)

    def est(st):
        return SimulationEstimate(st.mean, st.std_err, n_paths, T_trunc, 0.0, seed,
                                  float("nan"), "segment")

    return PolicyComparison(diff.mean, diff.std_err, est(stats[0]), est(stats[1]))


# --- market paths ---------------------------------------------------------------

@dataclass(frozen=True)
class MarketPath:
    """Regime and price on a time grid that includes every switch time."""

    t: np.ndarray
    regime: np.ndarray
    S: np.ndarray
    switch_times: np.ndarray


def simulate_market_path(p: ModelParams, T: float, dt: float, seed: int = 0,
                         S0: float = 1.0, start_regime: int = 0) -> MarketPath:
    """One path of the regime chain and the stock price.

    Switch times are exact exponential draws; between grid points the price
    is an exact log-normal step while liquid and grows at ``alpha`` while
    frozen; each freeze onset multiplies the price by ``1 - L``. ``regime[k]``
    is the regime on ``[t[k], t[k+1])``.
    """
    validate_params(p)
    if T <= 0 or dt <= 0:
        raise InvalidParams("T and dt must be positive")
    rng = _rng(seed, 0)
    switches = []
    s, reg = 0.0, start_regime
    while True:
        rate = p.lambda01 if reg == 0 else p.lambda10
        if rate == 0:
            break
        s += rng.exponential(1.0 / rate)
        if s >= T:
            break
        switches.append(s)
        reg = 1 - reg
    switches = np.array(switches)
    grid = np.union1d(np.linspace(0.0, T, int(math.ceil(T / dt)) + 1), switches)
    regime = np.empty(grid.size, dtype=int)
    n_before = np.searchsorted(switches, grid, side="right")
    regime[:] = (start_regime + n_before) % 2
    z = rng.standard_normal(grid.size - 1)
    h = np.diff(grid)
    liquid = regime[:-1] == 0
    log_step = np.where(liquid, (p.mu - 0.5 * p.sigma**2) * h + p.sigma * np.sqrt(h) * z,
                        p.alpha * h)
    onsets = switches[0::2] if start_regime == 0 else switches[1::2]
    log_step += np.where(np.isin(grid[1:], onsets), math.log1p(-p.L) if p.L < 1 else -np.inf, 0.0)
    with np.errstate(over="ignore"):
        S = S0 * np.exp(np.concatenate(([0.0], np.cumsum(log_step))))
    return MarketPath(grid, regime, S, switches)


def simulate_regime_occupation(p: ModelParams, T: float, n_paths: int, seed: int = 0,
                               start_regime: int = 0) -> np.ndarray:
    """Fraction of ``[0, T]`` spent frozen, per path, from exact switch times."""
    validate_params(p)
    out = np.empty(n_paths)
    for b in range(-(-n_paths // BLOCK)):
        n = min(BLOCK, n_paths - b * BLOCK)
        rng = _rng(seed, b)
        t = np.zeros(n)
        frozen = np.zeros(n)
        reg = start_regime
        alive = np.ones(n, dtype=bool)
        while alive.any():
            rate = p.lambda01 if reg == 0 else p.lambda10
            if rate == 0:
                break
            tau = rng.exponential(1.0 / rate, size=n)
            end = np.minimum(t + tau, T)
            if reg == 1:
                frozen += np.where(alive, end - t, 0.0)
            t = np.where(alive, end, t)
            alive = t < T
            reg = 1 - reg
        if reg == 1 and p.lambda10 == 0:
            frozen += T - t
        out[b * BLOCK:b * BLOCK + n] = frozen / T
    return out


def inter_transition_times(p: ModelParams, n: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Liquid and frozen spell lengths from one long path (for distribution tests)."""
    rng = _rng(seed, 0)
    liquid = rng.exponential(1.0 / p.lambda01, size=n) if p.lambda01 > 0 else np.full(n, np.inf)
    frozen = rng.exponential(1.0 / p.lambda10, size=n)
    return liquid, frozen
