"""Infinite-horizon power utility (``gamma != 0``).

The illiquid value ``V1 = f(pi) x^gamma / gamma`` is described through
``phi(z) = K f(e^{-z}) - lambda10 B`` with ``K = rho - gamma r + lambda10``;
``phi`` solves the autonomous ODE ``phi' = gamma Htilde(phi)`` with

    Htilde(x) = K (x / (1 - gamma))^(1 - 1/gamma) - x - lambda10 B.

The generic solver (:func:`solve_phi_generic`) works with the equivalent
consumption-rate ODE (see :mod:`liquidity_merton.illiquid`); the closed
forms for ``gamma in {-1, 1/2, -1/2}`` below are independent checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NoConvergence, UnsupportedModel, WrongRegime
from .illiquid import IlliquidProfile
from .model import ModelParams, hara_delta, jump_map, jump_map_derivative, merton_hara
from .numerics import bracket_root, find_root, maximize_on_interval

# Extra scan points for the liquid-fraction search, clustered near the crunch.
_NEAR_ONE = 1.0 - np.array([1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5, 1e-6])


def _require_power(p: ModelParams):
    if p.gamma == 0:
        raise DomainError("power-utility routine called with gamma == 0")


def _f_hat(p: ModelParams) -> float:
    return merton_hara(p).require_finite().value_coeff


def boundary_f0(p: ModelParams, B: float | None = None) -> float:
    """Illiquid value multiplier at ``pi = 0`` (all cash).

    Root of ``H(x) = -(rho - gamma r + lambda10) x + (1 - gamma) x^(gamma/(gamma-1)) + lambda10 B``
    on ``(lambda10 B / K, inf)``, where ``H`` is positive at the left end and
    has exactly one sign change. ``B`` defaults to the Merton ``f_hat``.
    The root lies above ``f_hat`` for ``gamma < 0`` and below it for
    ``0 < gamma < 1`` (the all-cash investor is worse off in both cases).
    """
    _require_power(p)
    g = p.gamma
    if B is None:
        B = _f_hat(p)
    K = p.rho - g * p.r + p.lambda10
    k = g / (g - 1.0)

    def H(x):
        return -K * x + (1.0 - g) * x**k + p.lambda10 * B

    lo = p.lambda10 * B / K
    hi = max(lo, 1e-300) * 2.0 + 1.0
    while H(hi) > 0:
        hi *= 2.0
        if hi > 1e300:
            raise NoConvergence("boundary_f0: no sign change found")
    if lo == 0:
        lo = 1e-300
    return find_root(H, lo, hi, xtol=1e-15 * hi)


def solve_phi_generic(p: ModelParams, z_grid=None, B: float | None = None) -> IlliquidProfile:
    """Illiquid profile for power utility by quadrature + high-order integration.

    ``B`` is the liquid constant in the ``lambda10 (B - f)`` term: ``f_hat``
    (default) for the uncoupled system, the current liquid iterate for the
    coupled one. ``z_grid`` (optional) replaces the tabulation grid.
    """
    _require_power(p)
    if B is None:
        B = _f_hat(p)
    prof = IlliquidProfile(p, B)
    if z_grid is not None:
        prof.grid = np.asarray(z_grid, dtype=float)
        prof.values = prof.phi(prof.grid)
    return prof


def phi_rhs(p: ModelParams, B: float):
    """``phi'(z) = gamma Htilde(phi)``, vectorised."""
    g = p.gamma
    K = p.rho - g * p.r + p.lambda10
    A0 = p.lambda10 * B

    def rhs(x):
        x = np.asarray(x, dtype=float)
        return g * (K * (x / (1.0 - g)) ** (1.0 - 1.0 / g) - x - A0)

    return rhs


# --- closed forms -----------------------------------------------------------

@dataclass(frozen=True)
class HyperbolicProfile:
    """Closed-form illiquid shape for ``gamma = -1``.

    ``F(pi) = (1 + eta^2 + 2 eta (1 + pi^eta) / (1 - pi^eta)) / beta^2`` with
    ``beta = rho + r + lambda10`` and ``eta = sqrt(1 + beta lambda10 B)``.
    """

    beta: float
    eta: float
    B: float

    def F(self, pi):
        pi = np.asarray(pi, dtype=float)
        s = pi**self.eta
        with np.errstate(divide="ignore"):
            out = (1.0 + self.eta**2 + 2.0 * self.eta * (1.0 + s) / (1.0 - s)) / self.beta**2
        return float(out) if out.ndim == 0 else out

    def c1_rate(self, pi):
        """Illiquid consumption per unit wealth, ``beta (1 - s) / ((1 + eta) + s (eta - 1))`` with ``s = pi^eta``."""
        pi = np.asarray(pi, dtype=float)
        s = pi**self.eta
        out = self.beta * (1.0 - s) / ((1.0 + self.eta) + s * (self.eta - 1.0))
        return float(out) if out.ndim == 0 else out

    def c1_rate_printed(self, pi):
        """Square-root variant of the rate formula; agrees with :meth:`c1_rate` only at ``pi = 0``."""
        pi = np.asarray(pi, dtype=float)
        s = pi**self.eta
        e = self.eta
        out = self.beta * (1.0 - s) / np.sqrt((1.0 + s) * ((1.0 + e) ** 2 + s * (1.0 - e) ** 2))
        return float(out) if out.ndim == 0 else out

    def phi(self, z, lambda10: float):
        """Same shape in the ``phi`` variable."""
        return self.beta * self.F(np.exp(-np.asarray(z, dtype=float))) - lambda10 * self.B

    def F_prime(self, pi):
        pi = np.asarray(pi, dtype=float)
        s = pi**self.eta
        out = 4.0 * self.eta**2 * pi ** (self.eta - 1.0) / ((1.0 - s) ** 2 * self.beta**2)
        return float(out) if out.ndim == 0 else out

    # Interface shared with IlliquidProfile.
    def value(self, pi):
        return self.F(pi)

    def value_prime(self, pi):
        return self.F_prime(pi)

    def xi_prime(self, pi: float, L: float) -> float:
        gp = jump_map(pi, L)
        return float(self.F_prime(gp) * jump_map_derivative(pi, L) / (1.0 - pi * L)
                     + L * self.F(gp) / (1.0 - pi * L) ** 2)

    def xi(self, pi, L: float):
        pi = np.asarray(pi, dtype=float)
        out = self.F(jump_map(pi, L)) / (1.0 - pi * L)
        return float(out) if out.ndim == 0 else out


def closed_form_hyperbolic(p: ModelParams, B: float) -> HyperbolicProfile:
    if p.gamma != -1:
        raise UnsupportedModel("the hyperbolic closed form needs gamma == -1")
    if not B > 0:
        raise DomainError("B must be positive")
    beta = p.rho + p.r + p.lambda10
    return HyperbolicProfile(beta, math.sqrt(1.0 + beta * p.lambda10 * B), B)


def implicit_sqrt(p: ModelParams, z, B: float | None = None):
    """``phi(z)`` for ``gamma = 1/2`` from the partial-fraction implicit relation.

    With ``eta = sqrt(2 K + (lambda10 B)^2)`` and ``A = lambda10 B``::

        e^z = (1 + 2 phi/(eta + A))^(-1 - A/eta) (1 - 2 phi/(eta - A))^(-1 + A/eta).

    Solved for ``s = 1 - 2 phi / (eta - A)`` in log form so that values
    extremely close to the asymptote ``(eta - A)/2`` remain accurate.
    """
    if p.gamma != 0.5:
        raise UnsupportedModel("implicit_sqrt needs gamma == 0.5")
    if B is None:
        B = _f_hat(p)
    K = p.rho - 0.5 * p.r + p.lambda10
    A = p.lambda10 * B
    eta = math.sqrt(2.0 * K + A * A)
    top = eta - A

    def z_of_logs(ls):
        s = math.exp(ls)
        return (-(1.0 - A / eta) * ls
                - (1.0 + A / eta) * math.log1p(top * (1.0 - s) / (eta + A)))

    def one(zz):
        if zz <= 0:
            return 0.0
        lo = -1.0
        while z_of_logs(lo) < zz:
            lo *= 2.0
            if lo < -1e6:
                raise NoConvergence("implicit_sqrt: bracket failed")
        ls = find_root(lambda v: z_of_logs(v) - zz, lo, 0.0, xtol=1e-15)
        return 0.5 * top * (-math.expm1(ls))

    z_arr = np.asarray(z, dtype=float)
    out = np.vectorize(one, otypes=[float])(z_arr)
    return float(out) if z_arr.ndim == 0 else out


@dataclass(frozen=True)
class AbelRoots:
    """Real root ``h1`` and complex pair ``p +- i q`` of the ``gamma = -1/2`` cubic."""

    eta: float
    h1: float
    p: float
    q: float
    discriminant: float


def abel_roots(p: ModelParams, B: float | None = None) -> AbelRoots:
    if p.gamma != -0.5:
        raise UnsupportedModel("abel_roots needs gamma == -0.5")
    if B is None:
        B = _f_hat(p)
    K = p.rho + 0.5 * p.r + p.lambda10
    A = p.lambda10 * B
    D = 2.0 / 27.0 * K - 4.0 / 27.0 * K**2 * A**2
    if D >= 0:
        raise WrongRegime(f"cubic discriminant D={D} >= 0: three real roots")
    eta = 0.75 * K ** (2.0 / 3.0) * (4.0 * A + math.sqrt((4.0 * A) ** 2 - 8.0 / K)) ** (1.0 / 3.0)
    h1 = eta / K + 9.0 / (8.0 * eta)
    return AbelRoots(eta, h1, -0.5 * h1, math.sqrt(3.0) / 2.0 * (h1 - 9.0 / (4.0 * eta)), D)


def implicit_abel(p: ModelParams, z, B: float | None = None):
    """``phi(z)`` for ``gamma = -1/2`` on the branch ``phi > h1``.

    Inverts::

        log(|phi - h1| / sqrt((phi - p)^2 + q^2)) + (h1 - p)/q * arctan(q / (phi - p))
            = -(4/27) ((h1 - p)^2 + q^2) K z

    in the variable ``log(phi - h1)``.
    """
    roots = abel_roots(p, B)
    h1, pr, q = roots.h1, roots.p, roots.q
    K = p.rho + 0.5 * p.r + p.lambda10
    M = (h1 - pr) ** 2 + q**2

    def lhs(t):
        phi = h1 + math.exp(t)
        return (t - 0.5 * math.log((phi - pr) ** 2 + q**2)
                + (h1 - pr) / q * math.atan(q / (phi - pr)))

    def one(zz):
        if zz <= 0:
            return math.inf
        target = -4.0 / 27.0 * M * K * zz
        lo, hi = -5.0, 5.0
        while lhs(lo) > target:
            lo *= 2.0
            if lo < -1e4:
                return h1
        while lhs(hi) < target:
            hi *= 2.0
            if hi > 1e4:
                raise NoConvergence("implicit_abel: bracket failed")
        t = find_root(lambda v: lhs(v) - target, lo, hi, xtol=1e-14)
        return h1 + math.exp(t)

    z_arr = np.asarray(z, dtype=float)
    out = np.vectorize(one, otypes=[float])(z_arr)
    return float(out) if z_arr.ndim == 0 else out


# --- liquid regime ----------------------------------------------------------

def equivalent_wealth_loss(b: float, f_hat: float, gamma: float) -> float:
    """Fraction of wealth removed from a Merton investor to match value ``b``: ``1 - (b/f_hat)^(1/gamma)``."""
    return 1.0 - (b / f_hat) ** (1.0 / gamma)


def compensating_loss(b: float, f_hat: float, gamma: float) -> float:
    """Extra wealth needed under freezes to match the Merton value: ``(f_hat/b)^(1/gamma) - 1``."""
    return (f_hat / b) ** (1.0 / gamma) - 1.0


def table_loss(b: float, f_hat: float, gamma: float) -> float:
    """Tabulated loss ``|1 - (b / f_hat)^(1/|gamma|)|``.

    Equals the compensating loss for ``gamma < 0`` and the equivalent-wealth
    loss for ``gamma > 0``.
    """
    return abs(1.0 - (b / f_hat) ** (1.0 / abs(gamma)))


def _scan_points(gamma: float):
    return _NEAR_ONE if gamma < 0 else np.concatenate([_NEAR_ONE, [1.0]])


def liquid_objective(p: ModelParams, profile, b: float):
    """``pi -> b ((mu-r) pi - (1-gamma) sigma^2 pi^2 / 2) + lambda01 xi(pi) / gamma``."""
    g = p.gamma

    def obj(pi):
        pi = np.asarray(pi, dtype=float)
        q = (p.mu - p.r) * pi - 0.5 * (1.0 - g) * p.sigma**2 * pi**2
        if p.lambda01 == 0:
            return b * q
        with np.errstate(over="ignore", invalid="ignore"):
            val = b * q + p.lambda01 * profile.xi(pi, p.L) / g
        return np.where(np.isnan(val), -np.inf, val)

    return obj


def best_fraction(p: ModelParams, profile, b: float) -> tuple[float, float]:
    """Maximiser and maximum of :func:`liquid_objective` over ``[0, 1]``."""
    g = p.gamma
    upper = 1.0 if (g > 0 or p.lambda01 == 0) else 1.0 - 1e-9

    def slope(pi):
        d = b * ((p.mu - p.r) - (1.0 - g) * p.sigma**2 * pi)
        if p.lambda01 > 0:
            d += p.lambda01 * profile.xi_prime(pi, p.L) / g
        return d

    return maximize_on_interval(liquid_objective(p, profile, b), 0.0, upper, n_grid=201,
                                extra_points=_scan_points(g), derivative=slope)


def liquid_equation(p: ModelParams, profile, b: float) -> float:
    g = p.gamma
    _, sup = best_fraction(p, profile, b)
    return ((-p.rho + g * p.r - p.lambda01) / g * b
            + (1.0 - g) / g * b ** (g / (g - 1.0)) + sup)


def solve_liquid_b(p: ModelParams, profile, b_guess: float) -> tuple[float, float]:
    """Root ``b`` of the liquid-regime equation for a fixed illiquid profile."""
    fun = lambda b: liquid_equation(p, profile, b)  # noqa: E731
    a, c = bracket_root(fun, b_guess, 1e-3 * b_guess, lower=0.0)
    b = find_root(fun, a, c, xtol=1e-14 * b_guess)
    pi_star, _ = best_fraction(p, profile, b)
    return b, pi_star


@dataclass
class HaraSolution:
    """Liquid-regime solution for power utility.

    ``theta`` is the equivalent-wealth loss ``1 - (b/f_hat)^(1/gamma)``;
    ``theta_comp`` the compensating-wealth loss ``(f_hat/b)^(1/gamma) - 1``.
    """

    params: ModelParams
    b: float
    pi_star: float
    profile: object
    f_hat: float
    coupled: bool
    eta: float = float("nan")
    abel: AbelRoots | None = None
    iterations: int = 0
    trace: list = field(default_factory=list)

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def theta(self) -> float:
        return equivalent_wealth_loss(self.b, self.f_hat, self.gamma)

    @property
    def theta_comp(self) -> float:
        return compensating_loss(self.b, self.f_hat, self.gamma)

    @property
    def c0_rate(self) -> float:
        return self.b ** (1.0 / (self.gamma - 1.0))

    def c1_rate(self, pi):
        return self.profile.c1_rate(pi)

    def xi(self, pi):
        return self.profile.xi(pi, self.params.L)

    def illiquid_value(self, pi):
        return self.profile.value(pi)

    @property
    def liquid_coeff(self) -> float:
        return self.b


def solve_liquid_hara(p: ModelParams, profile=None) -> HaraSolution:
    """Solve the liquid equation for ``b`` and ``pi*`` against a fixed profile.

    With ``profile=None`` the uncoupled profile (built on ``f_hat``) is used.
    """
    _require_power(p)
    f_hat = _f_hat(p)
    if profile is None:
        profile = solve_phi_generic(p)
    b, pi_star = solve_liquid_b(p, profile, f_hat)
    return HaraSolution(p, b, pi_star, profile, f_hat, coupled=False)


def solve_hyperbolic(p: ModelParams, coupled: bool = True, tol: float = 1e-10,
                     damping: float = 0.5, max_iter: int = 200) -> HaraSolution:
    """``gamma = -1`` via the closed-form ``F``; coupled mode iterates ``B <-> eta``."""
    from .numerics import fixed_point

    if p.gamma != -1:
        raise UnsupportedModel("solve_hyperbolic needs gamma == -1")
    f_hat = _f_hat(p)
    if not coupled:
        prof = closed_form_hyperbolic(p, f_hat)
        b, pi_star = solve_liquid_b(p, prof, f_hat)
        return HaraSolution(p, b, pi_star, prof, f_hat, False, eta=prof.eta)

    def step(B):
        return solve_liquid_b(p, closed_form_hyperbolic(p, B), B)[0]

    res = fixed_point(step, f_hat, tol=tol, damping=damping, max_iter=max_iter)
    prof = closed_form_hyperbolic(p, res.value)
    b, pi_star = solve_liquid_b(p, prof, res.value)
    return HaraSolution(p, b, pi_star, prof, f_hat, True, eta=prof.eta,
                        iterations=res.iterations, trace=res.trace)


# --- asymptotics --------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticExpansion:
    """First-order small-``lambda01`` coefficients for power utility.

    Interior regime: ``b ~ f_hat + lambda01 b1`` and ``pi* ~ pi_hat + lambda01 pi1``
    with ``pi1`` in the tabulated convention; ``pi1_consistent`` is the
    coefficient obtained by expanding the first-order condition with ``b``
    held at its first-order value. ``theta1 = -b1 / (gamma f_hat)`` is the
    linear loss per unit ``lambda01``. Large-Sharpe regime (``gamma = -1``):
    ``1 - pi* ~ sqrt(lambda01) pi1``.
    """

    gamma: float
    pi_hat: float
    f_hat: float
    b1: float
    pi1: float
    theta1: float
    regime: str
    pi1_consistent: float = float("nan")
    pi1_printed: float = float("nan")

    def pi_approx(self, lambda01: float) -> float:
        if self.regime == "large_sharpe":
            return 1.0 - math.sqrt(lambda01) * self.pi1
        return self.pi_hat + lambda01 * self.pi1

    def b_approx(self, lambda01: float) -> float:
        return self.f_hat + lambda01 * self.b1

    def loss_approx(self, lambda01: float) -> float:
        """Compensating loss of the first-order value ``f_hat + lambda01 b1``."""
        return abs(compensating_loss(self.b_approx(lambda01), self.f_hat, self.gamma))


def asymptotic_hara(p: ModelParams) -> AsymptoticExpansion:
    """Expansion around Merton using the uncoupled illiquid profile (``pi_hat < 1``)."""
    _require_power(p)
    m = merton_hara(p).require_finite()
    if not m.pi_hat < 1:
        raise WrongRegime("interior expansion needs pi_hat < 1")
    g, f_hat, delta = p.gamma, m.value_coeff, m.delta
    prof = solve_phi_generic(p)
    xi_hat = prof.xi(m.pi_hat, p.L)
    dxi = prof.xi_prime(m.pi_hat, p.L)
    b1 = (xi_hat - f_hat) * (1.0 - g) / delta
    curv = g * (1.0 - g) * p.sigma**2 * f_hat
    pi1 = -((p.mu - p.r) * b1 - dxi) / curv
    pi1_consistent = dxi / curv
    return AsymptoticExpansion(g, m.pi_hat, f_hat, b1, pi1, -b1 / (g * f_hat), "interior",
                               pi1_consistent)


def large_sharpe_hyperbolic(p: ModelParams) -> AsymptoticExpansion:
    """Square-root expansion for ``gamma = -1`` when ``pi_hat > 1`` and ``mu - r > 2 sigma^2``.

    ``1 - pi* ~ sqrt(lambda01) * 2 / (beta sqrt(b0 (mu - r - 2 sigma^2)))`` with
    ``beta = rho + r + lambda10``. The leading liquid value ``b0`` (stored as
    ``f_hat``) is the Merton value with the fraction held at one, because the
    constraint binds; ``pi1_printed`` uses the unconstrained Merton value.
    """
    if p.gamma != -1:
        raise UnsupportedModel("large_sharpe_hyperbolic needs gamma == -1")
    m = merton_hara(p)
    if not (m.pi_hat > 1 and p.mu - p.r > 2 * p.sigma**2):
        raise WrongRegime("needs pi_hat > 1 and mu - r > 2 sigma^2")
    g = p.gamma
    excess = p.mu - p.r - 0.5 * (1.0 - g) * p.sigma**2
    b0 = ((1.0 - g) / hara_delta(p, 2.0 * (1.0 - g) * excess)) ** (1.0 - g)
    beta = p.rho + p.r + p.lambda10
    slope = p.mu - p.r - 2 * p.sigma**2
    pi1 = 2.0 / beta / math.sqrt(b0 * slope)
    printed = 2.0 / beta / math.sqrt(m.value_coeff * slope)
    return AsymptoticExpansion(-1.0, 1.0, b0, float("nan"), pi1, float("nan"),
                               "large_sharpe", pi1_printed=printed)
