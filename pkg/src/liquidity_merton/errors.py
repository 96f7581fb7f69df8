"""Exception hierarchy shared by all solvers."""


class LiquidityModelError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(LiquidityModelError, ValueError):
    """A model parameter violates a standing assumption."""


class DomainError(LiquidityModelError, ValueError):
    """An argument lies outside the domain of the function."""


class InfiniteValue(LiquidityModelError):
    """The Merton value is infinite (gamma > 0 and delta <= 0)."""


class UnsupportedModel(LiquidityModelError):
    """The requested closed form does not exist for these parameters."""


class WrongRegime(LiquidityModelError):
    """An asymptotic expansion was requested outside its regime of validity."""


class NoConvergence(LiquidityModelError):
    """An iterative solver failed to converge.

    ``trace`` holds whatever diagnostic history the solver collected.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class GridTooCoarse(LiquidityModelError):
    """A discretisation is too coarse for the requested accuracy or stability."""


class Ruin(LiquidityModelError):
    """Simulated wealth hit zero under a policy that should keep it positive."""


class ConfigError(LiquidityModelError, ValueError):
    """A configuration file could not be parsed or validated."""


class ParseError(ConfigError):
    """A configuration file is not valid JSON or has an unknown key."""
