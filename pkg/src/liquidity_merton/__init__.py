"""Optimal consumption and investment with random liquidity freezes.

The market alternates between a liquid regime (a geometric Brownian stock)
and freezes during which the stock cannot be traded. The package solves the
infinite-horizon problem for log and power utility, its small-freeze-rate
and fast-switching limits, a finite-horizon log problem, a terminal-wealth
variant, and verifies the solutions by Monte Carlo simulation.
"""

from .coupled import CoupledSolution, hjb_residual, solve_coupled
from .errors import (ConfigError, DomainError, GridTooCoarse, InfiniteValue, InvalidParams,
                     LiquidityModelError, NoConvergence, ParseError, Ruin, UnsupportedModel,
                     WrongRegime)
from .hara import (HaraSolution, asymptotic_hara, closed_form_hyperbolic, implicit_abel,
                   implicit_sqrt, large_sharpe_hyperbolic, solve_hyperbolic, solve_phi_generic,
                   table_loss)
from .homogenized import HomogenizedSolution, fast_switching_params, homogenize
from .log_utility import LogSolution, asymptotic_log, large_sharpe_log, solve_log
from .model import ModelParams, jump_map, merton, validate_params

__all__ = [
    "ConfigError", "CoupledSolution", "DomainError", "GridTooCoarse", "HaraSolution",
    "HomogenizedSolution", "InfiniteValue", "InvalidParams", "LiquidityModelError", "LogSolution",
    "ModelParams", "NoConvergence", "ParseError", "Ruin", "UnsupportedModel", "WrongRegime",
    "asymptotic_hara", "asymptotic_log", "closed_form_hyperbolic", "fast_switching_params",
    "hjb_residual", "homogenize", "implicit_abel", "implicit_sqrt", "jump_map",
    "large_sharpe_hyperbolic", "large_sharpe_log", "merton", "solve_coupled", "solve_hyperbolic",
    "solve_log", "solve_phi_generic", "table_loss", "validate_params",
]
