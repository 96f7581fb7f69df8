"""Experiment configuration: JSON files, bundled presets and validation.

A config file is a JSON object with the keys listed in ``CONFIG_KEYS``; every
key is optional and unknown keys are rejected with their key path. Parameter
overrides are applied on top of the named preset and re-validated.
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path

from .errors import InvalidParams, ParseError
from .model import ModelParams, validate_params

SOLVERS = ("closed-form", "coupled", "asymptotic", "homogenized", "finite-horizon", "dks",
           "simulate")
FORMATS = ("csv", "json")

# Numerical overrides understood by the runners, with their defaults.
OPTION_DEFAULTS = {
    "tol": 1e-10,
    "n_pi": 400,
    "n_t": 201,
    "T": 2.0,
    "eps": None,
    "L_bar": 0.0,
    "n_paths": 100_000,
    "T_trunc": 150.0,
    "dt": 1.0 / 2000.0,
    "scheme": "segment",
    "coupled": True,
    "n_curve": 1000,
}

CONFIG_KEYS = ("preset", "params", "solver", "options", "format", "out", "seed")
PARAM_KEYS = tuple(f.name for f in fields(ModelParams))


def _load_json_resource(name: str) -> dict:
    return json.loads(resources.files("liquidity_merton.data").joinpath(name).read_text())


def presets() -> dict:
    """Bundled presets keyed by name."""
    return _load_json_resource("presets.json")


def table1_fixture() -> dict:
    """Row labels, overrides and printed values of the benchmark table."""
    return _load_json_resource("table1.json")


@dataclass
class ExperimentConfig:
    """A validated experiment description.

    ``params`` holds only the overrides applied on top of the preset;
    ``model_params()`` returns the resulting validated parameter set.
    ``options`` holds numerical overrides (keys of ``OPTION_DEFAULTS``).
    """

    preset: str = "base"
    params: dict = field(default_factory=dict)
    solver: str = "closed-form"
    options: dict = field(default_factory=dict)
    format: str = "csv"
    out: str | None = None
    seed: int = 0

    def model_params(self) -> ModelParams:
        p = ModelParams(**_merged_params(self.preset, self.params))
        try:
            return validate_params(p)
        except InvalidParams as exc:
            raise InvalidParams(f"params: {exc}") from None

    def option(self, name: str):
        return self.options.get(name, OPTION_DEFAULTS[name])

    def to_dict(self) -> dict:
        return copy.deepcopy(asdict(self))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())


def _merged_params(preset: str, overrides: dict) -> dict:
    """Preset parameters with overrides applied.

    A preset may carry ``mu_by_gamma``: the stock drift used for each utility
    exponent unless ``mu`` is overridden explicitly.
    """
    entry = presets()[preset]
    merged = {**entry["params"], **overrides}
    by_gamma = entry.get("mu_by_gamma", {})
    if "mu" not in overrides:
        gamma = float(merged.get("gamma", ModelParams.gamma))
        for key, mu in by_gamma.items():
            if float(key) == gamma:
                merged["mu"] = mu
    return {k: float(v) for k, v in merged.items()}


def _check_keys(obj: dict, allowed, path: str) -> None:
    for key in obj:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ParseError(f"unknown key '{where}'")


def config_from_dict(data: dict) -> ExperimentConfig:
    """Validate a parsed config object and fill defaults.

    Raises
    ------
    ParseError
        Unknown key or wrongly typed value, with the key path.
    InvalidParams
        Parameter overrides that violate a standing assumption, with the
        key path of the offending override.
    """
    if not isinstance(data, dict):
        raise ParseError("config must be a JSON object")
    _check_keys(data, CONFIG_KEYS, "")
    cfg = ExperimentConfig(**copy.deepcopy(data))
    if cfg.preset not in presets():
        raise ParseError(f"preset: unknown preset '{cfg.preset}'")
    if not isinstance(cfg.params, dict):
        raise ParseError("params: expected an object")
    _check_keys(cfg.params, PARAM_KEYS, "params")
    for key, value in cfg.params.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"params.{key}: expected a number, got {value!r}")
    if not isinstance(cfg.options, dict):
        raise ParseError("options: expected an object")
    _check_keys(cfg.options, OPTION_DEFAULTS, "options")
    if cfg.solver not in SOLVERS:
        raise ParseError(f"solver: expected one of {SOLVERS}, got {cfg.solver!r}")
    if cfg.format not in FORMATS:
        raise ParseError(f"format: expected one of {FORMATS}, got {cfg.format!r}")
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, int) or cfg.seed < 0:
        raise ParseError(f"seed: expected a nonnegative integer, got {cfg.seed!r}")
    if cfg.out is not None and not isinstance(cfg.out, str):
        raise ParseError("out: expected a string path")
    try:
        validate_params(ModelParams(**_merged_params(cfg.preset, cfg.params)))
    except InvalidParams as exc:
        bad = [k for k in cfg.params if re.search(rf"\b{k}\b", str(exc))]
        where = f"params.{bad[0]}" if bad else "params"
        raise InvalidParams(f"{where}: {exc}") from None
    return cfg


def loads_config(text: str) -> ExperimentConfig:
    """Parse config text; blank text gives the defaults."""
    if not text.strip():
        return ExperimentConfig()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)


def load_config(path) -> ExperimentConfig:
    return loads_config(Path(path).read_text())


def table1_configs(base: ExperimentConfig | None = None) -> list[tuple[str, str, ExperimentConfig]]:
    """The 18 benchmark-table rows as ``(utility, case, config)``."""
    base = base or ExperimentConfig(preset="table1")
    fix = table1_fixture()
    out = []
    for block in fix["blocks"]:
        for row in fix["rows"]:
            params = {**base.params, "gamma": block["gamma"], "mu": block["mu"], **row["overrides"]}
            cfg = ExperimentConfig(preset="table1", params=params, solver="coupled",
                                   options=dict(base.options), format=base.format,
                                   out=base.out, seed=base.seed)
            out.append((block["utility"], row["case"], cfg))
    return out
