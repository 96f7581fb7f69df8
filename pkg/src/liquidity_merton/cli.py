"""Command-line interface: ``liquidity-merton <subcommand> [options]``.

Exit status is 0 on success; on failure the error class is printed to stderr
and the status is taken from ``EXIT_CODES`` (first matching class).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import errors
from .config import ExperimentConfig, config_from_dict, load_config
from .reporting import (Report, _columns_to_rows, emit_figure_data, run_solver, table1_report,
                        write_report)

EXIT_CODES = (
    (errors.ParseError, 2),
    (errors.ConfigError, 2),
    (errors.InvalidParams, 3),
    (errors.DomainError, 3),
    (errors.InfiniteValue, 4),
    (errors.UnsupportedModel, 5),
    (errors.WrongRegime, 5),
    (errors.NoConvergence, 6),
    (errors.GridTooCoarse, 6),
    (errors.Ruin, 7),
    (errors.LiquidityModelError, 8),
)

SUBCOMMAND_SOLVER = {
    "solve-log": "closed-form",
    "solve-hara": "coupled",
    "coupled": "coupled",
    "homogenize": "homogenized",
    "finite-horizon": "finite-horizon",
    "dks": "dks",
    "simulate": "simulate",
}


def exit_code_for(exc: BaseException) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return 1


def _key_values(items, what: str) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise errors.ParseError(f"{what}: expected KEY=VALUE, got {item!r}")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--preset", help="named parameter preset")
    common.add_argument("--param", action="append", metavar="KEY=VALUE",
                        help="model parameter override, e.g. gamma=-1 (repeatable)")
    common.add_argument("--option", action="append", metavar="KEY=VALUE",
                        help="numerical option override, e.g. T=200 (repeatable)")
    parser = argparse.ArgumentParser(prog="liquidity-merton",
                                     description="Optimal consumption and investment with "
                                                 "liquidity freezes.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMAND_SOLVER:
        sub.add_parser(name, parents=[common])
    t1 = sub.add_parser("table1", parents=[common])
    t1.add_argument("--jobs", type=int, default=1, help="worker processes")
    fig = sub.add_parser("figures", parents=[common])
    fig.add_argument("--figure", choices=("fig1", "fig2"), default="fig1")
    return parser


def config_from_args(args) -> ExperimentConfig:
    data = load_config(args.config).to_dict() if args.config else {}
    if args.preset:
        data["preset"] = args.preset
    if args.param:
        data["params"] = {**data.get("params", {}), **_key_values(args.param, "--param")}
    if args.option:
        data["options"] = {**data.get("options", {}), **_key_values(args.option, "--option")}
    if args.seed is not None:
        data["seed"] = args.seed
    if args.format:
        data["format"] = args.format
    if args.out:
        data["out"] = args.out
    if args.command in SUBCOMMAND_SOLVER:
        data["solver"] = SUBCOMMAND_SOLVER[args.command]
    elif args.command == "figures" and not args.preset and "preset" not in data:
        data["preset"] = args.figure
    elif args.command == "table1":
        data.setdefault("preset", "table1")
    return config_from_dict(data)


def run(args) -> tuple[Report, ExperimentConfig, str]:
    cfg = config_from_args(args)
    first_error = ""
    if args.command == "table1":
        report = table1_report(cfg, n_jobs=args.jobs)
        first_error = next((r["error"] for r in report.rows if r["error"]), "")
    elif args.command == "figures":
        cols = emit_figure_data(cfg, args.figure)
        report = Report(_columns_to_rows(cols), {"figure": args.figure}, tuple(cols))
    else:
        p = cfg.model_params()
        if args.command == "solve-log" and not p.is_log:
            raise errors.UnsupportedModel("solve-log needs gamma = 0")
        if args.command == "solve-hara" and p.is_log:
            raise errors.UnsupportedModel("solve-hara needs gamma != 0")
        report = run_solver(cfg)
    return report, cfg, first_error


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, cfg, first_error = run(args)
    except errors.LiquidityModelError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    text = write_report(report, cfg.format, cfg.out, cfg)
    if cfg.out is None:
        sys.stdout.write(text)
    if first_error:
        print(f"row failed: {first_error}", file=sys.stderr)
        name = first_error.split(":", 1)[0]
        cls = getattr(errors, name, errors.LiquidityModelError)
        return exit_code_for(cls("row failed"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
