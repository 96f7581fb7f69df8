"""Experiment runners and deterministic CSV/JSON emission.

Each runner takes an :class:`~liquidity_merton.config.ExperimentConfig` and
returns a :class:`Report`: ``rows`` (a list of flat records, written as CSV or
as the ``rows`` member of the JSON output) and ``diagnostics`` (full-precision
solver information, JSON only).
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, presets, table1_configs, table1_fixture
from .coupled import solve_coupled
from .dks import dks_asymptotics_and_hom, dks_fraction_bracketed, dks_solve
from .errors import LiquidityModelError, UnsupportedModel
from .finite_horizon import solve_finite_horizon
from .hara import asymptotic_hara, solve_hyperbolic, table_loss
from .homogenized import fast_switching_params, homogenize
from .log_utility import asymptotic_log, solve_log
from .model import merton
from .montecarlo import evaluate_policy, policy_from_solution

TABLE1_COLUMNS = ("utility", "case", "pi_star", "pi_approx", "loss_pct", "loss_first_order_pct",
                  "error")


@dataclass
class Report:
    rows: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    columns: tuple | None = None


@dataclass
class Table1Row:
    """One benchmark-table row; losses in percent, ``error`` set if the row failed."""

    utility: str
    case: str
    pi_star: float = float("nan")
    pi_approx: float = float("nan")
    loss_pct: float = float("nan")
    loss_first_order_pct: float = float("nan")
    error: str = ""
    iterations: int = 0
    residual: float = float("nan")
    b: float = float("nan")
    merton_coeff: float = float("nan")

    def values(self) -> tuple[float, float, float, float]:
        return (self.pi_star, self.pi_approx, self.loss_pct, self.loss_first_order_pct)


def table1_row(utility: str, case: str, cfg: ExperimentConfig) -> Table1Row:
    """Coupled solution and first-order expansion for one row.

    Log utility reports the equivalent-wealth loss; power utility reports
    ``|1 - (b/f_hat)^(1/|gamma|)|`` for both the exact and the first-order
    value.
    """
    row = Table1Row(utility, case)
    try:
        p = cfg.model_params()
        sol = solve_coupled(p, tol=cfg.option("tol"))
        row.pi_star, row.b, row.merton_coeff = sol.pi_star, sol.b, sol.merton_coeff
        row.iterations, row.residual = sol.iterations, sol.residual
        if p.is_log:
            a = asymptotic_log(p)
            row.loss_pct = 100.0 * sol.theta
        else:
            a = asymptotic_hara(p)
            row.loss_pct = 100.0 * table_loss(sol.b, sol.merton_coeff, p.gamma)
        row.pi_approx = a.pi_approx(p.lambda01)
        if p.is_log:
            row.loss_first_order_pct = 100.0 * a.loss_approx(p.lambda01)
        else:
            row.loss_first_order_pct = 100.0 * table_loss(a.b_approx(p.lambda01), a.f_hat, p.gamma)
    except LiquidityModelError as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def _row_task(args):
    return table1_row(*args)


def run_table1(config: ExperimentConfig | None = None, n_jobs: int = 1) -> list[Table1Row]:
    """All 18 benchmark rows in fixture order; failing rows carry ``error``."""
    tasks = table1_configs(config)
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            return list(ex.map(_row_task, tasks))
    return [table1_row(*t) for t in tasks]


def table1_report(config: ExperimentConfig | None = None, n_jobs: int = 1) -> Report:
    rows = run_table1(config, n_jobs)
    printed = table1_fixture()["printed"]
    index = {r["case"]: i for i, r in enumerate(table1_fixture()["rows"])}
    diag = {"rows": []}
    for r in rows:
        d = asdict(r)
        d["printed"] = printed[r.utility][index[r.case]]
        diag["rows"].append(d)
    out = []
    for r in rows:
        out.append({"utility": r.utility, "case": r.case,
                    "pi_star": _fmt(r.pi_star, 3), "pi_approx": _fmt(r.pi_approx, 3),
                    "loss_pct": _fmt(r.loss_pct, 3),
                    "loss_first_order_pct": _fmt(r.loss_first_order_pct, 3), "error": r.error})
    return Report(out, diag, TABLE1_COLUMNS)


def _fmt(x: float, digits: int) -> str:
    return "nan" if not math.isfinite(x) else f"{x:.{digits}f}"


# --- figures -----------------------------------------------------------------

def figure1_data(config: ExperimentConfig | None = None) -> dict:
    """Illiquid consumption per unit wealth on ``pi`` in ``[0, 0.999]`` for each preset gamma."""
    config = config or ExperimentConfig(preset="fig1")
    base = config.model_params() if config.preset == "fig1" else \
        ExperimentConfig(preset="fig1", params=config.params).model_params()
    pi = np.linspace(0.0, 0.999, int(config.option("n_curve")))
    cols = {"gamma": [], "pi": [], "c_over_x": []}
    for g in presets()["fig1"]["gammas"]:
        sol = solve_coupled(base.replace(gamma=float(g)), tol=config.option("tol"),
                            residual_check=False)
        c = np.asarray(sol.c1_rate(pi), dtype=float)
        cols["gamma"].extend([float(g)] * pi.size)
        cols["pi"].extend(pi.tolist())
        cols["c_over_x"].extend(c.tolist())
    return cols


def figure2_data(config: ExperimentConfig | None = None) -> dict:
    """Finite-horizon relative utility ``1 - exp((h1 - h_hat)/k_hat)`` on the ``(t, pi)`` grid."""
    config = config or ExperimentConfig(preset="fig2")
    p = config.model_params()
    T = float(config.options.get("T", presets()["fig2"].get("T", 2.0)))
    sol = solve_finite_horizon(p, T, n_pi=int(config.option("n_pi")),
                               n_t=int(config.option("n_t")))
    tt, pp = np.meshgrid(sol.t_grid, sol.pi_grid, indexing="ij")
    return {"t": tt.ravel().tolist(), "pi": pp.ravel().tolist(),
            "loss": np.asarray(sol.loss_surface).ravel().tolist()}


def emit_figure_data(config: ExperimentConfig, figure: str) -> dict:
    """Columnar data for ``figure`` in ``{"fig1", "fig2"}``."""
    if figure == "fig1":
        return figure1_data(config)
    if figure == "fig2":
        return figure2_data(config)
    raise ValueError(f"unknown figure {figure!r}")


def _columns_to_rows(cols: dict) -> list[dict]:
    keys = list(cols)
    return [dict(zip(keys, vals)) for vals in zip(*(cols[k] for k in keys))]


# --- single-solver runs ------------------------------------------------------

def _solution_record(sol) -> dict:
    rec = {"b": sol.b, "pi_star": sol.pi_star, "theta": sol.theta}
    for name in ("theta_comp", "iterations", "residual", "merton_coeff"):
        if hasattr(sol, name):
            rec[name] = getattr(sol, name)
    return rec


def run_solver(config: ExperimentConfig) -> Report:
    """Run the solver selected by ``config.solver`` and collect its output."""
    p = config.model_params()
    m = merton(p)
    diag = {"solver": config.solver, "params": p.to_dict(), "merton_pi": m.pi_hat,
            "merton_value": m.value_coeff}
    s = config.solver
    if s == "closed-form":
        if p.is_log:
            sol = solve_log(p)
        elif p.gamma == -1:
            sol = solve_hyperbolic(p, coupled=config.option("coupled"), tol=config.option("tol"))
        else:
            raise UnsupportedModel("closed forms exist for gamma = 0 (alpha = r) and gamma = -1; "
                                   "use the coupled solver")
        rec = _solution_record(sol)
    elif s == "coupled":
        sol = solve_coupled(p, tol=config.option("tol"), coupled=config.option("coupled"))
        rec = _solution_record(sol)
    elif s == "asymptotic":
        a = asymptotic_log(p) if p.is_log else asymptotic_hara(p)
        rec = {"pi_approx": a.pi_approx(p.lambda01), "pi1": a.pi1, "b1": a.b1,
               "theta1": a.theta1}
        rec["loss_first_order"] = (a.loss_approx(p.lambda01) if p.is_log
                                   else table_loss(a.b_approx(p.lambda01), a.f_hat, p.gamma))
    elif s == "homogenized":
        L_bar = config.option("L_bar")
        h = homogenize(p, L_bar)
        rec = {k: v for k, v in asdict(h).items()}
        eps = config.option("eps")
        if eps is not None:
            sol = solve_coupled(fast_switching_params(p, float(eps), L_bar), tol=config.option("tol"))
            rec.update(eps=float(eps), theta_eps=sol.theta, pi_star_eps=sol.pi_star)
    elif s == "finite-horizon":
        T = float(config.option("T"))
        sol = solve_finite_horizon(p, T, n_pi=int(config.option("n_pi")),
                                   n_t=int(config.option("n_t")))
        rows = [{"t": float(t), "pi_star": float(ps), "h0": float(h0)}
                for t, ps, h0 in zip(sol.t_grid, sol.pi_star_t, sol.h0)]
        diag.update(T=T, steps=sol.surface.steps, floored_nodes=sol.surface.floored_nodes,
                    pi_star_0=float(sol.pi_star_t[0]))
        return Report(rows, diag, ("t", "pi_star", "h0"))
    elif s == "dks":
        T = float(config.option("T"))
        sol = dks_solve(p, T)
        asy = dks_asymptotics_and_hom(p, T, config.option("L_bar"))
        rows = [{"t": float(t), "theta": float(sol.theta(t)), "theta1": float(th1),
                 "theta_hom": float(thh)}
                for t, th1, thh in zip(asy.t, asy.theta1, asy.theta_hom)]
        diag.update(T=T, pi_star=sol.pi_star, pi_star_bracketed=dks_fraction_bracketed(p),
                    pi_first_order=asy.pi_first_order, pi_hom=asy.pi_hom,
                    consumption_gap=asy.consumption_gap)
        return Report(rows, diag, ("t", "theta", "theta1", "theta_hom"))
    elif s == "simulate":
        sol = solve_log(p) if p.is_log and p.alpha == p.r else solve_coupled(p, tol=config.option("tol"))
        est = evaluate_policy(p, policy_from_solution(sol), T_trunc=config.option("T_trunc"),
                              dt=config.option("dt"), n_paths=int(config.option("n_paths")),
                              seed=config.seed, scheme=config.option("scheme"))
        # value at unit wealth: b (log) or b / gamma (power)
        target = sol.b if p.is_log else sol.b / p.gamma
        rec = est.to_record()
        rec.update(b=sol.b, target=target,
                   z_score=(est.mean - target) / est.std_err if est.std_err > 0 else 0.0)
    else:
        raise ValueError(f"unknown solver {s!r}")
    rec = {k: _plain(v) for k, v in rec.items()}
    diag.update(rec)
    return Report([rec], diag, tuple(rec))


def _plain(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


# --- writers -----------------------------------------------------------------

def render(report: Report, fmt: str, config: ExperimentConfig | None = None) -> str:
    """Serialise a report; identical input gives byte-identical text."""
    if fmt == "json":
        doc = {"rows": report.rows, "diagnostics": report.diagnostics}
        if config is not None:
            doc["config"] = config.to_dict()
        return json.dumps(doc, indent=2, sort_keys=True, default=_plain) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    cols = list(report.columns or (report.rows[0].keys() if report.rows else []))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in report.rows:
        w.writerow({k: _plain(r.get(k, "")) for k in cols})
    return buf.getvalue()


def write_report(report: Report, fmt: str, path=None, config: ExperimentConfig | None = None) -> str:
    text = render(report, fmt, config)
    if path is not None:
        Path(path).write_text(text)
    return text
