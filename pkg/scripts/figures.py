"""Write the consumption curves and the finite-horizon loss surface as CSV."""

import argparse
from pathlib import Path

from liquidity_merton.config import ExperimentConfig
from liquidity_merton.reporting import Report, _columns_to_rows, emit_figure_data, write_report


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="figures")
    args = parser.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for fig in ("fig1", "fig2"):
        cols = emit_figure_data(ExperimentConfig(preset=fig), fig)
        path = out / f"{fig}.csv"
        write_report(Report(_columns_to_rows(cols), {}, tuple(cols)), "csv", path)
        print(f"wrote {path} ({len(next(iter(cols.values())))} rows)")


if __name__ == "__main__":
    main()
