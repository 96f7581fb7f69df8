"""Recompute the 18 benchmark rows and print them next to the published values."""

import argparse
import time

from liquidity_merton.config import table1_fixture
from liquidity_merton.reporting import run_table1


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    start = time.perf_counter()
    rows = run_table1(n_jobs=args.jobs)
    elapsed = time.perf_counter() - start
    fix = table1_fixture()
    index = {r["case"]: i for i, r in enumerate(fix["rows"])}
    print(f"{'utility':<12} {'case':<16} {'pi*':>7} {'pi~':>7} {'loss%':>8} {'loss1%':>8}   published")
    for r in rows:
        pub = fix["printed"][r.utility][index[r.case]]
        vals = " ".join(f"{v:>7.3f}" if i < 2 else f"{v:>8.3f}" for i, v in enumerate(r.values()))
        print(f"{r.utility:<12} {r.case:<16} {vals}   {pub} {r.error}")
    print(f"{len(rows)} rows in {elapsed:.1f}s")


if __name__ == "__main__":
    main()
