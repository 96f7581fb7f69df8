"""Monte Carlo value of the optimal policy against the solved value coefficient."""

import argparse

from liquidity_merton.coupled import solve_coupled
from liquidity_merton.log_utility import solve_log
from liquidity_merton.model import ModelParams
from liquidity_merton.montecarlo import evaluate_policy, policy_from_solution


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=100_000)
    parser.add_argument("--horizon", type=float, default=300.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    for p in (ModelParams(), ModelParams(gamma=-1.0, mu=0.1), ModelParams(gamma=0.5, mu=0.0625)):
        sol = solve_log(p) if p.is_log else solve_coupled(p)
        target = sol.b if p.is_log else sol.b / p.gamma
        est = evaluate_policy(p, policy_from_solution(sol), T_trunc=args.horizon,
                              n_paths=args.paths, seed=args.seed)
        z = (est.mean - target) / est.std_err
        print(f"gamma={p.gamma:+.1f} solved {target:.6f} mc {est.mean:.6f} +- {est.std_err:.6f} "
              f"z={z:+.2f} tail<={est.tail_bound:.1e}")


if __name__ == "__main__":
    main()
