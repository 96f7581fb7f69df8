"""Compare the fast-switching limit loss with exact losses as the switching scale shrinks."""

from liquidity_merton.config import ExperimentConfig
from liquidity_merton.coupled import solve_coupled
from liquidity_merton.homogenized import fast_switching_params, homogenize


def main() -> None:
    print(f"{'gamma':>6} {'limit %':>9} " + " ".join(f"{'eps=' + str(e):>11}" for e in (0.3, 0.1, 0.03)))
    for gamma in (0.0, -1.0, 0.5):
        p = ExperimentConfig(preset="example1", params={"gamma": gamma}).model_params()
        limit = homogenize(p).theta_loss
        exact = [solve_coupled(fast_switching_params(p, e)).theta for e in (0.3, 0.1, 0.03)]
        print(f"{gamma:>6} {100 * limit:>9.4f} " + " ".join(f"{100 * x:>11.4f}" for x in exact))


if __name__ == "__main__":
    main()
