"""The fixed-budget resampling trade-off for the canonical GA.

At a fixed total evaluation budget, resampling each candidate rs times
divides the noise variance by rs but also divides the number of
generations by rs. Past a point, the lost iterations cost more than the
cleaner fitness buys, so cranking rs up stops helping.
"""

import numpy as np

from dpsea import CgaConfig, NoiseModel, RngState, make_function, run_cga


def main():
    fn = make_function("sphere")
    noise = NoiseModel(0.0, 1.0)
    total_eval = 100_000
    seeds = range(10)

    print(f"CGA on noisy sphere 5-D, sigma = 1, budget {total_eval} evaluations")
    print()
    print("  rs  iterations   median best    mean best")
    print("-" * 48)
    for rs in (1, 5, 20, 50, 100):
        bests = []
        for seed in seeds:
            cfg = CgaConfig(rs=rs, total_eval=total_eval)
            result = run_cga(fn, noise, cfg, RngState(100 + seed))
            bests.append(result.best_fitness)
        iterations = total_eval // (100 * rs)
        print(
            f"{rs:>4} {iterations:>11}   {np.median(bests):>11.5f}  "
            f"{np.mean(bests):>11.5f}"
        )

    print()
    print("few, well-measured generations lose to many, noisy ones here")


if __name__ == "__main__":
    main()
