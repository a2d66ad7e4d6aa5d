"""A quick tour of the benchmark functions and the noise model.

Evaluates each function at its known optimum, at the domain center, and at
a few random points, then shows how additive Gaussian noise and resampling
interact: averaging rs observations cuts the noise variance to sigma^2/rs
while costing rs evaluations.
"""

import numpy as np

from dpsea import NoiseModel, RngState, evaluate, make_function, optimum
from dpsea.benchmarks import FUNCTION_IDS
from dpsea.stochastics import Budget, resampled_fitness


def main():
    rng = np.random.default_rng(0)

    print("function landscape at a glance")
    print("-" * 62)
    for name in FUNCTION_IDS:
        fn = make_function(name)
        loc, val = optimum(fn)
        center = np.full(fn.dimension, (fn.lower_bound + fn.upper_bound) / 2.0)
        random_point = rng.uniform(fn.lower_bound, fn.upper_bound, fn.dimension)
        print(
            f"{name:<11} D={fn.dimension:<3} "
            f"bounds [{fn.lower_bound:g}, {fn.upper_bound:g}]"
        )
        print(f"  optimum value    {val:.6g}")
        print(f"  domain center    {evaluate(fn, center):.6g}")
        print(f"  random point     {evaluate(fn, random_point):.6g}")

    print()
    print("resampling vs noise: sphere at the origin, sigma = 1")
    print("-" * 62)
    fn = make_function("sphere")
    x = np.zeros(fn.dimension)
    noise = NoiseModel(0.0, 1.0)
    state = RngState(42)
    for rs in (1, 4, 16, 64):
        budget = Budget(pop_size=1, total_it=1, rs=rs)
        draws = np.array(
            [
                resampled_fitness(fn, x, rs, noise, state, budget)
                for _ in range(2000)
            ]
        )
        print(
            f"rs={rs:<3} observed std {draws.std():.4f}  "
            f"(theory {1.0 / np.sqrt(rs):.4f})  "
            f"evaluations spent {budget.total_eval}"
        )


if __name__ == "__main__":
    main()
