"""Mean BBHT tries on the SAT benchmarks, simulated and in closed form.

The closed form treats every trial as a single shot: with k the current
schedule value, r is uniform on {0..ceil(k)-1} and the trial succeeds with
probability sin^2((2r+1) theta). Comparing it with the simulated counts shows
how much the shot-mode candidate helps.
"""

import argparse
import math
from fractions import Fraction

import numpy as np

from leakgrover.encoder import benchmark_instances
from leakgrover.grover import GROWTH, GroverSimulator, bbht_solve, ceil_sqrt, default_budget, success_probability


def single_shot_expected_tries(n: int, K: int) -> float:
    N = 1 << n
    cap = ceil_sqrt(N)
    k = Fraction(1)
    alive, expected = 1.0, 0.0
    for i in range(default_budget(n)):
        m = math.ceil(k)
        p = sum(success_probability(n, K, r) for r in range(m)) / m
        expected += alive  # trial i+1 happens while still unsolved
        alive *= 1 - p
        k = min(GROWTH * k, Fraction(cap))
        if k * k > N:
            break
    return expected


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--shots", type=int, default=2000)
    args = ap.parse_args()

    print(f"{'case':>6} {'n':>3} {'K':>3} {'sat':>5} {'mean':>6} {'1-shot sim':>10} {'1-shot exact':>12}")
    for inst in benchmark_instances()[:3]:
        cnf = inst.cnf
        sim = GroverSimulator(cnf)
        reps = [bbht_solve(cnf, shots_per_trial=args.shots, seed=s, sim=sim) for s in range(args.seeds)]
        ones = [bbht_solve(cnf, shots_per_trial=1, seed=s, sim=sim) for s in range(args.seeds)]
        print(
            f"{inst.name:>6} {cnf.num_vars:>3} {inst.expected_K:>3} "
            f"{sum(r.verdict == 'SAT' for r in reps):>5} {np.mean([r.tries for r in reps]):>6.2f} "
            f"{np.mean([r.tries for r in ones]):>10.2f} "
            f"{single_shot_expected_tries(cnf.num_vars, inst.expected_K):>12.2f}"
        )


if __name__ == "__main__":
    main()
