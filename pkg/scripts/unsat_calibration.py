"""How often does the certifier call the UNSAT control flat?

Each seeded run aggregates the deciding trial of `repeats` BBHT runs
(S = repeats * shots) and certifies the merged histogram.
"""

import argparse
import json

import numpy as np

from leakgrover.certify import certify, chi2_quantile
from leakgrover.cli import derive_seed
from leakgrover.encoder import benchmark_instances
from leakgrover.grover import GroverSimulator, bbht_solve
from leakgrover.statevector import merge_counts


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=1000)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--shots", type=int, default=2000)
    ap.add_argument("--delta", type=float, default=0.01)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    cnf = benchmark_instances()[3].cnf
    sim = GroverSimulator(cnf)
    N = 1 << cnf.num_vars
    stats, pmax, flat = [], [], 0
    for seed in range(args.seeds):
        runs = [
            bbht_solve(cnf, shots_per_trial=args.shots, seed=derive_seed(seed, 4, i), sim=sim)
            for i in range(args.repeats)
        ]
        hist = merge_counts(r.final_counts for r in runs)
        rep = certify(hist, sum(hist.values()), N, args.delta)
        stats.append(rep.chi2_stat)
        pmax.append(rep.p_max)
        flat += rep.verdict == "ConsistentWithUnsat"

    summary = {
        "seeds": args.seeds,
        "S": args.repeats * args.shots,
        "consistent_rate": flat / args.seeds,
        "chi2_mean": float(np.mean(stats)),
        "chi2_var": float(np.var(stats)),
        "chi2_threshold": chi2_quantile(N - 1),
        "p_max_mean": float(np.mean(pmax)),
        "p_max_worst": float(np.max(pmax)),
        "spike_threshold": rep.spike_threshold,
    }
    if args.json:
        print(json.dumps(summary, indent=2))
        return
    for k, v in summary.items():
        print(f"{k:>16}: {v:.5g}" if isinstance(v, float) else f"{k:>16}: {v}")


if __name__ == "__main__":
    main()
