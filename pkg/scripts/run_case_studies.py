#!/usr/bin/env python3
"""Produce the two showcase runs used for interactive analysis.

Writes two fully instrumented runs (population 100, 500 generations):

  smsemoa-dtlz2   indicator-based selection on DTLZ2
  nsga2-dtlz3     dominance-based selection on the multimodal DTLZ3

Both use the broader crossover spread density the convergence experiments
use. Start the API afterwards with:  evotrace serve --runs-dir <out>
"""

import argparse
import time

import evotrace as et
from evotrace.store import save_run

CASES = [
    ("smsemoa-dtlz2", "smsemoa", "dtlz2", 12),
    ("nsga2-dtlz3", "nsga2", "dtlz3", 10),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs", help="directory to hold the run folders")
    parser.add_argument("--pop", type=int, default=100)
    parser.add_argument("--generations", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    operators = et.OperatorConfig(sbx_distribution_index=2.0, mutation_probability=1.0)
    for name, algorithm, problem_name, n in CASES:
        problem = et.get_problem(problem_name, n=n)
        config = et.make_run_config(
            problem,
            mu=args.pop,
            generations=args.generations,
            seed=args.seed,
            operators=operators,
        )
        start = time.time()
        log = et.run(problem, algorithm, config)
        elapsed = time.time() - start
        target = f"{args.out}/{name}"
        save_run(log, target)
        final = log.quality_series[-1]
        print(
            f"{name}: {elapsed:.1f}s, saved to {target} | "
            f"final igd={final.igd:.4f} hv={final.hv:.4f} sp={final.sp:.4f} ms={final.ms:.4f}"
        )


if __name__ == "__main__":
    main()
