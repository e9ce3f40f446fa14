#!/usr/bin/env python3
"""Multi-seed convergence report: final quality measures and IGD trajectory.

Used to establish typical final IGD for the acceptance thresholds and to
compare operator configurations.
"""

import argparse

import numpy as np

import evotrace as et


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--problem", default="dtlz2", choices=et.problems.PROBLEM_NAMES)
    parser.add_argument("--algorithm", default="nsga2", choices=("nsga2", "smsemoa"))
    parser.add_argument("--pop", type=int, default=100)
    parser.add_argument("--generations", type=int, default=250)
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--eta-c", type=float, default=2.0)
    parser.add_argument("--mutation-prob", type=float, default=1.0)
    args = parser.parse_args()

    problem = et.get_problem(args.problem)
    operators = et.OperatorConfig(
        sbx_distribution_index=args.eta_c, mutation_probability=args.mutation_prob
    )
    finals = []
    for seed in range(args.seeds):
        config = et.make_run_config(
            problem,
            mu=args.pop,
            generations=args.generations,
            seed=seed,
            operators=operators,
        )
        log = et.run(problem, args.algorithm, config)
        series = log.quality_series
        finals.append(series[-1].igd)
        checkpoints = [series[i] for i in (9, len(series) // 2, len(series) - 1)]
        trace = " -> ".join(f"igd={q.igd:.4f}/hv={q.hv:.4f}" for q in checkpoints)
        print(f"seed {seed}: {trace}")
    print(
        f"{args.algorithm} on {args.problem}: final IGD "
        f"mean={np.mean(finals):.4f} min={np.min(finals):.4f} max={np.max(finals):.4f}"
    )


if __name__ == "__main__":
    main()
