"""Command-line entry points: run, validate, measures, project, serve."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .core import validate_run_log
from .engine import DEFAULT_REFERENCE_POINTS, make_run_config, run
from .operators import MatingStrategy, OperatorConfig
from .problems import PROBLEM_NAMES, get_problem
from .service import RUNS_DIR_ENV, create_app
from .store import StoreError, load_run, load_tsne, save_run, save_tsne, tsne_cache_key
from .projection import fit_tsne


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evotrace")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an instrumented optimization")
    p_run.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
    p_run.add_argument("--algorithm", required=True, choices=("nsga2", "smsemoa"))
    p_run.add_argument("--pop", type=int, default=100, help="population size mu")
    p_run.add_argument("--generations", type=int, default=100)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--lambda", dest="pair_count", type=int, default=None,
                       help="mating pairs per generation (default mu/2)")
    p_run.add_argument("--mutation-prob", type=float, default=0.5,
                       help="probability an offspring is mutated")
    p_run.add_argument("--n", type=int, default=None, help="decision dimensionality")
    p_run.add_argument("--eta-c", type=float, default=15.0, help="SBX distribution index")
    p_run.add_argument("--eta-m", type=float, default=20.0, help="mutation distribution index")
    p_run.add_argument("--perturbation", type=float, default=0.0,
                       help="post-crossover perturbation scale (0 disables)")
    p_run.add_argument("--mating", choices=("binary_tournament", "random_pairing"),
                       default="binary_tournament")
    p_run.add_argument("--reference-points", type=int, default=DEFAULT_REFERENCE_POINTS)
    p_run.add_argument("--out", required=True, help="run directory to write")

    p_val = sub.add_parser("validate", help="check a stored run's invariants")
    p_val.add_argument("run_dir")

    p_meas = sub.add_parser("measures", help="recompute quality measures as CSV")
    p_meas.add_argument("run_dir")
    p_meas.add_argument("--csv", required=True, help="output CSV path")

    p_proj = sub.add_parser("project", help="precompute the t-SNE embedding for a range")
    p_proj.add_argument("run_dir")
    p_proj.add_argument("--from", dest="first", type=int, required=True)
    p_proj.add_argument("--to", dest="last", type=int, required=True)
    p_proj.add_argument("--perplexity", type=float, default=30.0)
    p_proj.add_argument("--iterations", type=int, default=1000)

    p_serve = sub.add_parser("serve", help="serve the HTTP query API")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--runs-dir", default=None,
                         help=f"runs directory (default ${RUNS_DIR_ENV} or ./runs)")

    return parser


def _cmd_run(args) -> int:
    problem = get_problem(args.problem, n=args.n)
    operators = OperatorConfig(
        pair_count=args.pair_count,
        sbx_distribution_index=args.eta_c,
        sbx_perturbation_scale=args.perturbation,
        mutation_probability=args.mutation_prob,
        mutation_distribution_index=args.eta_m,
        mating_strategy=MatingStrategy(args.mating),
    )
    config = make_run_config(
        problem,
        mu=args.pop,
        generations=args.generations,
        seed=args.seed,
        operators=operators,
        reference_point_count=args.reference_points,
    )
    log = run(problem, args.algorithm, config)
    manifest = save_run(log, args.out)
    final = log.quality_series[-1]
    print(
        f"saved {manifest['counts']['individuals']} individuals / "
        f"{manifest['counts']['generations']} generations to {args.out}"
    )
    print(f"final measures: igd={final.igd:.6g} hv={final.hv:.6g} sp={final.sp:.6g} ms={final.ms:.6g}")
    return 0


def _cmd_validate(args) -> int:
    log = load_run(args.run_dir, force=True)
    violations = validate_run_log(log)
    print(f"{len(violations)} violations")
    for message in violations:
        print(f"  {message}")
    return 0 if not violations else 1


def _cmd_measures(args) -> int:
    from .metrics import quality_point

    log = load_run(args.run_dir)
    out = Path(args.csv)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "igd", "hv", "sp", "ms"])
        for rec in log.generations:
            objectives = [log.individuals[i].objective for i in rec.population_ids]
            q = quality_point(rec.index, objectives, log.reference_set, log.hv_reference_point)
            writer.writerow([q.generation, repr(q.igd), repr(q.hv), repr(q.sp), repr(q.ms)])
    print(f"wrote {len(log.generations)} rows to {out}")
    return 0


def _cmd_project(args) -> int:
    log = load_run(args.run_dir)
    total = len(log.generations)
    if not 1 <= args.first <= args.last <= total:
        print(f"range [{args.first}, {args.last}] outside 1..{total}", file=sys.stderr)
        return 1
    union: set[int] = set()
    for k in range(args.first, args.last + 1):
        union.update(log.generations[k - 1].candidate_roles())
    union_ids = sorted(union)
    key = tsne_cache_key(args.first, args.last, args.perplexity, args.iterations, log.config.seed)
    if load_tsne(args.run_dir, key) is not None:
        print(f"embedding already cached (key {key})")
        return 0
    embedding = fit_tsne(
        [log.individuals[i].decision for i in union_ids],
        union_ids,
        perplexity=args.perplexity,
        iterations=args.iterations,
        seed=log.config.seed,
        progress=lambda it, total_iters: print(f"  iteration {it}/{total_iters}", end="\r") or True,
    )
    path = save_tsne(args.run_dir, key, embedding)
    print(f"\nfit {embedding.mode} over {len(union_ids)} points -> {path}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    app = create_app(args.runs_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cli_main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "validate": _cmd_validate,
        "measures": _cmd_measures,
        "project": _cmd_project,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (StoreError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
