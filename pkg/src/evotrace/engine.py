"""Instrumented generational loop producing a complete RunLog.

Generation indexing starts at 1; generation 0 is the random initial
population. Randomness comes from numpy Philox (counter-based) streams
derived per generation as SeedSequence(seed, spawn_key=(k,)), which makes a
run fully reproducible from its config and lets resume_run continue a log
with the exact stream a longer fresh run would have used.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .core import (
    GenerationRecord,
    Individual,
    MatingPair,
    MutationEvent,
    Origin,
    ProblemSpec,
    RunConfig,
    RunLog,
    SelectionRecord,
    validate_run_log,
)
from .metrics import hv_reference_from, quality_point
from .operators import (
    MatingStrategy,
    OperatorConfig,
    SelectionStrategy,
    environmental_select,
    mate,
    polynomial_mutation,
    sbx_crossover,
)
from .problems import evaluate, random_population, sample_reference_set

DEFAULT_REFERENCE_POINTS = 990


def make_run_config(
    problem: ProblemSpec,
    mu: int = 100,
    generations: int = 100,
    seed: int = 0,
    operators: OperatorConfig | None = None,
    reference_point_count: int = DEFAULT_REFERENCE_POINTS,
) -> RunConfig:
    """Resolve an OperatorConfig against a problem into a concrete RunConfig."""
    ops = operators or OperatorConfig()
    if mu < 2:
        raise ValueError(f"population size must be >= 2, got {mu}")
    if generations < 1:
        raise ValueError(f"generation count must be >= 1, got {generations}")
    ops.validate(mu)
    per_var = (
        1.0 / problem.n
        if ops.mutation_per_variable_probability is None
        else ops.mutation_per_variable_probability
    )
    return RunConfig(
        mu=mu,
        generations=generations,
        seed=seed,
        pair_count=ops.resolved_pair_count(mu),
        sbx_distribution_index=ops.sbx_distribution_index,
        sbx_perturbation_scale=ops.sbx_perturbation_scale,
        mutation_probability=ops.mutation_probability,
        mutation_distribution_index=ops.mutation_distribution_index,
        mutation_per_variable_probability=per_var,
        mating_strategy=ops.mating_strategy.value,
        reference_point_count=reference_point_count,
    )


def operator_config(config: RunConfig) -> OperatorConfig:
    """The OperatorConfig embedded in a stored RunConfig."""
    return OperatorConfig(
        pair_count=config.pair_count,
        sbx_distribution_index=config.sbx_distribution_index,
        sbx_perturbation_scale=config.sbx_perturbation_scale,
        mutation_probability=config.mutation_probability,
        mutation_distribution_index=config.mutation_distribution_index,
        mutation_per_variable_probability=config.mutation_per_variable_probability,
        mating_strategy=MatingStrategy(config.mating_strategy),
    )


def _generation_rng(seed: int, generation: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(generation,))))


def run(
    problem: ProblemSpec,
    algorithm: SelectionStrategy | str,
    config: RunConfig,
    reference_set=None,
) -> RunLog:
    """Run the full instrumented loop and return the complete RunLog.

    reference_set may be a list of objective vectors; by default the
    problem's analytic front is sampled with config.reference_point_count
    points. The hypervolume reference point is the componentwise reference
    maximum scaled by 1.1, fixed for the whole run.
    """
    strategy = SelectionStrategy(algorithm)
    if config.mu < 2:
        raise ValueError(f"population size must be >= 2, got {config.mu}")
    if config.generations < 1:
        raise ValueError(f"generation count must be >= 1, got {config.generations}")
    ops = operator_config(config)
    ops.validate(config.mu)

    reference_decisions = None
    if reference_set is None:
        reference_set, reference_decisions = sample_reference_set(
            problem, config.reference_point_count
        )
    else:
        reference_set = [tuple(float(v) for v in p) for p in reference_set]
    hv_reference = hv_reference_from(reference_set)

    init_rng = _generation_rng(config.seed, 0)
    individuals: dict[int, Individual] = {}
    for i, decision in enumerate(random_population(problem, config.mu, init_rng)):
        individuals[i] = Individual(
            id=i,
            birth_generation=0,
            origin=Origin.INITIAL,
            parent_ids=(),
            decision=decision,
            objective=evaluate(problem, decision),
        )

    log = RunLog(
        problem=problem,
        algorithm=strategy.value,
        config=config,
        individuals=individuals,
        generations=[],
        quality_series=[],
        reference_set=reference_set,
        hv_reference_point=hv_reference,
        reference_decisions=reference_decisions,
    )

    population = sorted(individuals)
    context = environmental_select(
        population, [individuals[i].objective for i in population],
        config.mu, strategy, hv_reference,
    )
    next_id = config.mu
    for k in range(1, config.generations + 1):
        population, context, next_id = _advance(
            log, strategy, ops, population, context, next_id, k
        )
    return log


def resume_run(log: RunLog, extra_generations: int) -> RunLog:
    """Extend a finished log; identical to a fresh run of the total length.

    The input log is validated first and never mutated; a new RunLog is
    returned. Resuming 0 generations returns the input unchanged.
    """
    if extra_generations < 0:
        raise ValueError("extra_generations must be >= 0")
    violations = validate_run_log(log)
    if violations:
        raise ValueError(
            "cannot resume an invalid log:\n" + "\n".join(violations)
        )
    if extra_generations == 0:
        return log

    done = len(log.generations)
    total = done + extra_generations
    extended = RunLog(
        problem=log.problem,
        algorithm=log.algorithm,
        config=replace(log.config, generations=total),
        individuals=dict(log.individuals),
        generations=list(log.generations),
        quality_series=list(log.quality_series),
        reference_set=list(log.reference_set),
        hv_reference_point=log.hv_reference_point,
        reference_decisions=(
            None if log.reference_decisions is None else list(log.reference_decisions)
        ),
    )
    strategy = SelectionStrategy(log.algorithm)
    ops = operator_config(log.config)
    population = extended.population_at(done)
    context = log.generations[-1].selection
    next_id = max(extended.individuals) + 1
    for k in range(done + 1, total + 1):
        population, context, next_id = _advance(
            extended, strategy, ops, population, context, next_id, k
        )
    return extended


def _advance(
    log: RunLog,
    strategy: SelectionStrategy,
    ops: OperatorConfig,
    population: list[int],
    context: SelectionRecord | None,
    next_id: int,
    k: int,
) -> tuple[list[int], SelectionRecord, int]:
    """Run one generation: mate, cross over, mutate, select, record."""
    problem = log.problem
    individuals = log.individuals
    bounds = problem.bounds
    rng = _generation_rng(log.config.seed, k)

    pairs_ids, reserved = mate(population, ops, context, rng)
    mating_pool = sorted({p for pair in pairs_ids for p in pair})
    reserved = sorted(reserved)

    evaluations = 0
    pairs: list[MatingPair] = []
    offspring_ids: list[int] = []
    for parent_a, parent_b in pairs_ids:
        oa, ob, beta, (pert_a, pert_b) = sbx_crossover(
            individuals[parent_a].decision,
            individuals[parent_b].decision,
            ops,
            bounds,
            rng,
        )
        created = []
        for vec in (oa, ob):
            decision = tuple(float(v) for v in vec)
            individuals[next_id] = Individual(
                id=next_id,
                birth_generation=k,
                origin=Origin.CROSSOVER_OFFSPRING,
                parent_ids=(parent_a, parent_b),
                decision=decision,
                objective=evaluate(problem, decision),
            )
            evaluations += 1
            created.append(next_id)
            next_id += 1
        pairs.append(
            MatingPair(
                parent_a_id=parent_a,
                parent_b_id=parent_b,
                offspring_ids=(created[0], created[1]),
                spread_factor=beta,
                perturbation_magnitudes=(
                    float(np.linalg.norm(pert_a)),
                    float(np.linalg.norm(pert_b)),
                ),
            )
        )
        offspring_ids.extend(created)

    mutation_events: list[MutationEvent] = []
    pool_offspring: list[int] = []
    for oid in offspring_ids:
        if rng.random() < ops.mutation_probability:
            pre = individuals[oid]
            mutated, delta = polynomial_mutation(pre.decision, ops, bounds, rng)
            decision = tuple(float(v) for v in mutated)
            individuals[next_id] = Individual(
                id=next_id,
                birth_generation=k,
                origin=Origin.MUTATED_OFFSPRING,
                parent_ids=(oid,),
                decision=decision,
                objective=evaluate(problem, decision),
            )
            evaluations += 1
            mutation_events.append(
                MutationEvent(
                    offspring_id=oid,
                    mutant_id=next_id,
                    delta=tuple(float(v) for v in delta),
                    pre_objective=pre.objective,
                )
            )
            # the pre-image is replaced in the pool by its mutant
            individuals[oid] = replace(pre, death_generation=k)
            pool_offspring.append(next_id)
            next_id += 1
        else:
            pool_offspring.append(oid)

    candidates = sorted(reserved + mating_pool + pool_offspring)
    selection = environmental_select(
        candidates,
        [individuals[i].objective for i in candidates],
        log.config.mu,
        strategy,
        log.hv_reference_point,
    )
    survivors = sorted(selection.survivor_ids())
    for member in selection.members():
        if not member.survived and individuals[member.individual_id].death_generation is None:
            individuals[member.individual_id] = replace(
                individuals[member.individual_id], death_generation=k
            )

    log.generations.append(
        GenerationRecord(
            index=k,
            reserved_ids=tuple(reserved),
            mating_pool_ids=tuple(mating_pool),
            mating_pairs=tuple(pairs),
            mutation_events=tuple(mutation_events),
            selection=selection,
            population_ids=tuple(survivors),
            evaluations=evaluations,
        )
    )
    log.quality_series.append(
        quality_point(
            k,
            [individuals[i].objective for i in survivors],
            log.reference_set,
            log.hv_reference_point,
        )
    )
    return survivors, selection, next_id
