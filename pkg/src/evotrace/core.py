"""Domain types shared by every module: individuals, operator traces, run logs.

Decision and objective vectors are plain tuples of floats; all record types
are frozen dataclasses, immutable after construction and safe to share across
threads. Ids are assigned run-wide in creation order (the initial population
gets 0..mu-1), so cross-generation references stay stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

DecisionVector = tuple[float, ...]
ObjectiveVector = tuple[float, ...]


class Origin(Enum):
    """Role an individual plays inside a generation's candidate pool.

    The four pool roles are RESERVED, MATING_POOL, CROSSOVER_OFFSPRING and
    MUTATED_OFFSPRING. INITIAL marks generation-0 individuals, which predate
    any mating split; from generation 1 on their per-generation role is read
    off the GenerationRecord (see ``origin_in_generation``).
    """

    INITIAL = "initial"
    RESERVED = "reserved"
    MATING_POOL = "mating_pool"
    CROSSOVER_OFFSPRING = "crossover_offspring"
    MUTATED_OFFSPRING = "mutated_offspring"


@dataclass(frozen=True)
class Individual:
    """A solution with its provenance links.

    parent_ids is empty for the initial population, one id for a mutant (the
    crossover pre-image) and two ids for a crossover offspring. death_generation
    is the generation whose environmental selection the individual failed
    (equal to birth_generation for pre-images replaced by their mutant), or
    None while it is still alive at the end of the log.
    """

    id: int
    birth_generation: int
    origin: Origin
    parent_ids: tuple[int, ...]
    decision: DecisionVector
    objective: ObjectiveVector
    death_generation: int | None = None

    @property
    def alive(self) -> bool:
        return self.death_generation is None


@dataclass(frozen=True)
class MatingPair:
    """One crossover event: two parents, two offspring, the spread factor."""

    parent_a_id: int
    parent_b_id: int
    offspring_ids: tuple[int, int]
    spread_factor: float
    perturbation_magnitudes: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class MutationEvent:
    """Links a mutant to its crossover pre-image.

    delta is the mutant's decision vector minus the pre-image's (after bound
    clamping). pre_objective stores the pre-image's evaluation; the pre-image
    itself never enters the candidate pool.
    """

    offspring_id: int
    mutant_id: int
    delta: tuple[float, ...]
    pre_objective: ObjectiveVector


@dataclass(frozen=True)
class SelectionMember:
    individual_id: int
    fitness_score: float
    survived: bool


@dataclass(frozen=True)
class SelectionGroup:
    rank: int
    members: tuple[SelectionMember, ...]


@dataclass(frozen=True)
class SelectionRecord:
    """Two-level environmental-selection trace: grouping plus fitness scores.

    When prioritized, groups are ordered by priority and a later group only
    has survivors once every member of all earlier groups survived. Within a
    group, survivors always score at least as high as non-survivors (score
    ties are broken toward the lower individual id).
    """

    prioritized: bool
    groups: tuple[SelectionGroup, ...]

    def survivor_ids(self) -> list[int]:
        return [m.individual_id for g in self.groups for m in g.members if m.survived]

    def members(self) -> Iterator[SelectionMember]:
        for group in self.groups:
            yield from group.members


@dataclass(frozen=True)
class GenerationRecord:
    """Complete operator trace of one generation.

    The candidate pool Q(k) is reserved_ids + mating_pool_ids + the pair
    offspring, with mutated offspring replacing their pre-images. evaluations
    counts objective evaluations performed during the generation: two per
    mating pair plus one per mutation event (the pre-image is evaluated for
    logging even though only its mutant enters the pool).
    """

    index: int
    reserved_ids: tuple[int, ...]
    mating_pool_ids: tuple[int, ...]
    mating_pairs: tuple[MatingPair, ...]
    mutation_events: tuple[MutationEvent, ...]
    selection: SelectionRecord
    population_ids: tuple[int, ...]
    evaluations: int

    def candidate_roles(self) -> dict[int, Origin]:
        """Map every member of Q(k) to its role in this generation."""
        mutated_pre_images = {e.offspring_id for e in self.mutation_events}
        roles: dict[int, Origin] = {}
        for i in self.reserved_ids:
            roles[i] = Origin.RESERVED
        for i in self.mating_pool_ids:
            roles[i] = Origin.MATING_POOL
        for pair in self.mating_pairs:
            for i in pair.offspring_ids:
                if i not in mutated_pre_images:
                    roles[i] = Origin.CROSSOVER_OFFSPRING
        for event in self.mutation_events:
            roles[event.mutant_id] = Origin.MUTATED_OFFSPRING
        return roles

    def candidate_ids(self) -> list[int]:
        return [m.individual_id for m in self.members_in_pool()]

    def members_in_pool(self) -> list[SelectionMember]:
        return [m for g in self.selection.groups for m in g.members]


@dataclass(frozen=True)
class QualityPoint:
    """Per-generation quality measures over the surviving population."""

    generation: int
    igd: float
    hv: float
    sp: float
    ms: float


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    n: int
    m: int
    bounds: tuple[tuple[float, float], ...]

    def lower(self) -> tuple[float, ...]:
        return tuple(lo for lo, _ in self.bounds)

    def upper(self) -> tuple[float, ...]:
        return tuple(hi for _, hi in self.bounds)


@dataclass(frozen=True)
class RunConfig:
    mu: int
    generations: int
    seed: int
    pair_count: int
    sbx_distribution_index: float
    sbx_perturbation_scale: float
    mutation_probability: float
    mutation_distribution_index: float
    mutation_per_variable_probability: float | None
    mating_strategy: str
    reference_point_count: int


@dataclass
class RunLog:
    """The persistent unit of analysis: one fully instrumented run."""

    problem: ProblemSpec
    algorithm: str
    config: RunConfig
    individuals: dict[int, Individual]
    generations: list[GenerationRecord]
    quality_series: list[QualityPoint]
    reference_set: list[ObjectiveVector]
    hv_reference_point: ObjectiveVector
    reference_decisions: list[DecisionVector] | None = None

    def population_at(self, generation: int) -> list[int]:
        """Population ids after generation k; k=0 is the initial population."""
        if generation == 0:
            return list(range(self.config.mu))
        return list(self.generations[generation - 1].population_ids)


def origin_in_generation(record: GenerationRecord, individual_id: int) -> Origin:
    """Role of a candidate-pool member in the given generation."""
    roles = record.candidate_roles()
    try:
        return roles[individual_id]
    except KeyError:
        raise KeyError(
            f"individual {individual_id} is not in generation {record.index}'s pool"
        ) from None


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """Pareto dominance for minimization: a is nowhere worse and somewhere better."""
    if len(a) != len(b):
        raise ValueError(f"objective length mismatch: {len(a)} vs {len(b)}")
    no_worse = all(x <= y for x, y in zip(a, b))
    return no_worse and any(x < y for x, y in zip(a, b))


def validate_run_log(log: RunLog) -> list[str]:
    """Check every structural invariant; returns one message per violation.

    Violations are data, not errors: an empty list means the log is
    well-formed.
    """
    out: list[str] = []
    mu = log.config.mu
    n, m = log.problem.n, log.problem.m
    lower, upper = log.problem.lower(), log.problem.upper()
    inds = log.individuals

    prev_id = None
    prev_birth = -1
    for ind_id in sorted(inds):
        ind = inds[ind_id]
        if ind.id != ind_id:
            out.append(f"individual {ind_id}: table key does not match id {ind.id}")
        if prev_id is not None and ind.birth_generation < prev_birth:
            out.append(
                f"individual {ind_id}: birth generation {ind.birth_generation} "
                f"precedes that of lower id {prev_id}"
            )
        prev_id, prev_birth = ind_id, max(prev_birth, ind.birth_generation)

        if len(ind.decision) != n:
            out.append(f"individual {ind_id}: decision length {len(ind.decision)}, expected {n}")
        else:
            for j, (x, lo, hi) in enumerate(zip(ind.decision, lower, upper)):
                if not lo <= x <= hi:
                    out.append(f"individual {ind_id}: decision[{j}]={x} outside [{lo}, {hi}]")
        if len(ind.objective) != m:
            out.append(f"individual {ind_id}: objective length {len(ind.objective)}, expected {m}")
        elif not all(math.isfinite(v) for v in ind.objective):
            out.append(f"individual {ind_id}: non-finite objective {ind.objective}")

        if ind.death_generation is not None and ind.death_generation < ind.birth_generation:
            out.append(
                f"individual {ind_id}: death generation {ind.death_generation} "
                f"before birth {ind.birth_generation}"
            )
        for pid in ind.parent_ids:
            if pid not in inds:
                out.append(f"individual {ind_id}: unknown parent id {pid}")
                continue
            if pid >= ind_id:
                out.append(f"individual {ind_id}: parent id {pid} not earlier in creation order")
            parent = inds[pid]
            if len(ind.parent_ids) == 2 and parent.birth_generation >= ind.birth_generation:
                out.append(
                    f"individual {ind_id}: crossover parent {pid} born at "
                    f"generation {parent.birth_generation}, not before {ind.birth_generation}"
                )
            if len(ind.parent_ids) == 1 and parent.birth_generation != ind.birth_generation:
                out.append(
                    f"individual {ind_id}: mutation pre-image {pid} born at "
                    f"generation {parent.birth_generation}, expected {ind.birth_generation}"
                )

    if len(log.generations) != log.config.generations:
        out.append(
            f"{len(log.generations)} generation records, config says {log.config.generations}"
        )
    if len(log.quality_series) != len(log.generations):
        out.append(
            f"quality series length {len(log.quality_series)} != "
            f"generation count {len(log.generations)}"
        )

    first_death: dict[int, int] = {}
    for k, rec in enumerate(log.generations, start=1):
        if rec.index != k:
            out.append(f"gen {k}: record index {rec.index} out of order")
        prev_pop = set(log.population_at(k - 1))

        reserved, pool = set(rec.reserved_ids), set(rec.mating_pool_ids)
        if reserved & pool:
            out.append(f"gen {k}: reserved and mating pool overlap: {sorted(reserved & pool)}")
        if reserved | pool != prev_pop:
            out.append(f"gen {k}: reserved ∪ mating pool does not equal previous population")

        offspring_ids: list[int] = []
        for pair in rec.mating_pairs:
            if pair.parent_a_id == pair.parent_b_id:
                out.append(f"gen {k}: pair with identical parents {pair.parent_a_id}")
            for pid in (pair.parent_a_id, pair.parent_b_id):
                if pid not in prev_pop:
                    out.append(f"gen {k}: pair parent {pid} not in previous population")
            offspring_ids.extend(pair.offspring_ids)
            for oid in pair.offspring_ids:
                ind = inds.get(oid)
                if ind is None:
                    out.append(f"gen {k}: unknown offspring id {oid}")
                elif ind.birth_generation != k:
                    out.append(f"gen {k}: offspring {oid} born at {ind.birth_generation}")
        if len(set(offspring_ids)) != len(offspring_ids):
            out.append(f"gen {k}: duplicate offspring ids across pairs")

        pre_images = set()
        for event in rec.mutation_events:
            if event.offspring_id not in offspring_ids:
                out.append(f"gen {k}: mutation pre-image {event.offspring_id} is not a pair offspring")
            pre_images.add(event.offspring_id)
            mutant = inds.get(event.mutant_id)
            pre = inds.get(event.offspring_id)
            if mutant is None or pre is None:
                out.append(f"gen {k}: mutation event references unknown individual")
                continue
            if len(event.delta) != n:
                out.append(f"gen {k}: mutation delta length {len(event.delta)}, expected {n}")
            elif any(
                abs(md - (pd + d)) > 1e-12
                for md, pd, d in zip(mutant.decision, pre.decision, event.delta)
            ):
                out.append(f"gen {k}: mutant {event.mutant_id} decision != pre-image + delta")
            if mutant.parent_ids != (event.offspring_id,):
                out.append(f"gen {k}: mutant {event.mutant_id} parent link != pre-image")

        pool_ids = (
            reserved
            | pool
            | {o for o in offspring_ids if o not in pre_images}
            | {e.mutant_id for e in rec.mutation_events}
        )
        expected_size = len(reserved) + len(pool) + 2 * len(rec.mating_pairs)
        if len(pool_ids) != expected_size:
            out.append(f"gen {k}: candidate pool size {len(pool_ids)}, expected {expected_size}")

        recorded = [member.individual_id for member in rec.selection.members()]
        if len(set(recorded)) != len(recorded):
            out.append(f"gen {k}: duplicate ids in selection record")
        if set(recorded) != pool_ids:
            out.append(f"gen {k}: selection record members do not match candidate pool")

        survivors = rec.selection.survivor_ids()
        if len(survivors) != mu:
            out.append(f"gen {k}: {len(survivors)} survivors, expected {mu}")
        if set(survivors) != set(rec.population_ids):
            out.append(f"gen {k}: population ids do not match selection survivors")
        if len(rec.population_ids) != mu:
            out.append(f"gen {k}: population size {len(rec.population_ids)}, expected {mu}")

        if rec.selection.prioritized:
            blocked = False
            for group in rec.selection.groups:
                survived_here = [m.survived for m in group.members]
                if blocked and any(survived_here):
                    out.append(f"gen {k}: group rank {group.rank} has survivors after a cut group")
                if not all(survived_here):
                    blocked = True
        for group in rec.selection.groups:
            dead_scores = [m.fitness_score for m in group.members if not m.survived]
            live_scores = [m.fitness_score for m in group.members if m.survived]
            if dead_scores and live_scores and min(live_scores) < max(dead_scores):
                out.append(
                    f"gen {k}: group rank {group.rank} survivor score "
                    f"{min(live_scores)} below non-survivor score {max(dead_scores)}"
                )

        for member in rec.selection.members():
            ind = inds.get(member.individual_id)
            if ind is None:
                out.append(f"gen {k}: selection references unknown id {member.individual_id}")
                continue
            if ind.birth_generation > k:
                out.append(
                    f"gen {k}: candidate {member.individual_id} born later "
                    f"(generation {ind.birth_generation})"
                )
            if not member.survived and member.individual_id not in first_death:
                first_death[member.individual_id] = k

    for ind_id, ind in inds.items():
        expected = first_death.get(ind_id)
        if expected is not None and ind.death_generation != expected:
            out.append(
                f"individual {ind_id}: death generation {ind.death_generation} "
                f"!= first selection failure at {expected}"
            )

    return out
