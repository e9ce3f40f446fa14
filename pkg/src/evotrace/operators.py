"""Evolutionary operators: mating, SBX, polynomial mutation, selection.

Environmental selection follows a two-level abstraction: candidates are
grouped (non-dominated sorting, priority-ordered) and ranked within groups by
a fitness score — crowding distance for NSGA-II style selection, exclusive
hypervolume contribution for SMS-EMOA style selection. Whole groups survive
until the cut group, which is truncated score-descending; score ties at the
boundary keep the lower individual id.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import SelectionGroup, SelectionMember, SelectionRecord
from .metrics import hypervolume


class MatingStrategy(Enum):
    BINARY_TOURNAMENT = "binary_tournament"
    RANDOM_PAIRING = "random_pairing"


class SelectionStrategy(Enum):
    NSGA2 = "nsga2"
    SMS_EMOA = "smsemoa"


@dataclass(frozen=True)
class OperatorConfig:
    """Knobs for the per-generation operator pipeline.

    pair_count is the number of mating pairs per generation (None resolves to
    mu // 2, i.e. a full offspring budget of mu). mutation_probability is the
    chance an offspring is selected for mutation;
    mutation_per_variable_probability defaults to 1/n when None.
    """

    pair_count: int | None = None
    sbx_distribution_index: float = 15.0
    sbx_perturbation_scale: float = 0.0
    mutation_probability: float = 0.5
    mutation_distribution_index: float = 20.0
    mutation_per_variable_probability: float | None = None
    mating_strategy: MatingStrategy = MatingStrategy.BINARY_TOURNAMENT

    def resolved_pair_count(self, mu: int) -> int:
        lam = mu // 2 if self.pair_count is None else self.pair_count
        if lam < 0:
            raise ValueError("pair_count must be >= 0")
        if 2 * lam > mu:
            raise ValueError(f"2*pair_count ({2 * lam}) exceeds population size {mu}")
        return lam

    def validate(self, mu: int) -> None:
        self.resolved_pair_count(mu)
        for name in ("mutation_probability",):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        pv = self.mutation_per_variable_probability
        if pv is not None and not 0.0 <= pv <= 1.0:
            raise ValueError(f"mutation_per_variable_probability must be in [0, 1], got {pv}")
        if self.sbx_distribution_index <= 0 or self.mutation_distribution_index <= 0:
            raise ValueError("distribution indexes must be > 0")
        if self.sbx_perturbation_scale < 0:
            raise ValueError("sbx_perturbation_scale must be >= 0")


def _tournament_keys(selection_context: SelectionRecord) -> dict[int, tuple[int, float]]:
    keys = {}
    for position, group in enumerate(selection_context.groups):
        for member in group.members:
            keys[member.individual_id] = (position, -member.fitness_score)
    return keys


def mate(
    population_ids: Sequence[int],
    config: OperatorConfig,
    selection_context: SelectionRecord | None,
    rng: np.random.Generator,
) -> tuple[list[tuple[int, int]], list[int]]:
    """Split the previous population into mating pairs and a reserved set.

    Returns (pairs, reserved_ids); the union of pair members and the reserved
    ids is exactly the input population. Binary tournaments compare the
    previous generation's selection record (group priority first, fitness
    second); random pairing draws 2*pair_count distinct members.
    """
    ids = list(population_ids)
    mu = len(ids)
    lam = config.resolved_pair_count(mu)
    if lam == 0:
        return [], list(ids)

    pairs: list[tuple[int, int]] = []
    if config.mating_strategy == MatingStrategy.RANDOM_PAIRING:
        chosen = rng.permutation(mu)[: 2 * lam]
        for i in range(lam):
            pairs.append((ids[chosen[2 * i]], ids[chosen[2 * i + 1]]))
    else:
        if selection_context is None:
            raise ValueError("binary tournament mating needs the previous selection record")
        keys = _tournament_keys(selection_context)

        def decide(a: int, b: int) -> int:
            ka, kb = keys[a], keys[b]
            if ka == kb:
                return a if rng.random() < 0.5 else b
            return a if ka < kb else b

        # Tournament candidates come from shuffled passes over the population
        # so no individual is drawn more than twice per pass (bounds how often
        # an elite can reappear across pairs).
        winners: list[int] = []
        while len(winners) < 2 * lam:
            perm = rng.permutation(mu)
            for i in range(0, mu - 1, 2):
                winners.append(decide(ids[perm[i]], ids[perm[i + 1]]))
        for i in range(lam):
            first, second = winners[2 * i], winners[2 * i + 1]
            while second == first:
                a, b = rng.integers(0, mu, size=2)
                second = decide(ids[a], ids[b])
            pairs.append((first, second))

    in_pool = {p for pair in pairs for p in pair}
    reserved = [i for i in ids if i not in in_pool]
    return pairs, reserved


def sbx_spread_factor(u: float, eta: float) -> float:
    """Spread factor beta from a uniform draw, standard SBX density."""
    if u <= 0.5:
        return (2.0 * u) ** (1.0 / (eta + 1.0))
    return (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0))


def sbx_crossover(
    xa,
    xb,
    config: OperatorConfig,
    bounds,
    rng: np.random.Generator,
    beta: float | None = None,
) -> tuple[np.ndarray, np.ndarray, float, tuple[np.ndarray, np.ndarray]]:
    """Simulated binary crossover with one spread factor for the whole pair.

    oa = 0.5[(1+beta) xa + (1-beta) xb], ob the mirror image, so the parents
    and both offspring are collinear in decision space and oa + ob = xa + xb
    before any perturbation or clamping. An optional isotropic Gaussian
    perturbation (sbx_perturbation_scale) is added afterwards; results are
    clamped to bounds. Returns (oa, ob, beta, (perturbation_a, perturbation_b)).
    """
    xa = np.asarray(xa, dtype=float)
    xb = np.asarray(xb, dtype=float)
    if xa.shape != xb.shape:
        raise ValueError("parent decision vectors differ in length")
    if beta is None:
        beta = sbx_spread_factor(float(rng.random()), config.sbx_distribution_index)

    oa = 0.5 * ((1.0 + beta) * xa + (1.0 - beta) * xb)
    ob = 0.5 * ((1.0 - beta) * xa + (1.0 + beta) * xb)

    n = len(xa)
    if config.sbx_perturbation_scale > 0.0:
        pert_a = rng.normal(0.0, config.sbx_perturbation_scale, size=n)
        pert_b = rng.normal(0.0, config.sbx_perturbation_scale, size=n)
        oa = oa + pert_a
        ob = ob + pert_b
    else:
        pert_a = np.zeros(n)
        pert_b = np.zeros(n)

    b = np.asarray(bounds, dtype=float)
    oa = np.clip(oa, b[:, 0], b[:, 1])
    ob = np.clip(ob, b[:, 0], b[:, 1])
    return oa, ob, float(beta), (pert_a, pert_b)


def polynomial_mutation(
    x,
    config: OperatorConfig,
    bounds,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Bounded polynomial mutation; returns (mutated vector, delta).

    Each variable mutates with mutation_per_variable_probability (1/n when
    unset) using the polynomial perturbation with index
    mutation_distribution_index; the perturbation range is the distance to
    the variable's bounds, so results stay in bounds by construction.
    """
    x = np.asarray(x, dtype=float)
    b = np.asarray(bounds, dtype=float)
    lo, hi = b[:, 0], b[:, 1]
    n = len(x)
    eta = config.mutation_distribution_index
    p_var = (
        1.0 / n
        if config.mutation_per_variable_probability is None
        else config.mutation_per_variable_probability
    )

    mask = rng.random(n) < p_var
    u = rng.random(n)
    span = hi - lo
    d_lower = (x - lo) / span
    d_upper = (hi - x) / span

    left = u < 0.5
    exp = 1.0 / (eta + 1.0)
    val_left = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d_lower) ** (eta + 1.0)) ** exp - 1.0
    val_right = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d_upper) ** (eta + 1.0)) ** exp
    delta_q = np.where(left, val_left, val_right)

    mutated = np.where(mask, x + delta_q * span, x)
    mutated = np.clip(mutated, lo, hi)
    return mutated, mutated - x


def fast_nondominated_sort(objectives) -> list[list[int]]:
    """Partition indices into priority-ordered non-dominated fronts."""
    objs = np.atleast_2d(np.asarray(objectives, dtype=float))
    n = len(objs)
    if n == 0:
        raise ValueError("cannot sort an empty set")
    no_worse = np.all(objs[:, None, :] <= objs[None, :, :], axis=2)
    better = np.any(objs[:, None, :] < objs[None, :, :], axis=2)
    dominated_by = no_worse & better  # [i, j]: i dominates j
    dominator_counts = dominated_by.sum(axis=0)

    unassigned = np.ones(n, dtype=bool)
    fronts: list[list[int]] = []
    while unassigned.any():
        current = np.flatnonzero(unassigned & (dominator_counts == 0))
        fronts.append([int(i) for i in current])
        unassigned[current] = False
        dominator_counts = dominator_counts - dominated_by[current].sum(axis=0)
    return fronts


def crowding_distance(front_objectives) -> list[float]:
    """NSGA-II crowding distance over one front.

    Boundary points per objective get +inf; interior points sum the
    normalized neighbor gaps. Duplicate objective vectors beyond the first
    occurrence score 0 (duplicates carry no spread information), except in
    fronts of one or two points where everything is a boundary.
    """
    objs = np.atleast_2d(np.asarray(front_objectives, dtype=float))
    k = len(objs)
    if k == 0:
        raise ValueError("empty front")
    if k <= 2:
        return [float("inf")] * k

    uniq, first_index, inverse = np.unique(objs, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    u = len(uniq)
    dist = np.zeros(u)
    if u <= 2:
        dist[:] = np.inf
    else:
        for j in range(objs.shape[1]):
            order = np.argsort(uniq[:, j], kind="stable")
            vals = uniq[order, j]
            dist[order[0]] = np.inf
            dist[order[-1]] = np.inf
            span = vals[-1] - vals[0]
            if span > 0:
                dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span

    out = np.zeros(k)
    representative = first_index[inverse]
    for i in range(k):
        out[i] = dist[inverse[i]] if i == representative[i] else 0.0
    return [float(v) for v in out]


def _exclusive_volume(index: int, points: np.ndarray, reference: np.ndarray) -> float:
    """Volume dominated only by points[index] and by nothing else."""
    p = points[index]
    if np.any(p >= reference):
        return 0.0
    own = float(np.prod(reference - p))
    others = np.delete(points, index, axis=0)
    if len(others) == 0:
        return own
    clipped = np.maximum(others, p)
    return own - hypervolume(clipped, reference)


def hv_contribution(front_objectives, hv_reference_point) -> list[float]:
    """Exclusive hypervolume contribution of each point in the front.

    Equals HV(front) - HV(front without the point); points at or beyond the
    reference contribute 0.
    """
    pts = np.atleast_2d(np.asarray(front_objectives, dtype=float))
    ref = np.asarray(hv_reference_point, dtype=float)
    return [_exclusive_volume(i, pts, ref) for i in range(len(pts))]


def _sms_truncate(
    ids: list[int], objs: np.ndarray, reference: np.ndarray, keep: int
) -> tuple[list[float], list[bool]]:
    """Iterative greedy HV-contribution truncation of the cut front.

    Removes the minimal contributor one at a time (ties drop the higher id),
    recomputing after each removal. Contributions only grow as the set
    shrinks, so stale heap entries are lower bounds: entries are recomputed
    when popped and only trusted at the current version (lazy greedy).
    Recorded scores: removal-time contribution for eliminated members,
    post-truncation contribution for survivors.
    """
    k = len(ids)
    active = list(range(k))
    scores = [0.0] * k
    survived = [True] * k
    version = 0
    heap: list[tuple[float, int, int, int]] = []
    for i in active:
        value = _exclusive_volume(i, objs, reference)
        heapq.heappush(heap, (value, -ids[i], i, version))

    active_set = set(active)
    removals = k - keep
    for _ in range(removals):
        while True:
            value, neg_id, i, stamp = heapq.heappop(heap)
            if i not in active_set:
                continue
            if stamp == version:
                break
            current = _exclusive_volume_of(i, objs, active_set, reference)
            heapq.heappush(heap, (current, neg_id, i, version))
        active_set.remove(i)
        scores[i] = value
        survived[i] = False
        version += 1

    for i in active_set:
        scores[i] = _exclusive_volume_of(i, objs, active_set, reference)
    return scores, survived


def _exclusive_volume_of(
    index: int, points: np.ndarray, active: set[int], reference: np.ndarray
) -> float:
    p = points[index]
    if np.any(p >= reference):
        return 0.0
    own = float(np.prod(reference - p))
    others = [j for j in active if j != index]
    if not others:
        return own
    clipped = np.maximum(points[others], p)
    return own - hypervolume(clipped, reference)


def environmental_select(
    candidate_ids: Sequence[int],
    candidate_objectives,
    mu: int,
    strategy: SelectionStrategy | str,
    hv_reference_point=None,
) -> SelectionRecord:
    """Retain the best mu candidates; returns the full two-level record.

    Groups are non-dominated fronts in priority order. Whole fronts survive
    until the cut front, truncated by fitness score descending (crowding
    distance for NSGA2, hypervolume contribution for SMS_EMOA); score ties
    keep the lower id. Scores are recorded for non-survivors too.
    """
    strategy = SelectionStrategy(strategy)
    ids = [int(i) for i in candidate_ids]
    objs = np.atleast_2d(np.asarray(candidate_objectives, dtype=float))
    if len(ids) != len(objs):
        raise ValueError("candidate ids and objectives differ in length")
    if len(ids) < mu:
        raise ValueError(f"cannot select {mu} from {len(ids)} candidates")
    if strategy == SelectionStrategy.SMS_EMOA and hv_reference_point is None:
        raise ValueError("SMS_EMOA selection needs a hypervolume reference point")
    reference = None if hv_reference_point is None else np.asarray(hv_reference_point, dtype=float)

    fronts = fast_nondominated_sort(objs)
    groups: list[SelectionGroup] = []
    remaining = mu
    for rank, front in enumerate(fronts, start=1):
        front_ids = [ids[i] for i in front]
        front_objs = objs[front]
        if strategy == SelectionStrategy.NSGA2:
            scores = crowding_distance(front_objs)
        else:
            scores = hv_contribution(front_objs, reference)

        if len(front) <= remaining:
            survived = [True] * len(front)
            remaining -= len(front)
        elif remaining == 0:
            survived = [False] * len(front)
        elif strategy == SelectionStrategy.SMS_EMOA:
            scores, survived = _sms_truncate(front_ids, front_objs, reference, remaining)
            remaining = 0
        else:
            order = sorted(range(len(front)), key=lambda i: (-scores[i], front_ids[i]))
            survived = [False] * len(front)
            for i in order[:remaining]:
                survived[i] = True
            remaining = 0

        members = [
            SelectionMember(individual_id=front_ids[i], fitness_score=float(scores[i]), survived=survived[i])
            for i in range(len(front))
        ]
        members.sort(key=lambda m: (-m.fitness_score, m.individual_id))
        groups.append(SelectionGroup(rank=rank, members=tuple(members)))

    return SelectionRecord(prioritized=True, groups=tuple(groups))
