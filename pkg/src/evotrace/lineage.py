"""Ancestry queries over the individual parent graph.

Crossover offspring link to two parents from the previous population;
mutants link to their same-generation crossover pre-image, whose own parents
carry the ancestry further. Reserved survival (the same individual present
across consecutive generations) is represented by RESERVED_SELF presence
edges inside ancestor trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import RunLog


class Relation(Enum):
    CROSSOVER = "crossover"
    MUTATION_PRE_IMAGE = "mutation_pre_image"
    RESERVED_SELF = "reserved_self"


@dataclass(frozen=True)
class LineageEdge:
    """child -> parent link; generation is where the child-side node appears.

    RESERVED_SELF edges have child_id == parent_id and mark the individual's
    presence at `generation` inherited from generation - 1.
    """

    child_id: int
    parent_id: int
    relation: Relation
    generation: int


@dataclass(frozen=True)
class LineageTree:
    root_id: int
    node_generations: dict[int, int]
    edges: tuple[LineageEdge, ...]


def _require(log: RunLog, individual_id: int) -> None:
    if individual_id not in log.individuals:
        raise KeyError(f"unknown individual id {individual_id}")


def ancestors(
    log: RunLog, individual_id: int, max_generations_back: int | None = None
) -> LineageTree:
    """Transitive parent closure of an individual, optionally depth-limited.

    Parents older than the cutoff (root birth minus max_generations_back) are
    not expanded. For each ancestor that survived from its birth up to the
    generation where it was used for mating, RESERVED_SELF edges record the
    survived span, clipped to the cutoff.
    """
    _require(log, individual_id)
    inds = log.individuals
    root = inds[individual_id]
    cutoff = (
        root.birth_generation - max_generations_back
        if max_generations_back is not None
        else 0
    )

    node_generations: dict[int, int] = {individual_id: root.birth_generation}
    edges: list[LineageEdge] = []
    # (id, generation at which this node participates)
    stack: list[tuple[int, int]] = [(individual_id, root.birth_generation)]
    seen: set[int] = {individual_id}
    while stack:
        node_id, used_at = stack.pop()
        node = inds[node_id]
        # survived span from birth up to the generation where it participated
        span_start = max(node.birth_generation, cutoff) + 1
        for g in range(span_start, used_at + 1):
            edges.append(LineageEdge(node_id, node_id, Relation.RESERVED_SELF, g))
        relation = (
            Relation.MUTATION_PRE_IMAGE if len(node.parent_ids) == 1 else Relation.CROSSOVER
        )
        for pid in node.parent_ids:
            parent = inds[pid]
            if parent.birth_generation < cutoff:
                continue
            edges.append(LineageEdge(node_id, pid, relation, node.birth_generation))
            node_generations[pid] = parent.birth_generation
            if pid not in seen:
                seen.add(pid)
                # a crossover parent participated at the generation before the
                # child's birth; a pre-image participates at the same generation
                participation = (
                    node.birth_generation
                    if relation == Relation.MUTATION_PRE_IMAGE
                    else node.birth_generation - 1
                )
                stack.append((pid, participation))

    edges.sort(key=lambda e: (e.generation, e.child_id, e.parent_id))
    return LineageTree(
        root_id=individual_id,
        node_generations=node_generations,
        edges=tuple(edges),
    )


def life_span(log: RunLog, individual_id: int) -> tuple[int, int | None]:
    """(birth generation, death generation); death is None while alive."""
    _require(log, individual_id)
    ind = log.individuals[individual_id]
    return ind.birth_generation, ind.death_generation


def ancestor_set(log: RunLog, individual_id: int) -> set[int]:
    """All ids reachable through parent links, including the individual."""
    _require(log, individual_id)
    out: set[int] = set()
    stack = [individual_id]
    while stack:
        node = stack.pop()
        if node in out:
            continue
        out.add(node)
        stack.extend(log.individuals[node].parent_ids)
    return out


def common_ancestor_set(log: RunLog, ids) -> tuple[int, list[int]] | None:
    """Most recent common ancestors: (generation, all ids at that generation).

    None when the ancestor sets are disjoint. A queried id counts as its own
    ancestor, so querying an individual together with its descendant returns
    the individual itself.
    """
    ids = list(ids)
    if len(ids) < 2:
        raise ValueError("common ancestors need at least two ids")
    shared = ancestor_set(log, ids[0])
    for other in ids[1:]:
        shared &= ancestor_set(log, other)
    if not shared:
        return None
    best_generation = max(log.individuals[i].birth_generation for i in shared)
    at_best = sorted(
        i for i in shared if log.individuals[i].birth_generation == best_generation
    )
    return best_generation, at_best


def common_ancestor(log: RunLog, ids) -> tuple[int, int] | None:
    """Canonical closest common ancestor: (ancestor id, its generation).

    Ties among equally recent ancestors resolve to the smallest id; the full
    tied set is available from common_ancestor_set.
    """
    found = common_ancestor_set(log, ids)
    if found is None:
        return None
    generation, at_best = found
    return at_best[0], generation
