"""Independent brute-force oracles the implementation is checked against.

Everything here is deliberately naive (plain loops, subset enumeration) and
shares no code with the package internals.
"""

from __future__ import annotations

from itertools import combinations


def dominates_bf(a, b) -> bool:
    no_worse = True
    better = False
    for x, y in zip(a, b):
        if x > y:
            no_worse = False
        if x < y:
            better = True
    return no_worse and better


def nondominated_sort_bf(objectives) -> list[list[int]]:
    """Peel fronts by re-scanning the remaining set each round."""
    remaining = set(range(len(objectives)))
    fronts = []
    while remaining:
        front = [
            i
            for i in remaining
            if not any(dominates_bf(objectives[j], objectives[i]) for j in remaining if j != i)
        ]
        fronts.append(sorted(front))
        remaining -= set(front)
    return fronts


def box_volume(corner, reference) -> float:
    volume = 1.0
    for c, r in zip(corner, reference):
        side = r - c
        if side <= 0:
            return 0.0
        volume *= side
    return volume


def hv_inclusion_exclusion(points, reference) -> float:
    """Exact hypervolume by inclusion-exclusion over all subsets (<= ~10 pts)."""
    points = [tuple(p) for p in points]
    total = 0.0
    for size in range(1, len(points) + 1):
        for subset in combinations(points, size):
            corner = tuple(max(c[d] for c in subset) for d in range(len(reference)))
            total += (-1) ** (size + 1) * box_volume(corner, reference)
    return total


def hv_contributions_bf(points, reference) -> list[float]:
    """Leave-one-out contributions via the inclusion-exclusion hypervolume."""
    full = hv_inclusion_exclusion(points, reference)
    out = []
    for i in range(len(points)):
        rest = [p for j, p in enumerate(points) if j != i]
        out.append(full - (hv_inclusion_exclusion(rest, reference) if rest else 0.0))
    return out


def ancestor_set_bf(individuals, individual_id) -> set[int]:
    """Transitive parent closure (including the individual), plain recursion."""
    seen: set[int] = set()

    def walk(node: int) -> None:
        if node in seen:
            return
        seen.add(node)
        for parent in individuals[node].parent_ids:
            walk(parent)

    walk(individual_id)
    return seen


def common_ancestor_bf(individuals, ids):
    """Max-generation intersection of ancestor sets; (generation, sorted ids)."""
    shared = ancestor_set_bf(individuals, ids[0])
    for other in ids[1:]:
        shared &= ancestor_set_bf(individuals, other)
    if not shared:
        return None
    best = max(individuals[i].birth_generation for i in shared)
    return best, sorted(i for i in shared if individuals[i].birth_generation == best)
