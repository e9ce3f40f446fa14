"""Population- and individual-level quality measures.

Generation measures: IGD (mean distance from each reference point to its
nearest population member — the reference-to-population direction), exact
hypervolume for 2 or 3 objectives (Monte Carlo beyond that), Schott spacing
(city-block nearest-neighbor distances) and maximum spread (Euclidean norm
of the per-objective ranges).
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .core import GenerationRecord, Individual, ObjectiveVector, Origin, QualityPoint

MC_SAMPLES = 1_000_000


def igd(population_objectives, reference_set) -> float:
    """Mean over reference points of the distance to the nearest member."""
    pop = np.atleast_2d(np.asarray(population_objectives, dtype=float))
    ref = np.atleast_2d(np.asarray(reference_set, dtype=float))
    if pop.size == 0 or ref.size == 0:
        raise ValueError("igd requires non-empty population and reference set")
    return float(cdist(ref, pop).min(axis=1).mean())


def _dominating_points(points: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Keep points strictly below the reference in every coordinate."""
    if points.size == 0:
        return points.reshape(0, reference.shape[0])
    return points[np.all(points < reference, axis=1)]


def _hv2d(points: np.ndarray, reference: np.ndarray) -> float:
    pts = _dominating_points(points, reference)
    if len(pts) == 0:
        return 0.0
    order = np.argsort(pts[:, 0], kind="stable")
    xs = pts[order, 0]
    ys = np.minimum.accumulate(pts[order, 1])
    widths = np.diff(np.append(xs, reference[0]))
    return float(np.dot(widths, reference[1] - ys))


def _hv3d(points: np.ndarray, reference: np.ndarray) -> float:
    """Sweep along the third objective, maintaining the 2-D staircase.

    Between consecutive z-levels the dominated cross-section is the union of
    the boxes of all points already swept; the staircase insertion returns
    the area gained so slab volumes accumulate in one pass.
    """
    pts = _dominating_points(points, reference)
    if len(pts) == 0:
        return 0.0
    order = np.lexsort((pts[:, 0], pts[:, 1], pts[:, 2]))
    pts = pts[order]
    ref_x, ref_y, ref_z = (float(v) for v in reference)

    xs: list[float] = []  # strictly increasing
    ys: list[float] = []  # strictly decreasing, paired with xs
    area = 0.0
    volume = 0.0
    prev_z = float(pts[0, 2])
    for x, y, z in pts:
        x, y, z = float(x), float(y), float(z)
        volume += area * (z - prev_z)
        prev_z = z
        # skip points already dominated in 2-D
        idx = bisect_right(xs, x) - 1
        if idx >= 0 and ys[idx] <= y:
            continue
        pos = bisect_left(xs, x)
        y_cov = ys[pos - 1] if pos > 0 else ref_y
        gain = 0.0
        j = pos
        cur_x = x
        while j < len(xs) and ys[j] >= y:
            gain += (xs[j] - cur_x) * (y_cov - y)
            cur_x, y_cov = xs[j], ys[j]
            j += 1
        end_x = xs[j] if j < len(xs) else ref_x
        gain += (end_x - cur_x) * (y_cov - y)
        del xs[pos:j], ys[pos:j]
        xs.insert(pos, x)
        ys.insert(pos, y)
        area += gain
    volume += area * (ref_z - prev_z)
    return volume


def monte_carlo_hypervolume(
    population_objectives, reference_point, samples: int = MC_SAMPLES, seed: int = 0
) -> tuple[float, float]:
    """Hypervolume estimate and its standard error, by uniform sampling.

    Samples are drawn in the box spanned by the componentwise minimum of the
    points and the reference point; a sample counts when some point weakly
    dominates it.
    """
    pts = np.atleast_2d(np.asarray(population_objectives, dtype=float))
    ref = np.asarray(reference_point, dtype=float)
    pts = _dominating_points(pts, ref)
    if len(pts) == 0:
        return 0.0, 0.0
    lower = pts.min(axis=0)
    box = float(np.prod(ref - lower))
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = 100_000
    done = 0
    while done < samples:
        size = min(chunk, samples - done)
        u = rng.uniform(lower, ref, size=(size, len(ref)))
        hits += int(np.any(np.all(pts[None, :, :] <= u[:, None, :], axis=2), axis=1).sum())
        done += size
    frac = hits / samples
    stderr = box * math.sqrt(max(frac * (1.0 - frac), 0.0) / samples)
    return box * frac, stderr


def hypervolume(
    population_objectives, reference_point, *, mc_samples: int = MC_SAMPLES, mc_seed: int = 0
) -> float:
    """Measure of the region dominated by the set, relative to the reference.

    Exact for 2 and 3 objectives (sweep / slicing); Monte Carlo with
    ``mc_samples`` uniform draws beyond that. Points that do not dominate the
    reference contribute nothing; an empty dominated region yields 0.
    """
    pts = np.atleast_2d(np.asarray(population_objectives, dtype=float))
    ref = np.asarray(reference_point, dtype=float)
    if pts.shape[1] != ref.shape[0]:
        raise ValueError("reference point dimension mismatch")
    m = ref.shape[0]
    if m == 1:
        kept = _dominating_points(pts, ref)
        return float(ref[0] - kept.min()) if len(kept) else 0.0
    if m == 2:
        return _hv2d(pts, ref)
    if m == 3:
        return _hv3d(pts, ref)
    value, _ = monte_carlo_hypervolume(pts, ref, samples=mc_samples, seed=mc_seed)
    return value


def spacing(population_objectives) -> float:
    """Schott's spacing: spread of city-block nearest-neighbor distances.

    Defined as 0 for fewer than two points (no pair distances exist).
    """
    pts = np.atleast_2d(np.asarray(population_objectives, dtype=float))
    if len(pts) < 2:
        return 0.0
    d = cdist(pts, pts, metric="cityblock")
    np.fill_diagonal(d, np.inf)
    nearest = d.min(axis=1)
    mean = nearest.mean()
    return float(math.sqrt(np.sum((mean - nearest) ** 2) / (len(pts) - 1)))


def maximum_spread(population_objectives, reference_set=None) -> float:
    """Euclidean norm of per-objective ranges; optional reference normalization.

    With a reference set, each range is divided by the reference set's range
    on that objective before taking the norm.
    """
    pts = np.atleast_2d(np.asarray(population_objectives, dtype=float))
    if pts.size == 0:
        raise ValueError("maximum_spread requires a non-empty set")
    ranges = pts.max(axis=0) - pts.min(axis=0)
    if reference_set is not None:
        ref = np.atleast_2d(np.asarray(reference_set, dtype=float))
        ref_ranges = ref.max(axis=0) - ref.min(axis=0)
        ranges = np.divide(ranges, ref_ranges, out=np.zeros_like(ranges), where=ref_ranges > 0)
    return float(np.linalg.norm(ranges))


def nearest_reference_distance(individual_objective, reference_set) -> float:
    """Distance to the nearest reference point (convergence cue for dot sizes)."""
    ref = np.atleast_2d(np.asarray(reference_set, dtype=float))
    if ref.size == 0:
        raise ValueError("empty reference set")
    p = np.asarray(individual_objective, dtype=float)
    return float(np.sqrt(((ref - p) ** 2).sum(axis=1)).min())


def nearest_neighbor_distance(index: int, vectors) -> float:
    """Distance from vectors[index] to its nearest other member; inf if alone."""
    pts = np.atleast_2d(np.asarray(vectors, dtype=float))
    if len(pts) < 2:
        return math.inf
    d = np.sqrt(((pts - pts[index]) ** 2).sum(axis=1))
    d[index] = np.inf
    return float(d.min())


@dataclass(frozen=True)
class OriginStatistics:
    """Per-origin survived/died counts over one generation's candidate pool."""

    generation: int
    counts: dict[Origin, tuple[int, int]]

    def survived_total(self) -> int:
        return sum(s for s, _ in self.counts.values())

    def pool_total(self) -> int:
        return sum(s + d for s, d in self.counts.values())


def origin_statistics(
    record: GenerationRecord, individuals: dict[int, Individual] | None = None
) -> OriginStatistics:
    """Split the candidate pool of one generation by origin and survival."""
    roles = record.candidate_roles()
    survived = {m.individual_id: m.survived for m in record.selection.members()}
    counts = {
        origin: [0, 0]
        for origin in (
            Origin.RESERVED,
            Origin.MATING_POOL,
            Origin.CROSSOVER_OFFSPRING,
            Origin.MUTATED_OFFSPRING,
        )
    }
    for ind_id, origin in roles.items():
        slot = 0 if survived.get(ind_id, False) else 1
        counts[origin][slot] += 1
    return OriginStatistics(
        generation=record.index,
        counts={origin: (s, d) for origin, (s, d) in counts.items()},
    )


def quality_point(
    generation: int,
    population_objectives,
    reference_set,
    hv_reference_point: ObjectiveVector,
) -> QualityPoint:
    """All four generation measures over a surviving population."""
    return QualityPoint(
        generation=generation,
        igd=igd(population_objectives, reference_set),
        hv=hypervolume(population_objectives, hv_reference_point),
        sp=spacing(population_objectives),
        ms=maximum_spread(population_objectives),
    )


def hv_reference_from(reference_set, scale: float = 1.1) -> ObjectiveVector:
    """Hypervolume reference point: componentwise reference-set maximum, scaled."""
    ref = np.atleast_2d(np.asarray(reference_set, dtype=float))
    return tuple(float(v) for v in ref.max(axis=0) * scale)
