"""Analytic benchmark problems with exact Pareto-front reference sets.

Implements DTLZ1, DTLZ2, DTLZ3 (scalable objective count) and ZDT1. All are
minimization problems with box-bounded variables in [0, 1]. Reference sets
are generated deterministically from simplex-lattice weights mapped to each
problem's analytic front.

DTLZ3 is exposed with n = 10 by default (the 3-objective configuration used
in the case studies); the conventional k = 10 position-related variables
would give n = m - 1 + 10 instead. Pass ``n=`` explicitly to get either.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .core import DecisionVector, ObjectiveVector, ProblemSpec

PROBLEM_NAMES = ("dtlz1", "dtlz2", "dtlz3", "zdt1")

_DEFAULT_N = {"dtlz1": 7, "dtlz2": 12, "dtlz3": 10, "zdt1": 30}


def get_problem(name: str, n: int | None = None, m: int | None = None) -> ProblemSpec:
    """Build a ProblemSpec by name ("dtlz1", "dtlz2", "dtlz3", "zdt1")."""
    key = name.lower()
    if key not in PROBLEM_NAMES:
        raise ValueError(f"unknown problem {name!r}; expected one of {PROBLEM_NAMES}")
    if key == "zdt1":
        if m not in (None, 2):
            raise ValueError("zdt1 is a two-objective problem")
        m = 2
        if n is not None and n < 2:
            raise ValueError("zdt1 requires n >= 2")
    else:
        m = 3 if m is None else m
        if m < 2:
            raise ValueError("DTLZ problems need m >= 2")
    n = _DEFAULT_N[key] if n is None else n
    if n < m - 1:
        raise ValueError(f"{key} requires n >= m - 1 ({n} < {m - 1})")
    bounds = tuple((0.0, 1.0) for _ in range(n))
    return ProblemSpec(name=key, n=n, m=m, bounds=bounds)


def _check_in_bounds(problem: ProblemSpec, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (problem.n,):
        raise ValueError(f"decision vector length {arr.shape}, expected ({problem.n},)")
    lo = np.asarray(problem.lower())
    hi = np.asarray(problem.upper())
    if np.any(arr < lo) or np.any(arr > hi):
        raise ValueError(f"decision vector out of bounds for {problem.name}")
    return arr


def _dtlz1_objectives(x: np.ndarray, m: int) -> np.ndarray:
    xm = x[m - 1 :]
    g = 100.0 * (len(xm) + np.sum((xm - 0.5) ** 2 - np.cos(20.0 * np.pi * (xm - 0.5))))
    f = np.empty(m)
    for i in range(m):
        value = 0.5 * (1.0 + g)
        value *= np.prod(x[: m - 1 - i])
        if i > 0:
            value *= 1.0 - x[m - 1 - i]
        f[i] = value
    return f


def _dtlz_sphere_objectives(x: np.ndarray, m: int, g: float) -> np.ndarray:
    theta = x[: m - 1] * (np.pi / 2.0)
    f = np.empty(m)
    for i in range(m):
        value = 1.0 + g
        value *= np.prod(np.cos(theta[: m - 1 - i]))
        if i > 0:
            value *= np.sin(theta[m - 1 - i])
        f[i] = value
    return f


def evaluate(problem: ProblemSpec, x) -> ObjectiveVector:
    """Evaluate the problem's closed-form objectives at an in-bounds point."""
    arr = _check_in_bounds(problem, x)
    m = problem.m
    if problem.name == "dtlz1":
        f = _dtlz1_objectives(arr, m)
    elif problem.name == "dtlz2":
        xm = arr[m - 1 :]
        f = _dtlz_sphere_objectives(arr, m, float(np.sum((xm - 0.5) ** 2)))
    elif problem.name == "dtlz3":
        xm = arr[m - 1 :]
        g = 100.0 * (len(xm) + np.sum((xm - 0.5) ** 2 - np.cos(20.0 * np.pi * (xm - 0.5))))
        f = _dtlz_sphere_objectives(arr, m, float(g))
    elif problem.name == "zdt1":
        f1 = arr[0]
        g = 1.0 + 9.0 * np.sum(arr[1:]) / (problem.n - 1)
        f = np.array([f1, g * (1.0 - np.sqrt(f1 / g))])
    else:  # pragma: no cover - get_problem guards the name
        raise ValueError(f"unknown problem {problem.name!r}")
    return tuple(float(v) for v in f)


def _simplex_lattice(m: int, h: int) -> np.ndarray:
    """All weight vectors w >= 0 with sum h*w integer-valued, summing to 1."""
    points = []
    for dividers in combinations(range(h + m - 1), m - 1):
        prev = -1
        parts = []
        for d in dividers:
            parts.append(d - prev - 1)
            prev = d
        parts.append(h + m - 2 - prev)
        points.append(parts)
    return np.asarray(points, dtype=float) / h


def _lattice_size(m: int, h: int) -> int:
    return math.comb(h + m - 1, m - 1)


def sample_reference_set(
    problem: ProblemSpec, count_parameter: int
) -> tuple[list[ObjectiveVector], list[DecisionVector]]:
    """Deterministic points on the analytic Pareto front, with pre-images.

    count_parameter is the minimum number of points to produce; DTLZ problems
    use the smallest simplex lattice reaching it, ZDT1 spaces points evenly
    along f1. Returns (objective vectors, matching decision vectors).
    """
    if count_parameter < problem.m:
        raise ValueError(f"count_parameter {count_parameter} < objective count {problem.m}")
    m = problem.m
    if problem.name == "zdt1":
        f1 = np.linspace(0.0, 1.0, count_parameter)
        objectives = [(float(v), float(1.0 - np.sqrt(v))) for v in f1]
        decisions = [
            tuple([float(v)] + [0.0] * (problem.n - 1)) for v in f1
        ]
        return objectives, decisions

    h = 1
    while _lattice_size(m, h) < count_parameter:
        h += 1
    weights = _simplex_lattice(m, h)

    if problem.name == "dtlz1":
        front = 0.5 * weights
    elif problem.name in ("dtlz2", "dtlz3"):
        norms = np.linalg.norm(weights, axis=1, keepdims=True)
        front = weights / norms
    else:  # pragma: no cover
        raise ValueError(f"no analytic front for {problem.name!r}")

    objectives = [tuple(float(v) for v in row) for row in front]
    decisions = [_front_decision(problem, row) for row in front]
    return objectives, decisions


def _front_decision(problem: ProblemSpec, f: np.ndarray) -> DecisionVector:
    """Invert the front map: a decision vector that evaluates to f (g = 0)."""
    m, n = problem.m, problem.n
    x = np.full(n, 0.5)
    if problem.name == "dtlz1":
        # With g = 0 and w = 2f on the simplex, x_j = S_{m-j} / S_{m-j+1}
        # where S_i is the prefix sum of w.
        w = 2.0 * f
        prefix = np.concatenate(([0.0], np.cumsum(w)))
        for j in range(1, m):
            denom = prefix[m - j + 1]
            x[j - 1] = prefix[m - j] / denom if denom > 0 else 0.0
        return tuple(float(v) for v in x)
    # unit-sphere front: peel spherical coordinates from the last objective
    rem = f.copy()
    for i in range(m - 1):
        j = m - 1 - i  # objective index carrying sin(theta_{i})
        norm = float(np.linalg.norm(rem[: j + 1]))
        s = rem[j] / norm if norm > 0 else 0.0
        s = min(1.0, max(0.0, s))
        x[i] = 2.0 / np.pi * math.asin(s)
        rem = rem[:j]
    return tuple(float(v) for v in x)


def random_population(problem: ProblemSpec, size: int, rng: np.random.Generator) -> list[DecisionVector]:
    """size in-bounds decision vectors, each component uniform; seeded rng."""
    if size < 1:
        raise ValueError("population size must be >= 1")
    lo = np.asarray(problem.lower())
    hi = np.asarray(problem.upper())
    samples = rng.uniform(lo, hi, size=(size, problem.n))
    return [tuple(float(v) for v in row) for row in samples]
