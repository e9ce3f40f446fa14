"""Aligned 2-D layouts: PCA for objective space, exact t-SNE for decisions.

The PCA basis is fit once on the reference set and reused for every
generation's scatterplot, so positions are comparable across columns. t-SNE
is fit on the union of the decision vectors of all selected generations
(exact O(N^2) formulation, no tree approximation) and each generation's
layout is sliced out of the shared embedding by individual id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

EPS = 1e-12

TSNE_DEFAULT_PERPLEXITY = 30.0
TSNE_DEFAULT_ITERATIONS = 1000
TSNE_EARLY_EXAGGERATION = 12.0
TSNE_EXAGGERATION_ITERATIONS = 250
TSNE_MOMENTUM_EARLY = 0.5
TSNE_MOMENTUM_LATE = 0.8


class TsneCancelled(RuntimeError):
    """Raised when a progress callback asks the descent to stop."""


@dataclass(frozen=True)
class PcaModel:
    """Top-2 principal axes of the reference set (orthonormal rows)."""

    mean: tuple[float, ...]
    axes: tuple[tuple[float, ...], tuple[float, ...]]
    explained_variance: tuple[float, float]
    degenerate: bool = False


def fit_pca(reference_objectives) -> PcaModel:
    """Fit the shared 2-D basis: top eigenvectors of the covariance.

    Sign convention: the first nonzero component of each axis is positive.
    Rank-deficient inputs (fewer than two positive eigenvalues) keep an
    arbitrary orthonormal completion and set the degenerate flag.
    """
    points = np.atleast_2d(np.asarray(reference_objectives, dtype=float))
    if len(points) < 3:
        raise ValueError("PCA needs at least 3 reference points")
    if points.shape[1] < 2:
        raise ValueError("PCA needs at least 2 objectives")
    mean = points.mean(axis=0)
    centered = points - mean
    covariance = centered.T @ centered / len(points)
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = np.maximum(eigenvalues[order], 0.0)
    eigenvectors = eigenvectors[:, order]

    axes = []
    for j in range(2):
        axis = eigenvectors[:, j]
        nonzero = np.flatnonzero(np.abs(axis) > 1e-12)
        if len(nonzero) and axis[nonzero[0]] < 0:
            axis = -axis
        axes.append(tuple(float(v) for v in axis))

    total = float(eigenvalues.sum())
    fractions = (
        (float(eigenvalues[0] / total), float(eigenvalues[1] / total))
        if total > 0
        else (0.0, 0.0)
    )
    return PcaModel(
        mean=tuple(float(v) for v in mean),
        axes=(axes[0], axes[1]),
        explained_variance=fractions,
        degenerate=bool(np.sum(eigenvalues > 1e-12) < 2),
    )


def project(model: PcaModel, points) -> np.ndarray:
    """Project points onto the fitted axes; returns an (N, 2) array."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    mean = np.asarray(model.mean)
    if pts.shape[1] != mean.shape[0]:
        raise ValueError(f"point length {pts.shape[1]}, model expects {mean.shape[0]}")
    basis = np.asarray(model.axes)
    return (pts - mean) @ basis.T


def conditional_probabilities(
    vectors: np.ndarray, perplexity: float, tolerance: float = 1e-6, max_steps: int = 200
) -> tuple[np.ndarray, np.ndarray]:
    """Per-row Gaussian affinities calibrated to the target perplexity.

    Bandwidths (precisions) are found by per-row binary search until the
    realized entropy matches log(perplexity) within `tolerance` (nats).
    Returns (conditional P with zero diagonal, per-row log-perplexity errors).
    """
    n = len(vectors)
    distances_sq = squareform(pdist(vectors, "sqeuclidean"))
    target_entropy = math.log(perplexity)
    P = np.zeros((n, n))
    errors = np.zeros(n)
    for i in range(n):
        d = np.delete(distances_sq[i], i)
        beta, beta_min, beta_max = 1.0, 0.0, math.inf
        entropy, p = _row_entropy(d, beta)
        for _ in range(max_steps):
            if abs(entropy - target_entropy) <= tolerance:
                break
            if entropy > target_entropy:
                beta_min = beta
                beta = beta * 2.0 if beta_max is math.inf else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = (beta + beta_min) / 2.0
            entropy, p = _row_entropy(d, beta)
        errors[i] = entropy - target_entropy
        P[i, np.arange(n) != i] = p
    return P, errors


def _row_entropy(distances_sq: np.ndarray, beta: float) -> tuple[float, np.ndarray]:
    logits = -distances_sq * beta
    logits -= logits.max()
    p = np.exp(logits)
    total = p.sum()
    p /= total
    entropy = float(-(p[p > 0] * np.log(p[p > 0])).sum())
    return entropy, p


def joint_probabilities(vectors: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized affinities: P = (C + C^T) / (2N), floored at EPS."""
    conditional, _ = conditional_probabilities(vectors, perplexity)
    P = (conditional + conditional.T) / (2.0 * len(vectors))
    return np.maximum(P, EPS)


def kl_divergence_and_grad(P: np.ndarray, Y: np.ndarray) -> tuple[float, np.ndarray]:
    """KL(P || Q) for the Student-t embedding Q, with its analytic gradient.

    grad_i = 4 * sum_j (P_ij - Q_ij) * (1 + |y_i - y_j|^2)^-1 * (y_i - y_j)
    """
    dist_sq = squareform(pdist(Y, "sqeuclidean"))
    num = 1.0 / (1.0 + dist_sq)
    np.fill_diagonal(num, 0.0)
    Q = np.maximum(num / num.sum(), EPS)
    mask = ~np.eye(len(Y), dtype=bool)
    kl = float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))
    PQ = (P - Q) * num
    grad = 4.0 * (np.diag(PQ.sum(axis=1)) - PQ) @ Y
    return kl, grad


@dataclass(frozen=True)
class TsneEmbedding:
    """Shared 2-D embedding keyed by individual id."""

    coordinates: dict[int, tuple[float, float]]
    perplexity: float
    iterations: int
    seed: int
    final_kl: float
    kl_after_exaggeration: float
    mode: str  # "tsne" or "pca_fallback"

    def slice(self, ids: Sequence[int]) -> np.ndarray:
        return np.asarray([self.coordinates[i] for i in ids])


def fit_tsne(
    decision_vectors,
    ids: Sequence[int],
    perplexity: float = TSNE_DEFAULT_PERPLEXITY,
    iterations: int = TSNE_DEFAULT_ITERATIONS,
    seed: int = 0,
    learning_rate: float | None = None,
    progress: Callable[[int, int], bool] | None = None,
) -> TsneEmbedding:
    """Exact t-SNE over the union of decision vectors.

    Descent schedule: gradient descent with adaptive per-parameter gains,
    momentum 0.5 switching to 0.8 when early exaggeration (x12 on P) ends at
    iteration 250. learning_rate=None picks max(N / 48, 50) (the published
    "auto" rate; a fixed 200 reliably flings stragglers out of small inputs).
    Deterministic for a fixed seed. When the input has fewer than
    3 * perplexity points the embedding falls back to a PCA projection of the
    decision vectors (mode "pca_fallback").

    `progress(iteration, total)` is called every 25 iterations; returning
    False raises TsneCancelled.
    """
    X = np.atleast_2d(np.asarray(decision_vectors, dtype=float))
    ids = [int(i) for i in ids]
    if len(X) != len(ids):
        raise ValueError("ids and decision vectors differ in length")
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate ids in t-SNE input")

    if len(X) <= 3 * perplexity:
        coords = _pca_2d(X)
        return TsneEmbedding(
            coordinates={i: (float(x), float(y)) for i, (x, y) in zip(ids, coords)},
            perplexity=perplexity,
            iterations=0,
            seed=seed,
            final_kl=math.nan,
            kl_after_exaggeration=math.nan,
            mode="pca_fallback",
        )

    P = joint_probabilities(X, perplexity)
    if learning_rate is None:
        learning_rate = max(len(X) / (TSNE_EARLY_EXAGGERATION * 4.0), 50.0)
    rng = np.random.default_rng(seed)
    # PCA initialization rescaled to std 1e-4, plus seeded jitter: keeps the
    # descent deterministic per seed while avoiding flung-out stragglers that
    # pure random starts produce on small inputs.
    Y = _pca_2d(X)
    spread = Y[:, 0].std()
    if spread > 0:
        Y = Y / spread * 1e-4
    Y = Y + rng.normal(0.0, 1e-6, size=Y.shape)
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    kl_after_exaggeration = math.nan

    exaggerated = P * TSNE_EARLY_EXAGGERATION
    for it in range(iterations):
        exaggerating = it < TSNE_EXAGGERATION_ITERATIONS
        momentum = TSNE_MOMENTUM_EARLY if exaggerating else TSNE_MOMENTUM_LATE
        _, grad = kl_divergence_and_grad(exaggerated if exaggerating else P, Y)
        # per-parameter adaptive gains, as in the reference descent
        same_sign = (grad > 0) == (update > 0)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        gains = np.maximum(gains, 0.01)
        update = momentum * update - learning_rate * gains * grad
        Y = Y + update
        Y = Y - Y.mean(axis=0)
        if it == TSNE_EXAGGERATION_ITERATIONS - 1 or (exaggerating and it == iterations - 1):
            kl_after_exaggeration, _ = kl_divergence_and_grad(P, Y)
        if progress is not None and (it % 25 == 0 or it == iterations - 1):
            if progress(it + 1, iterations) is False:
                raise TsneCancelled(f"t-SNE cancelled at iteration {it + 1}")

    final_kl, _ = kl_divergence_and_grad(P, Y)
    return TsneEmbedding(
        coordinates={i: (float(x), float(y)) for i, (x, y) in zip(ids, Y)},
        perplexity=perplexity,
        iterations=iterations,
        seed=seed,
        final_kl=float(final_kl),
        kl_after_exaggeration=float(kl_after_exaggeration),
        mode="tsne",
    )


def _pca_2d(X: np.ndarray) -> np.ndarray:
    centered = X - X.mean(axis=0)
    if centered.shape[1] == 1:
        return np.column_stack([centered[:, 0], np.zeros(len(centered))])
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    return centered @ vt[:2].T


@dataclass(frozen=True)
class DensityGrid:
    """Gaussian KDE of projected reference points, max-normalized to 1."""

    width: int
    height: int
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    bandwidth: float
    values: tuple[float, ...]  # row-major, height rows of width cells


def density_grid(
    projected_points, resolution: tuple[int, int] = (64, 64), bandwidth: float | None = None
) -> DensityGrid:
    """Sample a Gaussian KDE of the points on a regular grid.

    The bounding box covers all points, padded by one bandwidth; cell values
    are normalized so the densest cell is 1. Default bandwidth is 1/25 of the
    larger box extent.
    """
    pts = np.atleast_2d(np.asarray(projected_points, dtype=float))
    if pts.size == 0:
        raise ValueError("density grid needs at least one point")
    width, height = resolution
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    extent = float(max(hi[0] - lo[0], hi[1] - lo[1]))
    if bandwidth is None:
        bandwidth = extent / 25.0 if extent > 0 else 1.0
    x_min, y_min = lo - bandwidth
    x_max, y_max = hi + bandwidth

    xs = np.linspace(x_min, x_max, width)
    ys = np.linspace(y_min, y_max, height)
    gx, gy = np.meshgrid(xs, ys)
    cells = np.column_stack([gx.ravel(), gy.ravel()])
    sq = ((cells[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    density = np.exp(-sq / (2.0 * bandwidth**2)).sum(axis=1)
    peak = density.max()
    if peak > 0:
        density = density / peak
    return DensityGrid(
        width=width,
        height=height,
        x_min=float(x_min),
        x_max=float(x_max),
        y_min=float(y_min),
        y_max=float(y_max),
        bandwidth=float(bandwidth),
        values=tuple(float(v) for v in density),
    )
