"""Gromov products and the four-point hyperbolicity constant."""

import logging
from typing import Optional, Sequence

import numpy as np

from models.config import DEFAULT_SEED
from models.errors import DomainViolationError
from models.geometry import ComplexPoint2
from models.oracle import MetricOracle

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 60
SAMPLED_QUADRUPLES = 10_000_000
QUADRUPLE_CHUNK = 1_000_000


def gromov_product(d: MetricOracle, x: ComplexPoint2, y: ComplexPoint2, o: ComplexPoint2) -> float:
    """(x|y)_o = (d(x,o) + d(y,o) - d(x,y)) / 2."""
    return 0.5 * (d.distance(x, o) + d.distance(y, o) - d.distance(x, y))


def cross_distances(d: MetricOracle, xs: Sequence[ComplexPoint2], ys: Sequence[ComplexPoint2]) -> np.ndarray:
    """Matrix of d(x, y), using the oracle's batched ``distance_matrix`` when it has one."""
    batched = getattr(d, "distance_matrix", None)
    if batched is not None:
        return np.asarray(batched(list(xs), list(ys)), dtype=float)
    return np.array([[d.distance(x, y) for y in ys] for x in xs], dtype=float).reshape(len(xs), len(ys))


def pairwise_distances(d: MetricOracle, points: Sequence[ComplexPoint2]) -> np.ndarray:
    """Symmetric distance matrix with zero diagonal."""
    points = list(points)
    batched = getattr(d, "distance_matrix", None)
    if batched is not None:
        matrix = np.asarray(batched(points, points), dtype=float)
        matrix = np.minimum(matrix, matrix.T)
    else:
        n = len(points)
        matrix = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                matrix[i, j] = matrix[j, i] = d.distance(points[i], points[j])
    np.fill_diagonal(matrix, 0.0)
    return matrix


def delta_from_matrix(
    distances: np.ndarray,
    seed: int = DEFAULT_SEED,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    quadruples: int = SAMPLED_QUADRUPLES,
) -> float:
    """max over (x, y, z, o) of min((x|z)_o, (y|z)_o) - (x|y)_o.

    Exhaustive up to ``exhaustive_limit`` points, seeded sampling of
    ``quadruples`` ordered quadruples above.
    """
    g = np.asarray(distances, dtype=float)
    n = g.shape[0]
    if n < 4:
        raise DomainViolationError(f"The four-point condition needs at least 4 points, got {n}")
    if n <= exhaustive_limit:
        best = -np.inf
        for o in range(n):
            products = 0.5 * (g[:, o][:, None] + g[:, o][None, :] - g)
            # value[x, y, z] = min(P[x, z], P[y, z]) - P[x, y]
            value = np.minimum(products[:, None, :], products[None, :, :]) - products[:, :, None]
            best = max(best, float(value.max()))
        return best
    rng = np.random.default_rng(seed)
    best = -np.inf
    remaining = quadruples
    while remaining > 0:
        size = min(QUADRUPLE_CHUNK, remaining)
        x, y, z, o = rng.integers(0, n, size=(4, size))

        def product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
            return 0.5 * (g[a, o] + g[b, o] - g[a, b])

        value = np.minimum(product(x, z), product(y, z)) - product(x, y)
        best = max(best, float(value.max()))
        remaining -= size
    logger.debug(f"Sampled {quadruples} quadruples of {n} points")
    return best


def delta_four_point(
    d: MetricOracle,
    sample: Sequence[ComplexPoint2],
    seed: int = DEFAULT_SEED,
    distances: Optional[np.ndarray] = None,
) -> float:
    """Four-point hyperbolicity constant of a finite sample."""
    if len(sample) < 4:
        raise DomainViolationError(f"The four-point condition needs at least 4 points, got {len(sample)}")
    matrix = pairwise_distances(d, sample) if distances is None else distances
    return delta_from_matrix(matrix, seed=seed)
