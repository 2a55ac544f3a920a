"""Stratified boundary sampling of Worms."""

import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from models.errors import SearchExhaustedError
from models.geometry import ComplexPoint2, RealInterval
from worms.worm import WormSpec

logger = logging.getLogger(__name__)

MAX_REJECTION_ROUNDS = 200


@dataclass(frozen=True)
class BoundarySample:
    point: ComplexPoint2
    source: str  # "spine", "slice" or "critical"


def sample_base_points(spec: WormSpec, interval: RealInterval, count: int, rng: np.random.Generator) -> np.ndarray:
    """Base points z with theta(z) in the open interval, stratified in theta when possible."""
    if count <= 0:
        return np.zeros(0, dtype=complex)
    if spec.angle.is_classical:
        u = (rng.permutation(count) + rng.random(count)) / count
        theta = interval.lo + u * interval.length
        arg = rng.uniform(-math.pi, math.pi, count)
        return np.exp(0.5 * theta + 1j * arg)
    radius = spec.angle.bounding_radius(interval.hi)
    accepted: List[np.ndarray] = []
    total = 0
    for _ in range(MAX_REJECTION_ROUNDS):
        batch = rng.uniform(-radius, radius, (4 * count, 2))
        z = batch[:, 0] + 1j * batch[:, 1]
        theta = spec.angle.theta_array(z)
        keep = z[np.isfinite(theta) & (theta > interval.lo) & (theta < interval.hi)]
        accepted.append(keep)
        total += len(keep)
        if total >= count:
            return np.concatenate(accepted)[:count]
    raise SearchExhaustedError(f"Could not sample {count} base points with theta in {interval.as_tuple()}")


def slice_boundary_points(spec: WormSpec, z: complex, angles: np.ndarray) -> np.ndarray:
    """w = e^{i theta}(1 + rho e^{i phi}) on the boundary circle of the slice over z."""
    t = spec.angle.theta(z)
    rho = spec.slice_radius(z)
    return np.exp(1j * t) * (1.0 + rho * np.exp(1j * np.asarray(angles)))


def sample_boundary(
    spec: WormSpec,
    count: int,
    seed: int,
    spine_fraction: float = 0.1,
    spine_clearance: float = 1e-2,
    critical_angles: int = 16,
) -> List[BoundarySample]:
    """Stratified samples of the Worm boundary.

    Slice samples pair stratified base points with stratified slice angles
    and keep |w| >= spine_clearance; spine samples are (z, 0) with theta(z)
    in I; critical points of theta inside J get their own slice circles.
    """
    rng = np.random.default_rng(seed)
    samples: List[BoundarySample] = []

    n_spine = int(round(count * spine_fraction))
    for z in sample_base_points(spec, spec.inner, n_spine, rng):
        samples.append(BoundarySample(ComplexPoint2(complex(z), 0j), "spine"))

    for c in spec.angle.critical_points():
        if not spec.outer.contains_open(spec.angle.theta(c)):
            continue
        angles = 2.0 * math.pi * (np.arange(critical_angles) + 0.5) / critical_angles
        for w in slice_boundary_points(spec, c, angles):
            if abs(w) >= spine_clearance:
                samples.append(BoundarySample(ComplexPoint2(c, complex(w)), "critical"))

    n_slice = max(count - len(samples), 0)
    produced = 0
    for _ in range(MAX_REJECTION_ROUNDS):
        if produced >= n_slice:
            break
        need = n_slice - produced
        base = sample_base_points(spec, spec.outer, need, rng)
        phi = 2.0 * math.pi * (rng.permutation(need) + rng.random(need)) / need
        for z, angle in zip(base, phi):
            w = slice_boundary_points(spec, complex(z), np.array([angle]))[0]
            if abs(w) < spine_clearance:
                continue
            samples.append(BoundarySample(ComplexPoint2(complex(z), complex(w)), "slice"))
            produced += 1
    logger.debug(f"Sampled {len(samples)} boundary points ({n_spine} spine)")
    return samples
