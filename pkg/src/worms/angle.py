"""Harmonic angle functions theta and their holomorphic completions F = v + i*theta."""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.errors import BranchCutError, DomainViolationError
from models.geometry import ensure_finite

logger = logging.getLogger(__name__)

ANGLE_KINDS = ("classical", "punctured_plane")
PUNCTURE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AngleFunction:
    """theta(z) = sum_j lambda_j log|z - a_j|^2 on the plane minus the punctures.

    The classical angle is the single puncture a = 0 with weight 1, i.e.
    theta = log|z|^2 on C*. The holomorphic completion is
    F(z) = 2i sum_j lambda_j log(z - a_j), defined on charts.
    """

    punctures: Tuple[complex, ...] = (0j,)
    weights: Tuple[float, ...] = (1.0,)
    kind: str = "classical"

    def __post_init__(self) -> None:
        if self.kind not in ANGLE_KINDS:
            raise DomainViolationError(f"Unknown angle function kind: {self.kind}")
        punctures = tuple(ensure_finite(a, "puncture") for a in self.punctures)
        weights = tuple(float(w) for w in self.weights)
        if not punctures or len(punctures) != len(weights):
            raise DomainViolationError("Angle function needs matching punctures and weights")
        if any(not (math.isfinite(w) and w > 0) for w in weights):
            raise DomainViolationError("Weights must be positive")
        object.__setattr__(self, "punctures", punctures)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def classical(cls) -> "AngleFunction":
        return cls((0j,), (1.0,), "classical")

    @classmethod
    def punctured_plane(cls, punctures: Sequence[complex], weights: Sequence[float]) -> "AngleFunction":
        return cls(tuple(complex(a) for a in punctures), tuple(float(w) for w in weights), "punctured_plane")

    @property
    def is_classical(self) -> bool:
        return self.kind == "classical"

    @property
    def total_weight(self) -> float:
        return float(sum(self.weights))

    def _check(self, z: complex) -> complex:
        z = ensure_finite(z, "z")
        for a in self.punctures:
            if abs(z - a) <= PUNCTURE_TOLERANCE:
                raise DomainViolationError(f"Point {z} is a puncture of the base surface")
        return z

    def theta(self, z: complex) -> float:
        z = self._check(z)
        return sum(lam * math.log(abs(z - a) ** 2) for a, lam in zip(self.punctures, self.weights))

    def theta_array(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        total = np.zeros(z.shape, dtype=float)
        with np.errstate(divide="ignore"):
            for a, lam in zip(self.punctures, self.weights):
                total += lam * np.log(np.abs(z - a) ** 2)
        return total

    def derivative(self, z: complex) -> complex:
        """F'(z) = 2i sum_j lambda_j / (z - a_j); branch independent."""
        z = self._check(z)
        return 2j * sum(lam / (z - a) for a, lam in zip(self.punctures, self.weights))

    def derivative_array(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        total = np.zeros(z.shape, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            for a, lam in zip(self.punctures, self.weights):
                total += lam / (z - a)
        return 2j * total

    def theta_gradient(self, z: complex) -> float:
        """|d theta / dz| = |F'(z)| / 2."""
        return 0.5 * abs(self.derivative(z))

    def holomorphic(self, z: complex, chart_center: Optional[complex] = None) -> complex:
        """F(z) on the chart around ``chart_center``.

        Each log(z - a) is continued from the principal value at the chart
        center; the chart excludes, per puncture, the ray from a pointing
        away from the center.
        """
        z = self._check(z)
        c = z if chart_center is None else self._check(chart_center)
        total = 0j
        for a, lam in zip(self.punctures, self.weights):
            ratio = (z - a) / (c - a)
            if ratio.real <= 0 and abs(ratio.imag) <= 1e-14 * abs(ratio):
                raise BranchCutError(f"{z} lies on the chart cut of puncture {a} for center {c}")
            total += lam * (cmath.log(ratio) + cmath.log(c - a))
        return 2j * total

    def holomorphic_array(self, z: np.ndarray, chart_center: complex) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        total = np.zeros(z.shape, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            for a, lam in zip(self.punctures, self.weights):
                total += lam * (np.log((z - a) / (chart_center - a)) + cmath.log(chart_center - a))
        return 2j * total

    def conjugate_v(self, z: complex, chart_center: Optional[complex] = None) -> float:
        """v = Re F on the chart around ``chart_center``."""
        return self.holomorphic(z, chart_center).real

    def continue_branch(self, path: Sequence[complex], start_value: Optional[complex] = None) -> complex:
        """Continue F analytically along a polygonal path and return its final value.

        Consecutive vertices must be close enough that no segment winds
        halfway around a puncture.
        """
        if len(path) < 2:
            raise DomainViolationError("Continuation needs at least two path vertices")
        points = [self._check(p) for p in path]
        value = self.holomorphic(points[0]) if start_value is None else complex(start_value)
        for prev, cur in zip(points, points[1:]):
            step = 0j
            for a, lam in zip(self.punctures, self.weights):
                ratio = (cur - a) / (prev - a)
                if ratio.real <= 0:
                    raise BranchCutError(f"Path step {prev} -> {cur} is too long near puncture {a}")
                step += lam * cmath.log(ratio)
            value += 2j * step
        return value

    def holonomy_factor(self, loop: Sequence[complex]) -> complex:
        """Factor by which e^{-F} changes after continuing F around a closed loop."""
        if abs(loop[0] - loop[-1]) > 1e-12:
            raise DomainViolationError("Holonomy needs a closed loop")
        start = self.holomorphic(loop[0])
        end = self.continue_branch(loop, start)
        return cmath.exp(-(end - start))

    def critical_points(self) -> List[complex]:
        """Zeros of F', i.e. the points where d theta vanishes."""
        if len(self.punctures) == 1:
            return []
        # sum_j lambda_j prod_{i != j} (z - a_i)
        poly = np.zeros(1, dtype=complex)
        for j, lam in enumerate(self.weights):
            term = np.array([lam], dtype=complex)
            for i, a in enumerate(self.punctures):
                if i != j:
                    term = np.polymul(term, np.array([1.0, -a], dtype=complex))
            poly = np.polyadd(poly, term)
        roots = np.roots(poly) if len(poly) > 1 else np.array([], dtype=complex)
        return [complex(r) for r in roots]

    def bounding_radius(self, level: float) -> float:
        """A radius R with theta > level whenever |z| >= R."""
        a_max = max(abs(a) for a in self.punctures)
        return a_max + math.exp(level / (2.0 * self.total_weight)) + 1.0

    def puncture_clearance(self, level: float) -> float:
        """A radius rho with theta < level within distance rho of every puncture."""
        clearance = math.inf
        for k, (a_k, lam_k) in enumerate(zip(self.punctures, self.weights)):
            others = [(abs(a_k - a), lam) for j, (a, lam) in enumerate(zip(self.punctures, self.weights)) if j != k]

            def upper(rho: float) -> float:
                return 2 * lam_k * math.log(rho) + sum(2 * lam * math.log(rho + d) for d, lam in others)

            rho = 1.0
            while upper(rho) >= level:
                rho *= 0.5
                if rho < 1e-300:
                    break
            clearance = min(clearance, rho)
        return clearance

    def level_set_samples(self, level: float, count: int = 400) -> np.ndarray:
        """Points of theta^{-1}(level) found as sign changes on a grid, refined linearly."""
        radius = self.bounding_radius(level)
        axis = np.linspace(-radius, radius, count)
        x, y = np.meshgrid(axis, axis, indexing="ij")
        z = x + 1j * y
        values = self.theta_array(z) - level
        samples = []
        for shift in ((1, 0), (0, 1)):
            a = values[: count - shift[0], : count - shift[1]]
            b = values[shift[0] :, shift[1] :]
            za = z[: count - shift[0], : count - shift[1]]
            zb = z[shift[0] :, shift[1] :]
            mask = np.isfinite(a) & np.isfinite(b) & (np.sign(a) != np.sign(b))
            t = a[mask] / (a[mask] - b[mask])
            samples.append(za[mask] + t * (zb[mask] - za[mask]))
        return np.concatenate(samples)
