"""Sampled quasigeodesics, slim triangles and the fiber-bundle triangle construction."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from gromov.products import cross_distances, pairwise_distances
from models.errors import DomainViolationError
from models.geometry import ComplexPoint2
from models.oracle import MetricOracle

logger = logging.getLogger(__name__)

CLOSURE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SampledCurve:
    """Samples of a curve with claimed (A, B) quasigeodesic constants."""

    params: Tuple[float, ...]
    points: Tuple[ComplexPoint2, ...]
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(float(t) for t in self.params))
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.params) != len(self.points) or len(self.params) < 2:
            raise DomainViolationError("A sampled curve needs matching params and points, at least two")
        if any(t1 <= t0 for t0, t1 in zip(self.params, self.params[1:])):
            raise DomainViolationError("Curve parameters must be strictly increasing")
        if self.a < 1 or self.b < 0:
            raise DomainViolationError("Quasigeodesic constants need A >= 1 and B >= 0")

    @property
    def start(self) -> ComplexPoint2:
        return self.points[0]

    @property
    def end(self) -> ComplexPoint2:
        return self.points[-1]

    @property
    def length(self) -> float:
        return self.params[-1] - self.params[0]

    @property
    def max_step(self) -> float:
        return float(np.max(np.diff(self.params)))

    def with_claim(self, a: float, b: float) -> "SampledCurve":
        return SampledCurve(self.params, self.points, a, b)


def _close(p: ComplexPoint2, q: ComplexPoint2, tol: float) -> bool:
    return abs(p.z - q.z) <= tol and abs(p.w - q.w) <= tol


@dataclass(frozen=True)
class SampledTriangle:
    """Three sampled sides; a ends where c starts, c ends where b ends, a and b share the start."""

    a: SampledCurve
    b: SampledCurve
    c: SampledCurve
    closure_tolerance: float = CLOSURE_TOLERANCE

    def __post_init__(self) -> None:
        tol = self.closure_tolerance
        if not (
            _close(self.a.start, self.b.start, tol)
            and _close(self.a.end, self.c.start, tol)
            and _close(self.c.end, self.b.end, tol)
        ):
            raise DomainViolationError("Triangle sides do not close up")

    @property
    def sides(self) -> Tuple[SampledCurve, SampledCurve, SampledCurve]:
        return (self.a, self.b, self.c)

    def vertices(self) -> List[ComplexPoint2]:
        return [self.a.start, self.a.end, self.b.end]


@dataclass(frozen=True)
class TriangleRecipe:
    """Base geodesic gamma and fiber geodesic sigma of common parameter length t.

    Points are product coordinates (base, trivialized fiber); ``constant``
    is the bilipschitz constant C entering the (2C, 0) claim.
    """

    base_point: complex
    fiber_point: complex
    scale: float
    base_geodesic: SampledCurve
    fiber_geodesic: SampledCurve
    constant: float = 1.0

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise DomainViolationError("Triangle scale must be positive")
        for curve, name in ((self.base_geodesic, "base"), (self.fiber_geodesic, "fiber")):
            if curve.params[0] != 0.0 or abs(curve.params[-1] - self.scale) > 1e-12 * max(1.0, self.scale):
                raise DomainViolationError(f"The {name} geodesic must be parametrized on [0, t]")
        if abs(self.base_geodesic.start.z - self.base_point) > CLOSURE_TOLERANCE:
            raise DomainViolationError("gamma(0) must be the base point")
        if abs(self.fiber_geodesic.start.w - self.fiber_point) > CLOSURE_TOLERANCE:
            raise DomainViolationError("sigma(0) must be the fiber point")


def build_bundle_triangle(recipe: TriangleRecipe) -> SampledTriangle:
    """a(t) = (z_n, sigma(t)), b(t) = (gamma(t), q), c = (gamma(t), sigma(t_n)) then (gamma(t_n), sigma(2 t_n - t))."""
    gamma, sigma = recipe.base_geodesic, recipe.fiber_geodesic
    t_n = recipe.scale
    claim = 2.0 * recipe.constant
    z_n, q = recipe.base_point, recipe.fiber_point
    base_pts = [p.z for p in gamma.points]
    fiber_pts = [p.w for p in sigma.points]

    a = SampledCurve(sigma.params, [ComplexPoint2(z_n, u) for u in fiber_pts], claim, 0.0)
    b = SampledCurve(gamma.params, [ComplexPoint2(z, q) for z in base_pts], claim, 0.0)

    top = fiber_pts[-1]
    first_params = list(gamma.params)
    first_points = [ComplexPoint2(z, top) for z in base_pts]
    corner = base_pts[-1]
    second_params = [2.0 * t_n - s for s in reversed(sigma.params[:-1])]
    second_points = [ComplexPoint2(corner, u) for u in reversed(fiber_pts[:-1])]
    c = SampledCurve(first_params + second_params, first_points + second_points, claim, 0.0)
    return SampledTriangle(a, b, c)


def quasigeodesic_check(d: MetricOracle, c: SampledCurve) -> Tuple[float, float, bool]:
    """Fitted (A, B) for A^{-1}|t-s| - B <= d(c(s), c(t)) <= A|t-s| + B over all sample pairs.

    A is fitted at the claimed B plus the oracle tolerance, B at the claimed
    A; the curve passes when the fitted B stays within the claim plus tolerance.
    """
    tol = d.tolerance
    distances = pairwise_distances(d, c.points)
    params = np.asarray(c.params)
    gaps = np.abs(params[:, None] - params[None, :])
    upper = np.triu_indices(len(params), k=1)
    dist, gap = distances[upper], gaps[upper]
    slack = c.b + tol
    with np.errstate(divide="ignore", invalid="ignore"):
        stretch = np.where(gap > 0, (dist - slack) / gap, 0.0)
        shrink = np.where(dist + slack > 0, gap / (dist + slack), np.inf)
    a_fit = max(1.0, float(np.max(stretch)), float(np.max(shrink)))
    b_fit = max(0.0, float(np.max(dist - c.a * gap)), float(np.max(gap / c.a - dist)))
    ok = b_fit <= c.b + tol + 1e-12
    logger.debug(f"Quasigeodesic fit A={a_fit:.6g}, B={b_fit:.6g} against claim ({c.a:g}, {c.b:g})")
    return a_fit, b_fit, ok


def slimness(d: MetricOracle, t: SampledTriangle) -> float:
    """Largest distance from a sample of one side to the samples of the other two."""
    sides = t.sides
    worst = 0.0
    for k, side in enumerate(sides):
        others: List[ComplexPoint2] = []
        for j, other in enumerate(sides):
            if j != k:
                others.extend(other.points)
        to_others = cross_distances(d, side.points, others)
        worst = max(worst, float(np.max(np.min(to_others, axis=1))))
    return worst


def curve_parameters(length: float, max_step: float) -> np.ndarray:
    """Uniform parameters on [0, length] with spacing at most ``max_step``."""
    if not length > 0 or not max_step > 0:
        raise DomainViolationError("Curve length and step must be positive")
    count = int(math.ceil(length / max_step - 1e-12)) + 1
    params = np.linspace(0.0, length, max(count, 2))
    params[-1] = length
    return params


def sample_curve(path: Callable[[float], ComplexPoint2], length: float, max_step: float, a: float = 1.0, b: float = 0.0) -> SampledCurve:
    params = curve_parameters(length, max_step)
    return SampledCurve(tuple(params), tuple(path(float(t)) for t in params), a, b)


def vertex_diameter(d: MetricOracle, t: SampledTriangle) -> float:
    return float(np.max(pairwise_distances(d, t.vertices())))


def side_chord(d: MetricOracle, c: SampledCurve) -> float:
    """Largest distance between consecutive samples."""
    return max(d.distance(p, q) for p, q in zip(c.points, c.points[1:]))

