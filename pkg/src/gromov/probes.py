"""Geometric probes: bilipschitz constants of balls, quasi-flat diamonds, ball samples and triangle recipes."""

import cmath
import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from gromov.curves import SampledCurve, TriangleRecipe, curve_parameters
from metrics.domains import DomainHandle
from metrics.exact import (
    annulus_radial_geodesic,
    halfplane_ray_geodesic,
    halfplane_to_strip,
    strip_cross_geodesic,
    strip_to_halfplane,
)
from metrics.graph import MetricGraph, SamplingRegion, build_metric_graph
from models.config import DEFAULT_SEED, GraphSettings
from models.errors import DomainViolationError
from models.geometry import ComplexPoint2
from worms.preworm import PreWormSpec, point_with_trivializing_radius, project, untrivialize

logger = logging.getLogger(__name__)


def bilipschitz_constant_probe(
    domain: DomainHandle,
    p: ComplexPoint2,
    radius: float,
    region: Optional[SamplingRegion] = None,
    settings: Optional[GraphSettings] = None,
    pair_count: int = 200,
    seed: int = DEFAULT_SEED,
    graph: Optional[MetricGraph] = None,
) -> float:
    """Empirical C = max k_{B(p,4R)}(x, y) / k_M(x, y) over node pairs of B(p, R).

    Both distances come from the same graph: the ball B(p, 4R) is the
    subgraph induced on nodes within graph distance 4R of p.
    """
    if radius < 1:
        raise DomainViolationError("The bilipschitz probe needs R >= 1")
    if graph is None:
        if region is None:
            raise DomainViolationError("Pass a sampling region or a prebuilt graph")
        graph = build_metric_graph(domain, region, settings, extra_nodes=[p])
    center = graph.snap(p)
    from_center = graph.distances_from(center)
    inner = np.flatnonzero(from_center <= radius)
    outer = np.flatnonzero(from_center < 4.0 * radius)
    if len(inner) < 2:
        raise DomainViolationError(f"B(p, {radius}) holds fewer than two graph nodes")
    ball = graph.induced(outer)
    position = {int(node): k for k, node in enumerate(outer)}

    rng = np.random.default_rng(seed)
    all_pairs = [(int(a), int(b)) for i, a in enumerate(inner) for b in inner[i + 1 :]]
    if len(all_pairs) > pair_count:
        chosen = rng.choice(len(all_pairs), size=pair_count, replace=False)
        all_pairs = [all_pairs[k] for k in sorted(chosen)]
    worst = 1.0
    for a, b in all_pairs:
        full = graph.distances_from(a)[b]
        restricted = ball.distances_from(position[a])[position[b]]
        if full > 0 and math.isfinite(restricted):
            worst = max(worst, float(restricted / full))
    logger.info(f"Bilipschitz probe at R={radius}: C = {worst:.6g} over {len(all_pairs)} pairs")
    return worst


def halfplane_ball_point(center: complex, rho: float, angle: float) -> complex:
    """Point of {Re > 0} at distance ``rho`` from ``center`` in direction ``angle``."""
    x = math.tanh(rho) * cmath.exp(1j * angle)
    return (center + center.conjugate() * x) / (1.0 - x)


def strip_ball_point(center: complex, rho: float, angle: float, lo: float, height: float) -> complex:
    image = halfplane_ball_point(strip_to_halfplane(center, lo, height), rho, angle)
    return halfplane_to_strip(image, lo, height)


def product_ball_samples(
    spec: PreWormSpec,
    zeta0: complex,
    u0: complex,
    radius: float,
    count: int,
    rng: np.random.Generator,
) -> List[ComplexPoint2]:
    """Points of the pre-Worm within product distance ``radius`` of the lift (zeta0, u0)."""
    lo, height = spec.log_strip()
    points = []
    for _ in range(count):
        rho_base, rho_fiber = radius * rng.random(2)
        alpha, beta = rng.uniform(-math.pi, math.pi, 2)
        zeta = strip_ball_point(zeta0, rho_base, alpha, lo, height)
        u = halfplane_ball_point(u0, rho_fiber, beta)
        points.append(project(spec, zeta, u))
    return points


def quasi_flat_diamond(spec: PreWormSpec, zeta0: complex, u0: complex, radius: float) -> List[ComplexPoint2]:
    """(gamma(+-R), sigma(0)) and (gamma(0), sigma(+-R)) for the cross and fiber geodesics through the lift.

    In a product these four points have four-point value exactly R.
    """
    lo, height = spec.log_strip()
    base = [strip_cross_geodesic(zeta0, s * radius, lo, height) for s in (1.0, -1.0)]
    fiber = [halfplane_ray_geodesic(u0, s * radius) for s in (1.0, -1.0)]
    return [project(spec, zeta, u0) for zeta in base] + [project(spec, zeta0, u) for u in fiber]


def disc_ball_samples(radius: float, count: int, rng: np.random.Generator) -> List[ComplexPoint2]:
    """Unit-disc points within Kobayashi distance ``radius`` of 0."""
    rho = radius * rng.random(count)
    angle = rng.uniform(-math.pi, math.pi, count)
    return [ComplexPoint2(complex(z), 0j) for z in np.tanh(rho) * np.exp(1j * angle)]


def annular_recipe(
    spec: PreWormSpec,
    scale: float,
    radius_factor: float,
    max_step: float,
    constant: float = 1.0,
    fiber_point: complex = 1.0 + 0j,
) -> Optional[TriangleRecipe]:
    """Triangle recipe over an annular base, with z_n on the positive axis and r(z_n) >= radius_factor * t.

    gamma runs radially inward from z_n and sigma along the real ray from q;
    both are unit speed. Returns None when z_n is not representable.
    """
    z_n = point_with_trivializing_radius(spec, radius_factor * scale)
    if z_n is None:
        return None
    inner, outer = spec.annulus_radii()
    params = curve_parameters(scale, max_step)
    gamma_pts = [ComplexPoint2(annulus_radial_geodesic(z_n, -t, inner, outer), 0j) for t in params]
    sigma_pts = [ComplexPoint2(z_n, halfplane_ray_geodesic(fiber_point, t)) for t in params]
    gamma = SampledCurve(tuple(params), tuple(gamma_pts))
    sigma = SampledCurve(tuple(params), tuple(sigma_pts))
    return TriangleRecipe(z_n, fiber_point, scale, gamma, sigma, constant)


def ambient_points(spec: PreWormSpec, chart_center: complex, points: Sequence[ComplexPoint2]) -> List[ComplexPoint2]:
    """Map product coordinates (z, u) to the pre-Worm: (z, e^{F(z)} u) on the chart around ``chart_center``."""
    return [untrivialize(spec, chart_center, p) for p in points]
