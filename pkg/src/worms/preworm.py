"""Pre-Worms Z(X, theta): half-plane bundles over theta^{-1}(I) or theta^{-1}(J)."""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional

from metrics.exact import strip_distance
from models.errors import DomainViolationError, SpecValidationError
from models.geometry import ComplexPoint2, RealInterval
from worms.angle import AngleFunction
from worms.worm import WormSpec

logger = logging.getLogger(__name__)

BASE_REGIONS = ("inner", "outer")


@dataclass(frozen=True)
class PreWormSpec:
    """W_in (base theta^{-1}(I)) or W_out (base theta^{-1}(J))."""

    angle: AngleFunction
    interval: RealInterval
    base_region: str = "inner"

    def __post_init__(self) -> None:
        if self.base_region not in BASE_REGIONS:
            raise SpecValidationError(f"Unknown base region: {self.base_region}")

    @classmethod
    def inner_of(cls, worm: WormSpec) -> "PreWormSpec":
        return cls(worm.angle, worm.inner, "inner")

    @classmethod
    def outer_of(cls, worm: WormSpec) -> "PreWormSpec":
        return cls(worm.angle, worm.outer, "outer")

    @property
    def is_annular(self) -> bool:
        """Classical angle: the base is the annulus e^{lo/2} < |z| < e^{hi/2}."""
        return self.angle.is_classical

    def annulus_radii(self) -> tuple:
        if not self.is_annular:
            raise SpecValidationError("Only classical pre-Worms have an annular base")
        return (math.exp(0.5 * self.interval.lo), math.exp(0.5 * self.interval.hi))

    def log_strip(self) -> tuple:
        """(lo, height) of the strip {lo < Re zeta < lo + height} covering the annular base."""
        inner, outer = self.annulus_radii()
        return (math.log(inner), math.log(outer / inner))


def base_region_membership(spec: PreWormSpec, z: complex) -> bool:
    return spec.interval.contains_open(spec.angle.theta(z))


def preworm_contains(spec: PreWormSpec, p: ComplexPoint2) -> bool:
    """theta(z) in the open base interval and Re(w e^{-i theta(z)}) > 0."""
    t = spec.angle.theta(p.z)
    if not spec.interval.contains_open(t):
        return False
    return (p.w * cmath.exp(-1j * t)).real > 0


def trivialize(spec: PreWormSpec, chart_center: complex, p: ComplexPoint2) -> ComplexPoint2:
    """(z, e^{-F(z)} w); fibers of the pre-Worm go to the right half-plane."""
    f = spec.angle.holomorphic(p.z, chart_center)
    return ComplexPoint2(p.z, cmath.exp(-f) * p.w)


def untrivialize(spec: PreWormSpec, chart_center: complex, p: ComplexPoint2) -> ComplexPoint2:
    f = spec.angle.holomorphic(p.z, chart_center)
    return ComplexPoint2(p.z, cmath.exp(f) * p.w)


def lift(spec: PreWormSpec, p: ComplexPoint2) -> tuple:
    """Universal-cover coordinates (zeta, u) = (log z, e^{-2i zeta} w) for annular bases."""
    if not spec.is_annular:
        raise SpecValidationError("Covering coordinates need an annular base")
    if p.z == 0:
        raise DomainViolationError("z = 0 is the puncture of the classical base")
    zeta = cmath.log(p.z)
    return zeta, cmath.exp(-2j * zeta) * p.w


def project(spec: PreWormSpec, zeta: complex, u: complex) -> ComplexPoint2:
    """Inverse of ``lift`` composed with the covering map."""
    return ComplexPoint2(cmath.exp(zeta), cmath.exp(2j * zeta) * u)


def trivializing_radius(spec: PreWormSpec, z: complex) -> float:
    """Half the base distance from zeta to its deck translate zeta + 2 pi i.

    Base balls of this radius are simply connected, so the bundle is
    trivial over them.
    """
    if not base_region_membership(spec, z):
        raise DomainViolationError(f"{z} is outside the base region")
    lo, height = spec.log_strip()
    zeta = cmath.log(z)
    return 0.5 * strip_distance(zeta, zeta + 2j * math.pi, lo, height)


def point_with_trivializing_radius(spec: PreWormSpec, radius: float, direction: float = 0.0) -> Optional[complex]:
    """Point on the outward ray at angle ``direction`` whose trivializing radius equals ``radius``.

    Returns None when the point is not representable in floating point.
    """
    lo, height = spec.log_strip()
    scale = math.pi / height
    # r(z) = 0.5 asinh(sinh(pi * 2 pi / (2 h)) / sin(pi x / h)) with x = Re zeta - lo
    numerator = math.sinh(scale * math.pi)
    if 2.0 * radius > 700.0:
        logger.warning(f"Trivializing radius {radius} overflows")
        return None
    target = math.sinh(2.0 * radius)
    if radius <= 0.5 * math.asinh(numerator):
        x = 0.5 * height
    else:
        x = height - math.asin(min(1.0, numerator / target)) / scale
    if not 0 < x < height:
        logger.warning(f"Trivializing radius {radius} is not representable on this base")
        return None
    return cmath.exp(complex(lo + x, direction))
