"""Worm domains: membership, defining function, boundary strata, Levi form and scaling."""

import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from models.config import WormConfig
from models.errors import DomainViolationError, SpecValidationError
from models.geometry import (
    ComplexPoint2,
    HermitianForm2,
    RealInterval,
    hermitian_apply,
)
from worms.angle import AngleFunction
from worms.eta import CapFunction, EtaFunction

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-7
CRITICAL_LEVEL_TOLERANCE = 1e-9
MIN_LEVEL_GRADIENT = 1e-8


class BoundaryStratum(str, Enum):
    SPINE = "spine"
    BODY = "body"
    EXCEPTIONAL = "exceptional"
    CAP = "cap"


@dataclass(frozen=True)
class WormSpec:
    """Angle function plus cap function; intervals I and J come from the cap."""

    angle: AngleFunction
    eta: CapFunction
    name: str = "worm"
    config: Optional[WormConfig] = field(default=None, compare=False, repr=False)

    @property
    def inner(self) -> RealInterval:
        return self.eta.inner

    @property
    def outer(self) -> RealInterval:
        return self.eta.outer

    @classmethod
    def classical(
        cls,
        inner: Tuple[float, float] = (-1.0, 1.0),
        outer: Tuple[float, float] = (-1.6, 1.6),
        grid_step: float = 0.01,
    ) -> "WormSpec":
        config = WormConfig(name="classical", inner_interval=inner, outer_interval=outer)
        config.eta.grid_step = grid_step
        return cls.from_config(config)

    @classmethod
    def from_config(cls, config: WormConfig, validate: bool = True) -> "WormSpec":
        surface = config.surface
        if surface.kind == "classical":
            angle = AngleFunction.classical()
        else:
            angle = AngleFunction.punctured_plane(
                [complex(re, im) for re, im in surface.punctures], surface.weights
            )
        eta = EtaFunction(
            RealInterval(*config.inner_interval),
            RealInterval(*config.outer_interval),
            grid_step=config.eta.grid_step,
            alpha_plus=config.eta.alpha_plus,
            alpha_minus=config.eta.alpha_minus,
            calibrate=config.eta.calibrate,
        )
        spec = cls(angle=angle, eta=eta, name=config.name, config=config)
        if validate:
            spec.validate()
        return spec

    def with_cap(self, cap: CapFunction) -> "WormSpec":
        return replace(self, eta=cap, name=f"{self.name}-modified-cap")

    def config_dict(self) -> dict:
        if self.config is None:
            return {"name": self.name}
        return self.config.model_dump(mode="json")

    def validate(self, grid_points: int = 400) -> None:
        """Check that theta has no critical points on the levels bounding I and J."""
        levels = (self.inner.lo, self.inner.hi, self.outer.lo, self.outer.hi)
        for crit in self.angle.critical_points():
            level = self.angle.theta(crit)
            for c in levels:
                if abs(level - c) <= CRITICAL_LEVEL_TOLERANCE * max(1.0, abs(c)):
                    raise SpecValidationError(f"theta has a critical point {crit} on the level {c}")
        for c in levels:
            samples = self.angle.level_set_samples(c, grid_points)
            if len(samples) == 0:
                continue
            gradient = np.abs(self.angle.derivative_array(samples))
            if np.min(gradient) <= MIN_LEVEL_GRADIENT:
                raise SpecValidationError(f"d theta nearly vanishes on the level set theta = {c}")
        clearance = self.angle.puncture_clearance(self.outer.lo)
        if not clearance > 0:
            raise SpecValidationError("theta^{-1}(J) is not bounded away from the punctures")
        logger.debug(f"Worm '{self.name}' passed validation (puncture clearance {clearance:.3g})")

    def slice_center(self, z: complex) -> complex:
        return cmath.exp(1j * self.angle.theta(z))

    def slice_radius(self, z: complex) -> float:
        """Radius (1 - eta(theta))^{1/2} of the w-slice; 0 when theta is outside J."""
        t = self.angle.theta(z)
        if not self.outer.contains_open(t):
            return 0.0
        return math.sqrt(max(0.0, 1.0 - self.eta(t)))


def defining_function(spec: WormSpec, p: ComplexPoint2) -> float:
    """|w|^2 - 2 Re(w e^{-i theta}) + eta(theta); negative exactly inside the Worm."""
    t = spec.angle.theta(p.z)
    return abs(p.w) ** 2 - 2.0 * (p.w * cmath.exp(-1j * t)).real + spec.eta(t)


def defining_function_array(spec: WormSpec, z: np.ndarray, w: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Batched defining function of the scaled Worm B_scale(W); +inf outside theta^{-1}(J)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex) / scale
    t = spec.angle.theta_array(z)
    out = np.full(z.shape, np.inf)
    inside = np.isfinite(t) & (t > spec.outer.lo) & (t < spec.outer.hi)
    wt, tt = w[inside], t[inside]
    out[inside] = np.abs(wt) ** 2 - 2.0 * (wt * np.exp(-1j * tt)).real + spec.eta.values(tt)
    return out


def worm_contains(spec: WormSpec, p: ComplexPoint2) -> bool:
    t = spec.angle.theta(p.z)
    if not spec.outer.contains_open(t):
        return False
    return abs(p.w - cmath.exp(1j * t)) ** 2 < 1.0 - spec.eta(t)


def barrett_scale(lam: float, p: ComplexPoint2) -> ComplexPoint2:
    """B_lambda(z, w) = (z, lambda w)."""
    if not lam > 0:
        raise DomainViolationError(f"Scaling factor must be positive, got {lam}")
    return ComplexPoint2(p.z, lam * p.w)


def scaled_contains(spec: WormSpec, lam: float, p: ComplexPoint2) -> bool:
    """Membership in B_lambda(W)."""
    return worm_contains(spec, barrett_scale(1.0 / lam, p))


def defining_gradient(spec: WormSpec, p: ComplexPoint2) -> Tuple[complex, complex]:
    """(dr/dz, dr/dw) at p."""
    t = spec.angle.theta(p.z)
    theta_z = spec.angle.derivative(p.z) / 2j
    phase = cmath.exp(-1j * t)
    r_w = p.w.conjugate() - phase
    r_z = theta_z * (1j * p.w * phase - 1j * p.w.conjugate() / phase + spec.eta.first_derivative(t))
    return r_z, r_w


def gradient_norm(spec: WormSpec, p: ComplexPoint2) -> float:
    """Euclidean norm of the real gradient of r: 2 (|r_z|^2 + |r_w|^2)^{1/2}."""
    r_z, r_w = defining_gradient(spec, p)
    return 2.0 * math.hypot(abs(r_z), abs(r_w))


def classify_boundary(spec: WormSpec, p: ComplexPoint2, tol: float = BOUNDARY_TOLERANCE) -> BoundaryStratum:
    """Stratum of a boundary point; ties resolve Spine > Exceptional > Cap > Body."""
    r = defining_function(spec, p)
    if abs(r) > tol:
        raise DomainViolationError(f"Point is not on the boundary (r = {r:.3e})")
    t = spec.angle.theta(p.z)
    if spec.inner.lo - tol <= t <= spec.inner.hi + tol and abs(p.w) <= tol:
        return BoundaryStratum.SPINE
    gradient = spec.angle.theta_gradient(p.z)
    if gradient <= tol and abs(p.w) > tol:
        return BoundaryStratum.EXCEPTIONAL
    if not spec.inner.contains(t) and gradient > tol:
        return BoundaryStratum.CAP
    return BoundaryStratum.BODY


def _cap_term(spec: WormSpec, z: complex, cap_method: str) -> float:
    """(1/4)|F'|^2 (eta + eta'') at unit scale."""
    t = spec.angle.theta(z)
    fprime_sq = abs(spec.angle.derivative(z)) ** 2
    if cap_method == "analytic":
        second = spec.eta.second_derivative(t)
    elif cap_method == "richardson":
        second = spec.eta.second_difference(t)
    else:
        raise DomainViolationError(f"Unknown cap method: {cap_method}")
    return 0.25 * fprime_sq * (spec.eta(t) + second)


def unit_levi_matrix(spec: WormSpec, p: ComplexPoint2, cap_method: str = "analytic") -> HermitianForm2:
    """Levi matrix of e^{-v} r with the factor e^{-v} removed."""
    fprime = spec.angle.derivative(p.z)
    h11 = 0.25 * abs(p.w) ** 2 * abs(fprime) ** 2 + _cap_term(spec, p.z, cap_method)
    h12 = -0.5 * p.w.conjugate() * fprime.conjugate()
    return HermitianForm2.from_entries(h11, h12, 1.0)


def levi_form(
    spec: WormSpec,
    p: ComplexPoint2,
    chart_center: Optional[complex] = None,
    cap_method: str = "analytic",
) -> HermitianForm2:
    """Levi form of the local defining function e^{-v} r, v = Re F on the chart.

    |e^{-F/2}|^2 [[|w|^2 |F'|^2/4 + cap, -conj(w F')/2], [-w F'/2, 1]], where
    cap = (1/4)|F'|^2 (eta + eta'') vanishes over I.
    """
    v = spec.angle.holomorphic(p.z, chart_center).real
    return unit_levi_matrix(spec, p, cap_method).scaled(math.exp(-v))


def complex_tangent(spec: WormSpec, p: ComplexPoint2) -> Tuple[complex, complex]:
    """Unit complex tangent direction (r_w, -r_z) / |.|."""
    r_z, r_w = defining_gradient(spec, p)
    norm = math.hypot(abs(r_z), abs(r_w))
    if norm == 0:
        raise DomainViolationError("Defining function has a critical point here")
    return r_w / norm, -r_z / norm


def tangential_curvature(spec: WormSpec, p: ComplexPoint2, cap_method: str = "analytic") -> float:
    """Levi form of r on the unit complex tangent vector."""
    a, b = complex_tangent(spec, p)
    return hermitian_apply(unit_levi_matrix(spec, p, cap_method), a, b)


def kernel_residual(spec: WormSpec, p: ComplexPoint2, chart_center: Optional[complex] = None) -> float:
    """|L(2, w F')|, zero wherever the cap term vanishes."""
    h = levi_form(spec, p, chart_center)
    return abs(hermitian_apply(h, 2.0, p.w * spec.angle.derivative(p.z)))


def tangency_check(spec: WormSpec, p: ComplexPoint2, chart_center: Optional[complex] = None) -> float:
    """|(2 d/dz + w F' d/dw)(e^{-v} r)| on the boundary, equal to |w F' e^{-F}| on the body."""
    r_z, r_w = defining_gradient(spec, p)
    fprime = spec.angle.derivative(p.z)
    v = spec.angle.holomorphic(p.z, chart_center).real
    return math.exp(-v) * abs(2.0 * r_z + p.w * fprime * r_w)
