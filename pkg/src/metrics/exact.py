"""Closed-form Kobayashi distances and metrics of the model domains.

Normalization: k_D(0, s) = arctanh(s), i.e. K_D(z; v) = |v| / (1 - |z|^2).
Planar model domains act on the base coordinate ``z`` of a ComplexPoint2;
``Product`` uses its first factor on ``z`` and its second on ``w``.
"""

import cmath
import logging
import math
from abc import abstractmethod
from typing import Callable, Tuple

import numpy as np

from models.errors import DomainViolationError, SearchExhaustedError
from models.geometry import ComplexPoint2, TangentVector2, ensure_finite
from models.oracle import AccuracyClass, MetricOracle

logger = logging.getLogger(__name__)

DEFAULT_DECK_RANGE = 8
MAX_DECK_RANGE = 1 << 12


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainViolationError(message)


def _atanh_or_inf(ratio: float) -> float:
    return math.atanh(ratio) if ratio < 1.0 else math.inf


def log_polar_distance(log_radius_gap: float, angle_a: float, angle_b: float) -> float:
    """Right half-plane distance between r_a e^{i angle_a} and r_b e^{i angle_b}.

    ``log_radius_gap`` is log(r_b / r_a); angles lie in (-pi/2, pi/2). This
    form stays finite and accurate when the radii differ by many orders of
    magnitude.
    """
    along = math.sinh(0.5 * log_radius_gap) ** 2
    across = math.sin(0.5 * (angle_a - angle_b)) ** 2
    denom = math.cos(angle_a) * math.cos(angle_b)
    if denom <= 0:
        raise DomainViolationError("Angles must lie in (-pi/2, pi/2)")
    return math.asinh(math.sqrt((along + across) / denom))


def disc_distance(p: complex, q: complex) -> float:
    """Kobayashi distance of the unit disc."""
    p, q = ensure_finite(p, "p"), ensure_finite(q, "q")
    _require(abs(p) < 1 and abs(q) < 1, f"Points must lie in the unit disc: {p}, {q}")
    ratio = abs(p - q) / abs(1 - p.conjugate() * q)
    return _atanh_or_inf(ratio)


def disc_royden(z: complex, dz: complex) -> float:
    z = ensure_finite(z, "z")
    _require(abs(z) < 1, f"Point must lie in the unit disc: {z}")
    return abs(dz) / (1.0 - abs(z) ** 2)


def halfplane_distance(p: complex, q: complex) -> float:
    """Kobayashi distance of the right half-plane {Re w > 0}."""
    p, q = ensure_finite(p, "p"), ensure_finite(q, "q")
    _require(p.real > 0 and q.real > 0, f"Points must lie in the right half-plane: {p}, {q}")
    ratio = abs(p - q) / abs(p + q.conjugate())
    return _atanh_or_inf(ratio)


def halfplane_royden(v: TangentVector2) -> float:
    """Royden length of the fiber part (w; dw) of ``v`` in the right half-plane."""
    w = v.base.w
    _require(w.real > 0, f"Fiber point must lie in the right half-plane: {w}")
    return abs(v.dw) / (2.0 * w.real)


def halfplane_point_royden(w: complex, dw: complex) -> float:
    _require(w.real > 0, f"Point must lie in the right half-plane: {w}")
    return abs(dw) / (2.0 * w.real)


def cayley(w: complex) -> complex:
    """Right half-plane -> unit disc, 1 -> 0."""
    return (1 - w) / (1 + w)


def inverse_cayley(x: complex) -> complex:
    return (1 - x) / (1 + x)


def strip_to_halfplane(zeta: complex, lo: float, height: float) -> complex:
    """Conformal map of the strip {lo < Re zeta < lo + height} onto {Re > 0}.

    The centerline is sent to the positive real axis.
    """
    return -1j * cmath.exp(1j * math.pi * (zeta - lo) / height)


def halfplane_to_strip(u: complex, lo: float, height: float) -> complex:
    return lo + height * cmath.log(1j * u) / (1j * math.pi)


def strip_distance(a: complex, b: complex, lo: float, height: float) -> float:
    """Kobayashi distance of the strip {lo < Re zeta < lo + height}.

    Evaluated through the half-plane image in a form that stays accurate
    for lifts far apart along the strip.
    """
    xa, xb = a.real - lo, b.real - lo
    _require(0 < xa < height and 0 < xb < height, f"Points must lie in the strip: {a}, {b}")
    scale = math.pi / height
    along = math.sinh(0.5 * scale * (b.imag - a.imag)) ** 2
    across = math.sin(0.5 * scale * (a.real - b.real)) ** 2
    denom = math.sin(scale * xa) * math.sin(scale * xb)
    return math.asinh(math.sqrt((along + across) / denom))


def strip_royden(zeta: complex, dzeta: complex, lo: float, height: float) -> float:
    x = zeta.real - lo
    _require(0 < x < height, f"Point must lie in the strip: {zeta}")
    return math.pi * abs(dzeta) / (2.0 * height * math.sin(math.pi * x / height))


def deck_minimum(lift_distance: Callable[[int], float], start_range: int = DEFAULT_DECK_RANGE) -> Tuple[float, int]:
    """Minimize over deck indices, doubling the search range until the minimizer is interior."""
    k_max = start_range
    while True:
        values = [(lift_distance(k), k) for k in range(-k_max, k_max + 1)]
        best_value, best_k = min(values, key=lambda item: (item[0], abs(item[1])))
        if abs(best_k) < k_max:
            return best_value, best_k
        if k_max >= MAX_DECK_RANGE:
            raise SearchExhaustedError(f"Deck index search exhausted at K_max={k_max}")
        logger.warning(f"Deck minimizer on search boundary (k={best_k}); doubling K_max to {2 * k_max}")
        k_max *= 2


def annulus_distance(
    p: complex, q: complex, inner: float, outer: float, k_max: int = DEFAULT_DECK_RANGE
) -> float:
    """Kobayashi distance of the annulus {inner < |z| < outer} via its strip cover."""
    p, q = ensure_finite(p, "p"), ensure_finite(q, "q")
    _require(0 < inner < outer, "Annulus needs 0 < inner < outer")
    _require(inner < abs(p) < outer and inner < abs(q) < outer, f"Points must lie in the annulus: {p}, {q}")
    if p == q:
        return 0.0
    lo, height = math.log(inner), math.log(outer / inner)
    zp, zq = cmath.log(p), cmath.log(q)
    value, _ = deck_minimum(lambda k: strip_distance(zp, zq + 2j * math.pi * k, lo, height), k_max)
    return value


def annulus_royden(z: complex, dz: complex, inner: float, outer: float) -> float:
    _require(inner < abs(z) < outer, f"Point must lie in the annulus: {z}")
    lo, height = math.log(inner), math.log(outer / inner)
    return strip_royden(cmath.log(z), dz / z, lo, height)


def disc_geodesic(a: complex, b: complex, t: float) -> complex:
    """Point at distance ``t`` from ``a`` on the disc geodesic towards ``b``."""
    if a == b:
        return a
    m = (b - a) / (1 - a.conjugate() * b)
    x = math.tanh(t) * m / abs(m)
    return (x + a) / (1 + a.conjugate() * x)


def halfplane_ray_geodesic(u0: complex, t: float) -> complex:
    """Unit-speed geodesic of {Re u > 0} through ``u0`` along the horizontal ray."""
    return complex(u0.real * math.exp(2.0 * t), u0.imag)


def _gd(x: float) -> float:
    return math.asin(math.tanh(x))


def _gd_inverse(psi: float) -> float:
    return math.atanh(math.sin(psi))


def strip_cross_geodesic(zeta0: complex, t: float, lo: float, height: float) -> complex:
    """Unit-speed geodesic across the strip through ``zeta0`` (Im constant).

    Positive ``t`` moves towards Re zeta = lo + height.
    """
    psi0 = math.pi * (zeta0.real - lo) / height - 0.5 * math.pi
    psi = _gd(2.0 * t + _gd_inverse(psi0))
    return complex(lo + height * (psi + 0.5 * math.pi) / math.pi, zeta0.imag)


def annulus_radial_geodesic(z0: complex, t: float, inner: float, outer: float) -> complex:
    """Unit-speed radial geodesic of the annulus through ``z0``; ``t > 0`` moves outward."""
    lo, height = math.log(inner), math.log(outer / inner)
    return cmath.exp(strip_cross_geodesic(cmath.log(z0), t, lo, height))


class PlanarDomain(MetricOracle[ComplexPoint2]):
    """A planar model domain acting on the base coordinate of a point."""

    accuracy = AccuracyClass.exact()
    dimension = 2

    @abstractmethod
    def planar_contains(self, a: complex) -> bool:
        """Membership of a planar point."""

    @abstractmethod
    def planar_distance(self, a: complex, b: complex) -> float:
        """Kobayashi distance between planar points."""

    @abstractmethod
    def planar_royden(self, a: complex, da: complex) -> float:
        """Kobayashi-Royden length of ``da`` at ``a``."""

    @abstractmethod
    def planar_margin(self, a: np.ndarray) -> np.ndarray:
        """Positive inside the domain, batched."""

    @abstractmethod
    def planar_royden_array(self, a: np.ndarray, da: np.ndarray) -> np.ndarray:
        """Batched Kobayashi-Royden lengths."""

    def distance(self, p: ComplexPoint2, q: ComplexPoint2) -> float:
        return self.planar_distance(p.z, q.z)

    def royden(self, v: TangentVector2) -> float:
        return self.planar_royden(v.base.z, v.dz)

    def contains(self, p: ComplexPoint2) -> bool:
        return self.planar_contains(p.z)

    def margin_arrays(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        return self.planar_margin(np.asarray(z, dtype=complex))

    def royden_arrays(self, z: np.ndarray, w: np.ndarray, dz: np.ndarray, dw: np.ndarray) -> np.ndarray:
        return self.planar_royden_array(np.asarray(z, dtype=complex), np.asarray(dz, dtype=complex))


class UnitDisc(PlanarDomain):
    def planar_contains(self, a: complex) -> bool:
        return abs(a) < 1

    def planar_distance(self, a: complex, b: complex) -> float:
        return disc_distance(a, b)

    def planar_royden(self, a: complex, da: complex) -> float:
        return disc_royden(a, da)

    def planar_margin(self, a: np.ndarray) -> np.ndarray:
        return 1.0 - np.abs(a)

    def planar_royden_array(self, a: np.ndarray, da: np.ndarray) -> np.ndarray:
        return np.abs(da) / (1.0 - np.abs(a) ** 2)


class RightHalfPlane(PlanarDomain):
    def planar_contains(self, a: complex) -> bool:
        return a.real > 0

    def planar_distance(self, a: complex, b: complex) -> float:
        return halfplane_distance(a, b)

    def planar_royden(self, a: complex, da: complex) -> float:
        return halfplane_point_royden(a, da)

    def planar_margin(self, a: np.ndarray) -> np.ndarray:
        return a.real

    def planar_royden_array(self, a: np.ndarray, da: np.ndarray) -> np.ndarray:
        return np.abs(da) / (2.0 * a.real)


class Strip(PlanarDomain):
    """Vertical strip {lo < Re zeta < lo + height}."""

    def __init__(self, height: float, lo: float = 0.0):
        _require(height > 0, "Strip height must be positive")
        self.height = float(height)
        self.lo = float(lo)

    def planar_contains(self, a: complex) -> bool:
        return self.lo < a.real < self.lo + self.height

    def planar_distance(self, a: complex, b: complex) -> float:
        return strip_distance(a, b, self.lo, self.height)

    def planar_royden(self, a: complex, da: complex) -> float:
        return strip_royden(a, da, self.lo, self.height)

    def planar_margin(self, a: np.ndarray) -> np.ndarray:
        x = a.real - self.lo
        return np.minimum(x, self.height - x)

    def planar_royden_array(self, a: np.ndarray, da: np.ndarray) -> np.ndarray:
        x = a.real - self.lo
        return math.pi * np.abs(da) / (2.0 * self.height * np.sin(math.pi * x / self.height))


class Annulus(PlanarDomain):
    def __init__(self, inner: float, outer: float):
        _require(0 < inner < outer, "Annulus needs 0 < inner < outer")
        self.inner = float(inner)
        self.outer = float(outer)

    @property
    def log_strip(self) -> Strip:
        return Strip(math.log(self.outer / self.inner), math.log(self.inner))

    def planar_contains(self, a: complex) -> bool:
        return self.inner < abs(a) < self.outer

    def planar_distance(self, a: complex, b: complex) -> float:
        return annulus_distance(a, b, self.inner, self.outer)

    def planar_royden(self, a: complex, da: complex) -> float:
        return annulus_royden(a, da, self.inner, self.outer)

    def planar_margin(self, a: np.ndarray) -> np.ndarray:
        r = np.abs(a)
        return np.minimum(r - self.inner, self.outer - r)

    def planar_royden_array(self, a: np.ndarray, da: np.ndarray) -> np.ndarray:
        strip = self.log_strip
        with np.errstate(divide="ignore", invalid="ignore"):
            return strip.planar_royden_array(np.log(a), da / a)


class Product(MetricOracle[ComplexPoint2]):
    """Product of two planar domains; first factor on z, second on w."""

    accuracy = AccuracyClass.exact()
    dimension = 4

    def __init__(self, first: PlanarDomain, second: PlanarDomain):
        self.first = first
        self.second = second

    def contains(self, p: ComplexPoint2) -> bool:
        return self.first.planar_contains(p.z) and self.second.planar_contains(p.w)

    def distance(self, p: ComplexPoint2, q: ComplexPoint2) -> float:
        return product_distance(self.first, self.second, p, q)

    def royden(self, v: TangentVector2) -> float:
        return max(
            self.first.planar_royden(v.base.z, v.dz),
            self.second.planar_royden(v.base.w, v.dw),
        )

    def margin_arrays(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        return np.minimum(
            self.first.planar_margin(np.asarray(z, dtype=complex)),
            self.second.planar_margin(np.asarray(w, dtype=complex)),
        )

    def royden_arrays(self, z: np.ndarray, w: np.ndarray, dz: np.ndarray, dw: np.ndarray) -> np.ndarray:
        return np.maximum(
            self.first.planar_royden_array(np.asarray(z, dtype=complex), np.asarray(dz, dtype=complex)),
            self.second.planar_royden_array(np.asarray(w, dtype=complex), np.asarray(dw, dtype=complex)),
        )


ModelDomain = PlanarDomain | Product


def product_distance(dA: PlanarDomain, dB: PlanarDomain, p: ComplexPoint2, q: ComplexPoint2) -> float:
    """Kobayashi distance of a product: the max of the factor distances."""
    _require(dA.planar_contains(p.z) and dA.planar_contains(q.z), "Base coordinates outside first factor")
    _require(dB.planar_contains(p.w) and dB.planar_contains(q.w), "Fiber coordinates outside second factor")
    return max(dA.planar_distance(p.z, q.z), dB.planar_distance(p.w, q.w))
