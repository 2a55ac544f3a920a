"""Value types shared by every domain: points, tangent vectors, intervals, forms."""

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from models.errors import DomainViolationError

# Coordinates are plain Python complex numbers; finiteness is checked where a
# scalar enters a value type.
ComplexScalar = complex


def ensure_finite(value: complex, name: str = "value") -> complex:
    """Return ``value`` as a complex number, rejecting NaN and infinities."""
    scalar = complex(value)
    if not cmath.isfinite(scalar):
        raise DomainViolationError(f"{name} must be finite, got {scalar!r}")
    return scalar


@dataclass(frozen=True)
class ComplexPoint2:
    """A point (z, w): base coordinate z, fiber coordinate w."""

    z: complex
    w: complex = 0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", ensure_finite(self.z, "z"))
        object.__setattr__(self, "w", ensure_finite(self.w, "w"))

    def as_real(self) -> Tuple[float, float, float, float]:
        """Real coordinates (Re z, Im z, Re w, Im w)."""
        return (self.z.real, self.z.imag, self.w.real, self.w.imag)

    @classmethod
    def from_real(cls, coords: Iterable[float]) -> "ComplexPoint2":
        x, y, u, v = (float(c) for c in coords)
        return cls(complex(x, y), complex(u, v))

    def __sub__(self, other: "ComplexPoint2") -> Tuple[complex, complex]:
        return (self.z - other.z, self.w - other.w)


@dataclass(frozen=True)
class TangentVector2:
    """A tangent vector (dz, dw) based at a point."""

    base: ComplexPoint2
    dz: complex = 0j
    dw: complex = 0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "dz", ensure_finite(self.dz, "dz"))
        object.__setattr__(self, "dw", ensure_finite(self.dw, "dw"))

    def norm(self) -> float:
        """Euclidean norm of (dz, dw) in C^2."""
        return math.hypot(abs(self.dz), abs(self.dw))

    def is_zero(self) -> bool:
        return self.dz == 0 and self.dw == 0

    def scaled(self, t: complex) -> "TangentVector2":
        return TangentVector2(self.base, self.dz * t, self.dw * t)

    def require_nonzero(self) -> None:
        if self.is_zero():
            raise DomainViolationError("Metric evaluation needs a nonzero vector")


@dataclass(frozen=True)
class RealInterval:
    """A compact interval [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainViolationError("Interval endpoints must be finite")
        if not self.lo < self.hi:
            raise DomainViolationError(f"Interval needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, t: float) -> bool:
        """Closed membership."""
        return self.lo <= t <= self.hi

    def contains_open(self, t: float) -> bool:
        return self.lo < t < self.hi

    def contains_interval_in_interior(self, other: "RealInterval") -> bool:
        """True if ``other`` is a subset of the interior of this interval."""
        return self.lo < other.lo and other.hi < self.hi

    def as_tuple(self) -> Tuple[float, float]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class HermitianForm2:
    """A 2x2 Hermitian matrix [[h11, h12], [h21, h22]]."""

    h11: complex
    h12: complex
    h21: complex
    h22: complex

    def __post_init__(self) -> None:
        entries = [ensure_finite(e, "entry") for e in (self.h11, self.h12, self.h21, self.h22)]
        scale = max(1.0, max(abs(e) for e in entries))
        tol = 1e-12 * scale
        if abs(entries[0].imag) > tol or abs(entries[3].imag) > tol:
            raise DomainViolationError("Diagonal entries of a Hermitian form must be real")
        if abs(entries[2] - entries[1].conjugate()) > tol:
            raise DomainViolationError("h21 must be the conjugate of h12")
        object.__setattr__(self, "h11", complex(entries[0].real, 0.0))
        object.__setattr__(self, "h12", entries[1])
        object.__setattr__(self, "h21", entries[1].conjugate())
        object.__setattr__(self, "h22", complex(entries[3].real, 0.0))

    @classmethod
    def from_entries(cls, h11: float, h12: complex, h22: float) -> "HermitianForm2":
        return cls(complex(h11), complex(h12), complex(h12).conjugate(), complex(h22))

    @classmethod
    def identity(cls) -> "HermitianForm2":
        return cls.from_entries(1.0, 0j, 1.0)

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.h11, self.h12], [self.h21, self.h22]], dtype=complex)

    def __add__(self, other: "HermitianForm2") -> "HermitianForm2":
        return HermitianForm2.from_entries(
            (self.h11 + other.h11).real, self.h12 + other.h12, (self.h22 + other.h22).real
        )

    def scaled(self, factor: float) -> "HermitianForm2":
        return HermitianForm2.from_entries(
            factor * self.h11.real, factor * self.h12, factor * self.h22.real
        )


def hermitian_apply_complex(h: HermitianForm2, a: complex, b: complex) -> complex:
    """conj(a, b)^T H (a, b) in full complex arithmetic."""
    ca, cb = a.conjugate(), b.conjugate()
    return ca * (h.h11 * a + h.h12 * b) + cb * (h.h21 * a + h.h22 * b)


def hermitian_apply(h: HermitianForm2, a: complex, b: complex) -> float:
    """Evaluate the Hermitian form on (a, b); the result is real."""
    return hermitian_apply_complex(h, complex(a), complex(b)).real


def min_eigenvalue(h: HermitianForm2) -> float:
    """Smaller eigenvalue of a 2x2 Hermitian matrix (closed form)."""
    a, d = h.h11.real, h.h22.real
    half_trace = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), abs(h.h12))
    return half_trace - radius


def max_eigenvalue(h: HermitianForm2) -> float:
    a, d = h.h11.real, h.h22.real
    return 0.5 * (a + d) + math.hypot(0.5 * (a - d), abs(h.h12))


def points_to_arrays(points: Iterable[ComplexPoint2]) -> Tuple[np.ndarray, np.ndarray]:
    """Split a point sequence into complex arrays (z, w) for batched evaluation."""
    pts: List[ComplexPoint2] = list(points)
    z = np.fromiter((p.z for p in pts), dtype=complex, count=len(pts))
    w = np.fromiter((p.w for p in pts), dtype=complex, count=len(pts))
    return z, w
