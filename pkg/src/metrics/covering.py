"""Exact Kobayashi geometry of annular pre-Worms through their universal cover.

The cover of Z(A, theta) with theta = log|z|^2 is strip x half-plane via
(zeta, u) = (log z, e^{-2i zeta} w), with deck group generated by
(zeta, u) -> (zeta + 2 pi i, e^{4 pi} u).
"""

import cmath
import logging
import math
from typing import Sequence, Tuple

import numpy as np

from metrics.exact import (
    DEFAULT_DECK_RANGE,
    deck_minimum,
    halfplane_point_royden,
    log_polar_distance,
    strip_distance,
    strip_royden,
)
from models.errors import DomainViolationError
from models.geometry import ComplexPoint2, TangentVector2, points_to_arrays
from models.oracle import AccuracyClass, MetricOracle
from worms.preworm import PreWormSpec, lift, preworm_contains

logger = logging.getLogger(__name__)

DECK_FIBER_LOG_SHIFT = 4.0 * math.pi


class CoveringOracle(MetricOracle[ComplexPoint2]):
    """k and K of an annular pre-Worm: min over deck translates of the product distance."""

    accuracy = AccuracyClass.exact()

    def __init__(self, spec: PreWormSpec, k_max: int = DEFAULT_DECK_RANGE):
        if not spec.is_annular:
            raise DomainViolationError("The covering oracle needs an annular base")
        self.spec = spec
        self.k_max = k_max
        self.lo, self.height = spec.log_strip()

    def contains(self, p: ComplexPoint2) -> bool:
        return preworm_contains(self.spec, p)

    def _lift_checked(self, p: ComplexPoint2) -> Tuple[complex, complex]:
        if not self.contains(p):
            raise DomainViolationError(f"Point {p} is outside the pre-Worm")
        return lift(self.spec, p)

    def lift_distance(self, a: Tuple[complex, complex], b: Tuple[complex, complex], k: int) -> float:
        """Product distance between lift ``a`` and the k-th deck translate of lift ``b``."""
        (zeta_a, u_a), (zeta_b, u_b) = a, b
        base = strip_distance(zeta_a, zeta_b + 2j * math.pi * k, self.lo, self.height)
        log_gap = math.log(abs(u_b)) + DECK_FIBER_LOG_SHIFT * k - math.log(abs(u_a))
        fiber = log_polar_distance(log_gap, cmath.phase(u_a), cmath.phase(u_b))
        return max(base, fiber)

    def chart_distance(self, p: ComplexPoint2, q: ComplexPoint2) -> float:
        """Product distance of the principal lifts (one trivializing chart, no deck search)."""
        return self.lift_distance(self._lift_checked(p), self._lift_checked(q), 0)

    def distance(self, p: ComplexPoint2, q: ComplexPoint2) -> float:
        a, b = self._lift_checked(p), self._lift_checked(q)
        if p == q:
            return 0.0
        value, _ = deck_minimum(lambda k: self.lift_distance(a, b, k), self.k_max)
        return value

    def royden(self, v: TangentVector2) -> float:
        """max(K_strip(dzeta), K_halfplane(du)), dzeta = dz/z, du = e^{-2i zeta}(dw - 2i w dzeta)."""
        zeta, u = self._lift_checked(v.base)
        dzeta = v.dz / v.base.z
        du = cmath.exp(-2j * zeta) * (v.dw - 2j * v.base.w * dzeta)
        return max(strip_royden(zeta, dzeta, self.lo, self.height), halfplane_point_royden(u, du))

    def base_distance(self, p: ComplexPoint2, q: ComplexPoint2) -> float:
        """Distance of the projections in the annular base."""
        za, zb = cmath.log(p.z), cmath.log(q.z)
        value, _ = deck_minimum(
            lambda k: strip_distance(za, zb + 2j * math.pi * k, self.lo, self.height), self.k_max
        )
        return value

    def margin_arrays(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Positive inside: min of the strip margin (in units of its width) and cos arg u."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            zeta = np.log(z)
            x = (zeta.real - self.lo) / self.height
            u = np.exp(-2j * zeta) * w
            fiber = np.where(np.abs(u) > 0, u.real / np.abs(u), -1.0)
        out = np.minimum(np.minimum(x, 1.0 - x), fiber)
        return np.where(np.isfinite(out), out, -1.0)

    def royden_arrays(self, z: np.ndarray, w: np.ndarray, dz: np.ndarray, dw: np.ndarray) -> np.ndarray:
        z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
        dz, dw = np.asarray(dz, dtype=complex), np.asarray(dw, dtype=complex)
        zeta = np.log(z)
        dzeta = dz / z
        x = zeta.real - self.lo
        base = math.pi * np.abs(dzeta) / (2.0 * self.height * np.sin(math.pi * x / self.height))
        u = np.exp(-2j * zeta) * w
        du = np.exp(-2j * zeta) * (dw - 2j * w * dzeta)
        fiber = np.abs(du) / (2.0 * u.real)
        return np.maximum(base, fiber)

    def distance_matrix(self, xs: Sequence[ComplexPoint2], ys: Sequence[ComplexPoint2]) -> np.ndarray:
        """Pairwise distances, vectorized over a fixed deck window with doubling on the boundary."""
        za, wa = points_to_arrays(xs)
        zb, wb = points_to_arrays(ys)
        for p in list(xs) + list(ys):
            if not self.contains(p):
                raise DomainViolationError(f"Point {p} is outside the pre-Worm")
        zeta_a, zeta_b = np.log(za), np.log(zb)
        u_a, u_b = np.exp(-2j * zeta_a) * wa, np.exp(-2j * zeta_b) * wb
        k_max = self.k_max
        while True:
            ks = np.arange(-k_max, k_max + 1)
            values = self._lift_grid(zeta_a, u_a, zeta_b, u_b, ks)
            best = np.argmin(values, axis=2)
            on_edge = (ks[best] == -k_max) | (ks[best] == k_max)
            if not np.any(on_edge) or k_max >= 1 << 10:
                out = np.min(values, axis=2)
                break
            logger.warning(f"Deck minimizer on search boundary; doubling K_max to {2 * k_max}")
            k_max *= 2
        same = (za[:, None] == zb[None, :]) & (wa[:, None] == wb[None, :])
        out[same] = 0.0
        return out

    def _lift_grid(
        self, zeta_a: np.ndarray, u_a: np.ndarray, zeta_b: np.ndarray, u_b: np.ndarray, ks: np.ndarray
    ) -> np.ndarray:
        scale = math.pi / self.height
        xa = (zeta_a.real - self.lo)[:, None, None]
        xb = (zeta_b.real - self.lo)[None, :, None]
        dy = zeta_b.imag[None, :, None] + 2.0 * math.pi * ks[None, None, :] - zeta_a.imag[:, None, None]
        along = np.sinh(0.5 * scale * dy) ** 2
        across = np.sin(0.5 * scale * (xa - xb)) ** 2
        with np.errstate(over="ignore"):
            base = np.arcsinh(np.sqrt((along + across) / (np.sin(scale * xa) * np.sin(scale * xb))))
            log_gap = (
                np.log(np.abs(u_b))[None, :, None]
                + DECK_FIBER_LOG_SHIFT * ks[None, None, :]
                - np.log(np.abs(u_a))[:, None, None]
            )
            arg_a = np.angle(u_a)[:, None, None]
            arg_b = np.angle(u_b)[None, :, None]
            fiber_along = np.sinh(0.5 * log_gap) ** 2
            fiber_across = np.sin(0.5 * (arg_a - arg_b)) ** 2
            fiber = np.arcsinh(np.sqrt((fiber_along + fiber_across) / (np.cos(arg_a) * np.cos(arg_b))))
        return np.maximum(base, fiber)
