"""Closed-form two-sided bounds for the Kobayashi-Royden metric of Worm-type domains."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from metrics.domains import DomainHandle, evaluate_bounds
from models.errors import DomainViolationError
from models.geometry import TangentVector2
from worms.worm import WormSpec

logger = logging.getLogger(__name__)

BALANCE_ITERATIONS = 60


@dataclass(frozen=True)
class RoydenEstimate:
    """A one-sided estimate of K(v); ``flagged`` marks the trivial fallback."""

    value: float
    flagged: bool = False
    source: str = ""


def royden_lower(domain: DomainHandle, v: TangentVector2) -> RoydenEstimate:
    """Max of the lower bounds from enclosing domains with computable metric.

    Returns 0, flagged, when no enclosing oracle is available.
    """
    v.require_nonzero()
    if not domain.contains(v.base):
        raise DomainViolationError(f"{v.base} is outside {domain.name}")
    bounds = domain.lower_bounds()
    arrays = [np.array([x]) for x in (v.base.z, v.base.w, v.dz, v.dw)]
    best_value, best_source = 0.0, ""
    for source, fn in bounds.items():
        value = evaluate_bounds({source: fn}, *arrays, combine="max")
        if value is not None and float(value[0]) > best_value:
            best_value, best_source = float(value[0]), source
    if not bounds:
        logger.warning(f"No enclosing oracle for {domain.name}; lower bound is 0")
        return RoydenEstimate(0.0, flagged=True, source="none")
    return RoydenEstimate(best_value, flagged=False, source=best_source)


def closed_form_upper(domain: DomainHandle, v: TangentVector2) -> RoydenEstimate:
    """Min of the closed-form upper bounds; infinite and flagged when none applies."""
    v.require_nonzero()
    arrays = [np.array([x]) for x in (v.base.z, v.base.w, v.dz, v.dw)]
    value = evaluate_bounds(domain.upper_bounds(), *arrays, combine="min")
    if value is None or not math.isfinite(float(value[0])):
        return RoydenEstimate(math.inf, flagged=True, source="none")
    return RoydenEstimate(float(value[0]), source="closed_form")


def _half_strip_metric(x: np.ndarray, height: float, depth: np.ndarray, dzeta: np.ndarray) -> np.ndarray:
    """K of {0 < Re < height, Im > 0} at a point with Re = x, Im = depth.

    sin((pi/h) s - pi/2) maps the half-strip onto the upper half-plane.
    """
    scale = math.pi / height
    s_re = scale * x - 0.5 * math.pi
    s_im = scale * depth
    cos_abs = np.sqrt(np.cos(s_re) ** 2 * np.cosh(s_im) ** 2 + np.sin(s_re) ** 2 * np.sinh(s_im) ** 2)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = cos_abs * scale * np.abs(dzeta) / (2.0 * np.cos(s_re) * np.sinh(s_im))
    return np.where(depth > 0, out, np.inf)


def inscribed_royden_upper_arrays(
    spec: WormSpec,
    scale: float,
    z: np.ndarray,
    w: np.ndarray,
    dz: np.ndarray,
    dw: np.ndarray,
) -> np.ndarray:
    """Upper bound for K of B_scale(W) (classical angle) over theta^{-1}(I).

    In cover coordinates zeta = log z, y = e^{2i zeta} / w the scaled Worm
    contains, for each depth D > 0, the image of the half-strip
    {a < Re zeta < a + h, Im zeta > Im zeta_0 - D} times the half-plane
    {Re y > e^{2D} |y_0| / (2 scale |Y_0|)}. The depth is balanced by
    bisection so the two factor metrics agree. Infinite outside theta^{-1}(I).
    """
    if not spec.angle.is_classical:
        raise DomainViolationError("Inscribed bounds need the classical angle function")
    z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
    dz, dw = np.asarray(dz, dtype=complex), np.asarray(dw, dtype=complex)
    lo, height = 0.5 * spec.inner.lo, 0.5 * spec.inner.length
    out = np.full(z.shape, np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        zeta = np.log(z)
        x = zeta.real - lo
        # Y = e^{2i Re zeta} / w; y = e^{-2 Im zeta} Y, and the ratios below are lift-free
        big_y = np.exp(2j * zeta.real) / w
        dzeta = dz / z
        d_log_y = 2j * dzeta - dw / w
        fiber_numerator = np.abs(big_y * d_log_y)
        depth_max = 0.5 * np.log(2.0 * scale * big_y.real)
    ok = (x > 0) & (x < height) & np.isfinite(depth_max) & (depth_max > 0) & (w != 0)
    if not np.any(ok):
        return out
    x, dzeta, big_y, numerator, depth_max = x[ok], dzeta[ok], big_y[ok], fiber_numerator[ok], depth_max[ok]

    def fiber(depth: np.ndarray) -> np.ndarray:
        gap = big_y.real - np.exp(2.0 * depth) / (2.0 * scale)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(gap > 0, numerator / (2.0 * np.where(gap > 0, gap, 1.0)), np.inf)

    def strip(depth: np.ndarray) -> np.ndarray:
        return _half_strip_metric(x, height, depth, dzeta)

    low = depth_max * 1e-9
    high = depth_max * (1.0 - 1e-9)
    # strip decreases and fiber increases in depth
    for _ in range(BALANCE_ITERATIONS):
        mid = 0.5 * (low + high)
        strip_wins = strip(mid) >= fiber(mid)
        low = np.where(strip_wins, mid, low)
        high = np.where(strip_wins, high, mid)
    candidates = np.minimum(
        np.maximum(strip(low), fiber(low)),
        np.maximum(strip(high), fiber(high)),
    )
    out[ok] = candidates
    return out


def inscribed_royden_upper(spec: WormSpec, scale: float, v: TangentVector2) -> float:
    """Scalar form of :func:`inscribed_royden_upper_arrays`."""
    v.require_nonzero()
    value = inscribed_royden_upper_arrays(
        spec, scale, np.array([v.base.z]), np.array([v.base.w]), np.array([v.dz]), np.array([v.dw])
    )
    return float(value[0])
