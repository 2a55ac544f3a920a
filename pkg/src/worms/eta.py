"""The cap function eta: flat on I, strictly convex off I, equal to 1 on the boundary of J."""

import logging
import math
from typing import Optional, Protocol, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from models.errors import SpecValidationError
from models.geometry import RealInterval

logger = logging.getLogger(__name__)

QUAD_TOLERANCE = 1e-13
RICHARDSON_STEP = 1e-4


def bump(x: float) -> float:
    """h(x) = exp(-1/x) for x > 0, else 0."""
    return math.exp(-1.0 / x) if x > 0 else 0.0


def bump_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    positive = x > 0
    out[positive] = np.exp(-1.0 / x[positive])
    return out


def first_antiderivative(s: float) -> float:
    """h1(s) = integral of h over [0, s]."""
    if s <= 0:
        return 0.0
    value, _ = integrate.quad(bump, 0.0, s, epsabs=QUAD_TOLERANCE, epsrel=QUAD_TOLERANCE, limit=200)
    return value


def flat_profile(s: float) -> float:
    """h2(s) = integral over [0, s] of (s - t) h(t) dt; so h2'' = h."""
    if s <= 0:
        return 0.0
    value, _ = integrate.quad(
        lambda t: (s - t) * bump(t), 0.0, s, epsabs=QUAD_TOLERANCE, epsrel=QUAD_TOLERANCE, limit=200
    )
    return value


class ProfileTable:
    """Memoized h1 and h2 on [0, s_max] with cubic interpolation; quadrature beyond."""

    def __init__(self, s_max: float, grid_step: float = 0.01, extra_nodes: Sequence[float] = ()):
        if s_max <= 0 or grid_step <= 0:
            raise SpecValidationError("Profile table needs positive extent and step")
        count = max(int(math.ceil(s_max / grid_step)), 4) + 1
        nodes = np.concatenate([np.linspace(0.0, s_max, count), [s for s in extra_nodes if 0 < s < s_max]])
        self.grid = np.unique(nodes)
        count = len(self.grid)
        self.s_max = s_max
        h1 = np.array([first_antiderivative(s) for s in self.grid])
        h2 = np.array([flat_profile(s) for s in self.grid])
        # h2' = h1 and h1' = h are known exactly at the ends
        self._h2 = CubicSpline(self.grid, h2, bc_type=((1, 0.0), (1, float(h1[-1]))))
        self._h1 = CubicSpline(self.grid, h1, bc_type=((1, 0.0), (1, bump(s_max))))
        logger.debug(f"Built eta profile table with {count} nodes up to s={s_max:.4f}")

    def h2(self, s: float) -> float:
        if s <= 0:
            return 0.0
        if s > self.s_max:
            return flat_profile(s)
        return float(self._h2(s))

    def h1(self, s: float) -> float:
        if s <= 0:
            return 0.0
        if s > self.s_max:
            return first_antiderivative(s)
        return float(self._h1(s))

    def h2_array(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        inside = (s > 0) & (s <= self.s_max)
        out[inside] = self._h2(s[inside])
        for idx in np.flatnonzero(s > self.s_max):
            out.flat[idx] = flat_profile(float(s.flat[idx]))
        return out


class CapFunction(Protocol):
    """What the Worm needs from eta."""

    inner: RealInterval
    outer: RealInterval

    def __call__(self, t: float) -> float:
        ...

    def values(self, t: np.ndarray) -> np.ndarray:
        ...

    def first_derivative(self, t: float) -> float:
        ...

    def second_derivative(self, t: float) -> float:
        ...

    def second_difference(self, t: float, step: float = ...) -> float:
        ...


class EtaFunction:
    """eta(t) = alpha_plus h2(t - I.hi) + alpha_minus h2(I.lo - t)."""

    def __init__(
        self,
        inner: RealInterval,
        outer: RealInterval,
        grid_step: float = 0.01,
        alpha_plus: Optional[float] = None,
        alpha_minus: Optional[float] = None,
        calibrate: bool = True,
    ):
        if not outer.contains_interval_in_interior(inner):
            raise SpecValidationError(f"I={inner.as_tuple()} must lie in the interior of J={outer.as_tuple()}")
        self.inner = inner
        self.outer = outer
        self.grid_step = grid_step
        right_gap = outer.hi - inner.hi
        left_gap = inner.lo - outer.lo
        self.table = ProfileTable(max(right_gap, left_gap), grid_step, extra_nodes=(right_gap, left_gap))
        if calibrate:
            alpha_plus = 1.0 / flat_profile(right_gap)
            alpha_minus = 1.0 / flat_profile(left_gap)
        if alpha_plus is None or alpha_minus is None or alpha_plus <= 0 or alpha_minus <= 0:
            raise SpecValidationError("eta needs positive alpha_plus and alpha_minus")
        self.alpha_plus = float(alpha_plus)
        self.alpha_minus = float(alpha_minus)
        logger.debug(f"eta calibrated: alpha_plus={self.alpha_plus:.6g}, alpha_minus={self.alpha_minus:.6g}")

    def __call__(self, t: float) -> float:
        return self.alpha_plus * self.table.h2(t - self.inner.hi) + self.alpha_minus * self.table.h2(
            self.inner.lo - t
        )

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.alpha_plus * self.table.h2_array(t - self.inner.hi) + self.alpha_minus * self.table.h2_array(
            self.inner.lo - t
        )

    def first_derivative(self, t: float) -> float:
        return self.alpha_plus * self.table.h1(t - self.inner.hi) - self.alpha_minus * self.table.h1(
            self.inner.lo - t
        )

    def second_derivative(self, t: float) -> float:
        """Exact: h2'' = h."""
        return self.alpha_plus * bump(t - self.inner.hi) + self.alpha_minus * bump(self.inner.lo - t)

    def second_difference(self, t: float, step: float = RICHARDSON_STEP) -> float:
        """Richardson-extrapolated central second difference of eta."""

        def central(h: float) -> float:
            return (self(t + h) - 2.0 * self(t) + self(t - h)) / (h * h)

        return (4.0 * central(0.5 * step) - central(step)) / 3.0

    def with_flipped_convexity(self) -> "ConcaveCap":
        return ConcaveCap(self.inner, self.outer)


class ConcaveCap:
    """Corrupted cap for negative controls: concave off I, still 0 on I and 1 on the boundary of J."""

    def __init__(self, inner: RealInterval, outer: RealInterval):
        self.inner = inner
        self.outer = outer
        self._right = outer.hi - inner.hi
        self._left = inner.lo - outer.lo

    def __call__(self, t: float) -> float:
        if t > self.inner.hi:
            return math.sqrt((t - self.inner.hi) / self._right)
        if t < self.inner.lo:
            return math.sqrt((self.inner.lo - t) / self._left)
        return 0.0

    def values(self, t: np.ndarray) -> np.ndarray:
        return np.array([self(float(x)) for x in np.ravel(t)]).reshape(np.shape(t))

    def first_derivative(self, t: float) -> float:
        if t > self.inner.hi:
            return 0.5 / math.sqrt(self._right * (t - self.inner.hi))
        if t < self.inner.lo:
            return -0.5 / math.sqrt(self._left * (self.inner.lo - t))
        return 0.0

    def second_derivative(self, t: float) -> float:
        if t > self.inner.hi:
            return -0.25 / (math.sqrt(self._right) * (t - self.inner.hi) ** 1.5)
        if t < self.inner.lo:
            return -0.25 / (math.sqrt(self._left) * (self.inner.lo - t) ** 1.5)
        return 0.0

    def second_difference(self, t: float, step: float = RICHARDSON_STEP) -> float:
        return self.second_derivative(t)
