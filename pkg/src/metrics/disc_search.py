"""Upper bounds for the Kobayashi-Royden metric by searching one-pole analytic discs.

A disc phi(zeta) = p + s (zeta u + sum_{k>=2} c_k zeta^k) / (1 - a zeta) with
unit direction u and |a| < 1 certifies K(v) <= |v| / s whenever its sampled
images stay inside the domain. With a near the unit circle the family
contains the Cayley-type extremal discs of half-planes and strips.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from metrics.bounds import RoydenEstimate
from metrics.domains import FEASIBILITY_MARGIN, DomainHandle
from models.config import DEFAULT_SEED, DiscSearchSettings
from models.errors import DomainViolationError
from models.geometry import TangentVector2

logger = logging.getLogger(__name__)

BISECTION_STEPS = 40
AFFINE_RADII = (0.5, 1.0)
# pole parameters come first: a = MAX_POLE tanh|q| q/|q| for q = x0 + i x1
POLE_PARAMS = 2
MAX_POLE = 0.999
POLE_RADII = (0.5, 0.9, 0.99)
POLE_ANGLES = 8


@dataclass(frozen=True)
class DiscSearchConfig:
    """Extremal-disc search parameters."""

    degree: int = 6
    boundary_samples: int = 64
    radii: Tuple[float, ...] = (0.5, 0.8, 0.95)
    restarts: int = 4
    seed: int = DEFAULT_SEED
    max_iters: int = 400
    margin: float = FEASIBILITY_MARGIN
    sample_nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.degree < 1 or self.boundary_samples < 1 or self.restarts < 1 or self.max_iters < 1:
            raise DomainViolationError("Disc search parameters must be positive")
        radii = tuple(float(r) for r in self.radii)
        if not radii or any(not 0 < r < 1 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
            raise DomainViolationError("Disc search radii must increase strictly inside (0, 1)")
        object.__setattr__(self, "radii", radii)
        # The unit circle is always checked as well
        angles = 2.0 * math.pi * np.arange(self.boundary_samples) / self.boundary_samples
        nodes = np.concatenate([r * np.exp(1j * angles) for r in radii + (1.0,)])
        object.__setattr__(self, "sample_nodes", nodes)

    @classmethod
    def from_settings(cls, settings: DiscSearchSettings, seed: int = DEFAULT_SEED) -> "DiscSearchConfig":
        return cls(
            degree=settings.degree,
            boundary_samples=settings.boundary_samples,
            radii=tuple(settings.radii),
            restarts=settings.restarts,
            seed=seed,
            max_iters=settings.max_iters,
        )


def canonical_direction(v: TangentVector2) -> Tuple[complex, complex]:
    """Unit direction of v with the phase of its larger component removed."""
    norm = v.norm()
    lead = v.dz if abs(v.dz) >= abs(v.dw) else v.dw
    phase = lead / abs(lead)
    return (v.dz / norm / phase, v.dw / norm / phase)


def pole(params: np.ndarray) -> complex:
    """Pole parameter a inside the disc of radius MAX_POLE."""
    q = complex(params[0], params[1])
    if q == 0:
        return 0j
    return MAX_POLE * math.tanh(abs(q)) * q / abs(q)


def pole_params(a: complex) -> np.ndarray:
    """Inverse of ``pole`` for |a| < MAX_POLE."""
    if a == 0:
        return np.zeros(POLE_PARAMS)
    q = math.atanh(abs(a) / MAX_POLE) * a / abs(a)
    return np.array([q.real, q.imag])


class _DiscFamily:
    """One-pole discs through a fixed point along a fixed direction."""

    def __init__(self, domain: DomainHandle, z0: complex, w0: complex, direction: Tuple[complex, complex],
                 cfg: DiscSearchConfig):
        self.domain = domain
        self.z0, self.w0 = z0, w0
        self.uz, self.uw = direction
        self.cfg = cfg
        self.nodes = cfg.sample_nodes
        self.powers = np.vstack([self.nodes**k for k in range(2, cfg.degree + 1)]) if cfg.degree > 1 else None
        self.planar = domain.dimension == 2

    @property
    def blocks(self) -> int:
        return 2 if self.planar else 4

    @property
    def dimension(self) -> int:
        return POLE_PARAMS + self.blocks * (self.cfg.degree - 1)

    def _coefficients(self, params: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        count = self.cfg.degree - 1
        cz = params[:count] + 1j * params[count : 2 * count]
        if self.planar:
            return cz, np.zeros(count, dtype=complex)
        cw = params[2 * count : 3 * count] + 1j * params[3 * count :]
        return cz, cw

    def shapes(self, params: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(zeta u + sum c_k zeta^k) / (1 - a zeta) on the sample nodes; empty params give the affine disc."""
        shape_z = self.nodes * self.uz
        shape_w = self.nodes * self.uw
        if params.size == 0:
            return shape_z, shape_w
        if self.powers is not None:
            cz, cw = self._coefficients(params[POLE_PARAMS:])
            shape_z = shape_z + cz @ self.powers
            shape_w = shape_w + cw @ self.powers
        denominator = 1.0 - pole(params) * self.nodes
        return shape_z / denominator, shape_w / denominator

    def feasible(self, s: float, shape: Tuple[np.ndarray, np.ndarray], margin: float) -> bool:
        z = self.z0 + s * shape[0]
        w = self.w0 + s * shape[1]
        return bool(np.min(self.domain.margin_arrays(z, w)) >= margin)

    def largest_scale(self, params: np.ndarray, margin: float) -> float:
        """Largest s (by bracketing and bisection) keeping the sampled disc inside."""
        shape = self.shapes(params)
        if not self.feasible(0.0, shape, margin):
            return 0.0
        high = 1.0
        while self.feasible(high, shape, margin):
            high *= 2.0
            if high > 1e12:
                return high
        low = 0.0
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (low + high)
            if self.feasible(mid, shape, margin):
                low = mid
            else:
                high = mid
        return low


def _pad(params: np.ndarray, blocks: int, old: int, new: int) -> np.ndarray:
    if old == 0:
        return np.zeros(blocks * new)
    return np.pad(params.reshape(blocks, old), ((0, 0), (0, new - old))).ravel()


def _pole_seed(family: _DiscFamily, margin: float) -> np.ndarray:
    """Best pole of the pure Moebius discs zeta u / (1 - a zeta) over a polar grid of a."""
    best = np.zeros(POLE_PARAMS)
    best_scale = family.largest_scale(np.zeros(family.dimension), margin)
    padding = np.zeros(family.dimension - POLE_PARAMS)
    for radius in POLE_RADII:
        for k in range(POLE_ANGLES):
            candidate = pole_params(radius * cmath.exp(2j * math.pi * k / POLE_ANGLES))
            scale = family.largest_scale(np.concatenate([candidate, padding]), margin)
            if scale > best_scale:
                best, best_scale = candidate, scale
    return best


def _continuation_start(domain: DomainHandle, v: TangentVector2, cfg: DiscSearchConfig) -> np.ndarray:
    """Pole seeded on a grid, then coefficients optimized degree by degree, each stage warm-started from the last."""
    direction = canonical_direction(v)
    blocks = 2 if domain.dimension == 2 else 4
    params = np.zeros(0)
    for degree in range(1, cfg.degree + 1):
        family = _DiscFamily(domain, v.base.z, v.base.w, direction, replace(cfg, degree=degree))
        if degree == 1:
            params = _pole_seed(family, cfg.margin)
        else:
            params = np.concatenate([params[:POLE_PARAMS], _pad(params[POLE_PARAMS:], blocks, degree - 2, degree - 1)])
        result = minimize(
            lambda x: -family.largest_scale(x, cfg.margin),
            params,
            method="Nelder-Mead",
            options={"maxiter": cfg.max_iters, "xatol": 1e-6, "fatol": 1e-9, "adaptive": True},
        )
        if family.largest_scale(result.x, cfg.margin) >= family.largest_scale(params, cfg.margin):
            params = result.x
    return params


def royden_upper(domain: DomainHandle, v: TangentVector2, cfg: Optional[DiscSearchConfig] = None) -> RoydenEstimate:
    """Best disc-search upper bound for K(v); deterministic for a fixed seed.

    Falls back to the flagged affine bound with zero margin when no disc
    keeps the configured margin.
    """
    cfg = cfg or DiscSearchConfig()
    v.require_nonzero()
    if not domain.contains(v.base):
        raise DomainViolationError(f"{v.base} is outside {domain.name}")
    norm = v.norm()
    family = _DiscFamily(domain, v.base.z, v.base.w, canonical_direction(v), cfg)

    best = family.largest_scale(np.zeros(family.dimension), cfg.margin)
    if best <= 0:
        fallback = family.largest_scale(np.zeros(0), 0.0)
        logger.warning(f"No feasible disc at {v.base} with margin {cfg.margin}; using the affine fallback")
        value = norm / fallback if fallback > 0 else math.inf
        return RoydenEstimate(value, flagged=True, source="affine_fallback")

    rng = np.random.default_rng(cfg.seed)
    starts: List[np.ndarray] = [_continuation_start(domain, v, cfg)]
    starts += [0.3 * rng.standard_normal(family.dimension) for _ in range(cfg.restarts - 1)]
    for start in starts:
        best = max(best, family.largest_scale(start, cfg.margin))
        result = minimize(
            lambda params: -family.largest_scale(params, cfg.margin),
            start,
            method="Nelder-Mead",
            options={"maxiter": cfg.max_iters, "xatol": 1e-6, "fatol": 1e-9},
        )
        best = max(best, family.largest_scale(result.x, cfg.margin))
    logger.debug(f"Disc search at {v.base}: s = {best:.6g}")
    return RoydenEstimate(norm / best, source="disc_search")


def affine_royden_upper_arrays(
    domain: DomainHandle,
    z: np.ndarray,
    w: np.ndarray,
    dz: np.ndarray,
    dw: np.ndarray,
    angles: int = 24,
    iterations: int = 30,
    radii: Sequence[float] = AFFINE_RADII,
    margin: float = FEASIBILITY_MARGIN,
) -> np.ndarray:
    """Batched degree-1 disc bound |v| / s_max, s_max found by vectorized bisection."""
    z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
    dz, dw = np.asarray(dz, dtype=complex), np.asarray(dw, dtype=complex)
    norm = np.hypot(np.abs(dz), np.abs(dw))
    uz, uw = dz / norm, dw / norm
    phases = 2.0 * math.pi * np.arange(angles) / angles
    nodes = np.concatenate([r * np.exp(1j * phases) for r in radii])

    def feasible(s: np.ndarray) -> np.ndarray:
        zz = z[:, None] + s[:, None] * uz[:, None] * nodes[None, :]
        ww = w[:, None] + s[:, None] * uw[:, None] * nodes[None, :]
        margins = domain.margin_arrays(zz.ravel(), ww.ravel()).reshape(zz.shape)
        return np.min(margins, axis=1) >= margin

    high = np.ones_like(norm)
    grow = feasible(high)
    for _ in range(40):
        if not np.any(grow):
            break
        high = np.where(grow, 2.0 * high, high)
        grow = grow & feasible(high)
    low = np.zeros_like(norm)
    inside = domain.margin_arrays(z, w) >= margin
    for _ in range(iterations):
        mid = 0.5 * (low + high)
        ok = feasible(mid)
        low = np.where(ok, mid, low)
        high = np.where(ok, high, mid)
    with np.errstate(divide="ignore"):
        return np.where(inside & (low > 0), norm / np.where(low > 0, low, 1.0), np.inf)
