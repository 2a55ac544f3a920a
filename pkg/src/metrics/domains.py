"""Domain handles: membership, interior margin and batched closed-form metric bounds.

A handle wraps a model domain, a (scaled) Worm or a pre-Worm. Bounds are
exposed as batched callables so graph construction stays vectorized.
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, Dict, List, Optional

import numpy as np

from metrics.covering import CoveringOracle
from metrics.exact import ModelDomain
from models.errors import DomainViolationError
from models.geometry import ComplexPoint2
from models.oracle import MetricOracle
from worms.preworm import PreWormSpec, preworm_contains
from worms.worm import WormSpec, defining_function_array

logger = logging.getLogger(__name__)

BatchedMetric = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]

FEASIBILITY_MARGIN = 1e-4


def disc_metric_array(center: complex, radius: float, x: np.ndarray, dx: np.ndarray) -> np.ndarray:
    """K of the disc D(center, radius): radius |dx| / (radius^2 - |x - center|^2)."""
    gap = radius**2 - np.abs(x - center) ** 2
    return np.where(gap > 0, radius * np.abs(dx) / np.where(gap > 0, gap, 1.0), np.inf)


class DomainHandle(ABC):
    """A domain with a margin (positive inside) and closed-form metric bounds."""

    kind: str = "domain"
    dimension: int = 4

    @abstractmethod
    def margin_arrays(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Interior margin at unit scale; positive exactly inside."""

    def contains(self, p: ComplexPoint2) -> bool:
        return bool(self.margin_arrays(np.array([p.z]), np.array([p.w]))[0] > 0)

    def lower_bounds(self) -> Dict[str, BatchedMetric]:
        """Batched lower bounds for K from enclosing domains with computable metric."""
        return {}

    def upper_bounds(self) -> Dict[str, BatchedMetric]:
        """Batched closed-form upper bounds from inscribed domains."""
        return {}

    def exact_oracle(self) -> Optional[MetricOracle]:
        return None

    def feasible(self, z: np.ndarray, w: np.ndarray, margin: float = FEASIBILITY_MARGIN) -> np.ndarray:
        return self.margin_arrays(z, w) >= margin

    @property
    def name(self) -> str:
        return self.kind


class ModelHandle(DomainHandle):
    kind = "model"

    def __init__(self, model: ModelDomain):
        self.model = model
        self.dimension = model.dimension

    def margin_arrays(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        return self.model.margin_arrays(z, w)

    def lower_bounds(self) -> Dict[str, BatchedMetric]:
        return {"exact": self.model.royden_arrays}

    def upper_bounds(self) -> Dict[str, BatchedMetric]:
        return {"exact": self.model.royden_arrays}

    def exact_oracle(self) -> Optional[MetricOracle]:
        return self.model

    @property
    def name(self) -> str:
        return f"model:{self.model.name}"


class PreWormHandle(DomainHandle):
    kind = "preworm"

    def __init__(self, spec: PreWormSpec):
        self.spec = spec
        self.covering = CoveringOracle(spec) if spec.is_annular else None

    def margin_arrays(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        if self.covering is not None:
            return self.covering.margin_arrays(z, w)
        z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
        t = self.spec.angle.theta_array(z)
        interval = self.spec.interval
        base = np.minimum(t - interval.lo, interval.hi - t) / interval.length
        with np.errstate(invalid="ignore", divide="ignore"):
            turned = w * np.exp(-1j * t)
            fiber = np.where(np.abs(w) > 0, turned.real / np.abs(w), -1.0)
        out = np.minimum(base, fiber)
        return np.where(np.isfinite(out), out, -1.0)

    def contains(self, p: ComplexPoint2) -> bool:
        return preworm_contains(self.spec, p)

    def lower_bounds(self) -> Dict[str, BatchedMetric]:
        if self.covering is not None:
            return {"covering": self.covering.royden_arrays}
        return {"base_disc": base_disc_bound(self.spec)}

    def upper_bounds(self) -> Dict[str, BatchedMetric]:
        if self.covering is not None:
            return {"covering": self.covering.royden_arrays}
        return {}

    def exact_oracle(self) -> Optional[MetricOracle]:
        return self.covering

    @property
    def name(self) -> str:
        return f"preworm:{self.spec.base_region}"


def base_disc_bound(spec: PreWormSpec) -> BatchedMetric:
    """K_X(dz) >= K_{D(0,R)}(dz) for a disc D(0,R) containing the base region."""
    radius = spec.angle.bounding_radius(spec.interval.hi)

    def bound(z: np.ndarray, w: np.ndarray, dz: np.ndarray, dw: np.ndarray) -> np.ndarray:
        return disc_metric_array(0j, radius, np.asarray(z), np.asarray(dz))

    return bound


class WormHandle(DomainHandle):
    """B_scale(W); scale = 1 is the Worm itself."""

    kind = "worm"

    def __init__(self, spec: WormSpec, scale: float = 1.0):
        if not scale > 0:
            raise DomainViolationError("Worm scale must be positive")
        self.spec = spec
        self.scale = float(scale)
        self.outer_preworm = PreWormSpec.outer_of(spec)
        self.inner_preworm = PreWormSpec.inner_of(spec)
        self._outer_handle = PreWormHandle(self.outer_preworm)

    def margin_arrays(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        """scale * (-r(z, w / scale)), tending to 2 Re(w e^{-i theta}) over theta^{-1}(I)."""
        return -self.scale * defining_function_array(self.spec, z, w, self.scale)

    def lower_bounds(self) -> Dict[str, BatchedMetric]:
        bounds: Dict[str, BatchedMetric] = dict(
            ("w_out_" + key, fn) for key, fn in self._outer_handle.lower_bounds().items()
        )
        # |w| < 2 lambda on B_lambda(W)
        radius = 2.0 * self.scale

        def fiber_disc(z: np.ndarray, w: np.ndarray, dz: np.ndarray, dw: np.ndarray) -> np.ndarray:
            return disc_metric_array(0j, radius, np.asarray(w), np.asarray(dw))

        bounds["fiber_disc"] = fiber_disc
        return bounds

    def upper_bounds(self) -> Dict[str, BatchedMetric]:
        if not self.spec.angle.is_classical:
            return {}
        from metrics.bounds import inscribed_royden_upper_arrays

        spec, scale = self.spec, self.scale

        def inscribed(z: np.ndarray, w: np.ndarray, dz: np.ndarray, dw: np.ndarray) -> np.ndarray:
            return inscribed_royden_upper_arrays(spec, scale, z, w, dz, dw)

        return {"inscribed": inscribed}

    @property
    def name(self) -> str:
        return f"worm:{self.spec.name}@{self.scale:g}"


def evaluate_bounds(
    bounds: Dict[str, BatchedMetric],
    z: np.ndarray,
    w: np.ndarray,
    dz: np.ndarray,
    dw: np.ndarray,
    combine: str,
) -> Optional[np.ndarray]:
    """max over lower bounds or min over upper bounds; None when no bound applies."""
    values: List[np.ndarray] = []
    for name, fn in bounds.items():
        with np.errstate(divide="ignore", invalid="ignore"):
            result = np.asarray(fn(z, w, dz, dw), dtype=float)
        values.append(np.where(np.isnan(result), math.inf if combine == "min" else 0.0, result))
    if not values:
        return None
    stacked = np.vstack(values)
    return np.min(stacked, axis=0) if combine == "min" else np.max(stacked, axis=0)
