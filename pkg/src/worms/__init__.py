"""Worm and pre-Worm constructions."""

from .angle import AngleFunction
from .eta import EtaFunction
from .preworm import PreWormSpec, base_region_membership, preworm_contains, trivialize, untrivialize
from .worm import (
    BoundaryStratum,
    WormSpec,
    barrett_scale,
    classify_boundary,
    defining_function,
    levi_form,
    tangency_check,
    worm_contains,
)

__all__ = [
    "AngleFunction",
    "BoundaryStratum",
    "EtaFunction",
    "PreWormSpec",
    "WormSpec",
    "barrett_scale",
    "base_region_membership",
    "classify_boundary",
    "defining_function",
    "levi_form",
    "preworm_contains",
    "tangency_check",
    "trivialize",
    "untrivialize",
    "worm_contains",
]
