"""Gromov products, four-point hyperbolicity, quasigeodesics and slim triangles."""

from .curves import (
    SampledCurve,
    SampledTriangle,
    TriangleRecipe,
    build_bundle_triangle,
    quasigeodesic_check,
    slimness,
)
from .probes import bilipschitz_constant_probe, quasi_flat_diamond
from .products import delta_four_point, gromov_product

__all__ = [
    "SampledCurve",
    "SampledTriangle",
    "TriangleRecipe",
    "bilipschitz_constant_probe",
    "build_bundle_triangle",
    "delta_four_point",
    "gromov_product",
    "quasi_flat_diamond",
    "quasigeodesic_check",
    "slimness",
]
