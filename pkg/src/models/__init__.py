"""Models package initialization."""

from .errors import (
    BranchCutError,
    DisconnectedPairError,
    DomainViolationError,
    SearchExhaustedError,
    SpecValidationError,
    WormLabError,
)
from .geometry import (
    ComplexPoint2,
    ComplexScalar,
    HermitianForm2,
    RealInterval,
    TangentVector2,
    hermitian_apply,
    min_eigenvalue,
)
from .oracle import AccuracyClass, MetricOracle
from .reports import ExperimentReport, ReportRow

__all__ = [
    "AccuracyClass",
    "BranchCutError",
    "ComplexPoint2",
    "ComplexScalar",
    "DisconnectedPairError",
    "DomainViolationError",
    "ExperimentReport",
    "HermitianForm2",
    "MetricOracle",
    "RealInterval",
    "ReportRow",
    "SearchExhaustedError",
    "SpecValidationError",
    "TangentVector2",
    "WormLabError",
    "hermitian_apply",
    "min_eigenvalue",
]
