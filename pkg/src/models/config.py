"""Validated configuration schemas for Worms and experiments."""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import (
    BaseModel,
    Field,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)

from models.errors import SpecValidationError

logger = logging.getLogger(__name__)

EXPERIMENT_NAMES = (
    "levi_audit",
    "metric_bench",
    "triangle_growth",
    "scaling_convergence",
    "delta_growth",
    "projection_audit",
    "completeness",
    "slice",
)

DEFAULT_SEED = 20240101


class SurfaceConfig(BaseModel):
    """Base surface and angle function."""

    kind: Literal["classical", "punctured_plane"] = "classical"
    punctures: List[Tuple[float, float]] = Field(default_factory=list)
    weights: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_punctures(self) -> "SurfaceConfig":
        if self.kind == "classical":
            return self
        if not self.punctures:
            raise ValueError("punctured_plane surfaces need at least one puncture")
        if len(self.punctures) != len(self.weights):
            raise ValueError("punctures and weights must have the same length")
        if any(not (math.isfinite(w) and w > 0) for w in self.weights):
            raise ValueError("weights must be positive and finite")
        if any(not all(math.isfinite(c) for c in p) for p in self.punctures):
            raise ValueError("puncture coordinates must be finite")
        if len(set(self.punctures)) != len(self.punctures):
            raise ValueError("punctures must be distinct")
        return self


class EtaConfig(BaseModel):
    """Calibration of the cap function."""

    grid_step: float = Field(default=0.01, gt=0.0, le=0.1, description="Memo table step")
    calibrate: bool = Field(default=True, description="Solve for alpha so that eta = 1 on the boundary of J")
    alpha_plus: Optional[float] = Field(default=None, gt=0.0)
    alpha_minus: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _check_alphas(self) -> "EtaConfig":
        if not self.calibrate and (self.alpha_plus is None or self.alpha_minus is None):
            raise ValueError("uncalibrated eta needs alpha_plus and alpha_minus")
        return self


class WormConfig(BaseModel):
    """JSON schema of one Worm."""

    name: str = Field(default="classical", min_length=1)
    surface: SurfaceConfig = Field(default_factory=SurfaceConfig)
    inner_interval: Tuple[float, float] = (-1.0, 1.0)
    outer_interval: Tuple[float, float] = (-1.6, 1.6)
    eta: EtaConfig = Field(default_factory=EtaConfig)

    @model_validator(mode="after")
    def _check_intervals(self) -> "WormConfig":
        (i_lo, i_hi), (j_lo, j_hi) = self.inner_interval, self.outer_interval
        if not all(math.isfinite(x) for x in (i_lo, i_hi, j_lo, j_hi)):
            raise ValueError("interval endpoints must be finite")
        if not (i_lo < i_hi and j_lo < j_hi):
            raise ValueError("intervals need lo < hi")
        if not (j_lo < i_lo and i_hi < j_hi):
            raise ValueError("inner_interval must lie in the interior of outer_interval")
        return self


class GraphSettings(BaseModel):
    """Metric-graph construction knobs."""

    points_per_axis: int = Field(default=9, ge=3, le=400)
    neighbor_factor: float = Field(default=2.25, gt=1.0, description="Edge radius in grid spacings")
    min_margin: float = Field(default=0.02, ge=0.0, description="Interior margin for accepted nodes")
    max_bound_gap: float = Field(default=0.25, gt=0.0, description="Relative gap allowing the bound midpoint")
    edge_rule: Literal["midpoint", "upper", "simpson"] = Field(
        default="midpoint", description="simpson weighs chords by upper bounds at both ends and the midpoint"
    )


class DiscSearchSettings(BaseModel):
    """Extremal-disc search knobs."""

    degree: int = Field(default=6, ge=1, le=24)
    boundary_samples: int = Field(default=64, ge=8)
    radii: List[float] = Field(default_factory=lambda: [0.5, 0.8, 0.95])
    restarts: int = Field(default=4, ge=1)
    max_iters: int = Field(default=400, ge=10)

    @field_validator("radii")
    @classmethod
    def _check_radii(cls, radii: List[float]) -> List[float]:
        if not radii:
            raise ValueError("radii must be nonempty")
        if any(not 0 < r < 1 for r in radii):
            raise ValueError("radii must lie in (0, 1)")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly increasing")
        return radii


def _strictly_increasing(values: List[float], name: str) -> List[float]:
    if not values:
        raise ValueError(f"{name} must be nonempty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be strictly increasing")
    return values


class ExperimentConfig(BaseModel):
    """JSON schema of one experiment run."""

    experiment: Literal[
        "levi_audit",
        "metric_bench",
        "triangle_growth",
        "scaling_convergence",
        "delta_growth",
        "projection_audit",
        "completeness",
        "slice",
    ]
    worm: Optional[str] = Field(default=None, description="Worm config path, relative to this file")
    seed: int = DEFAULT_SEED
    resolution: float = Field(default=0.05, gt=0.0)
    output_dir: str = "results"
    workers: int = Field(default=1, ge=1)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    graph: GraphSettings = Field(default_factory=GraphSettings)
    disc_search: DiscSearchSettings = Field(default_factory=DiscSearchSettings)

    # levi_audit
    samples: int = Field(default=10_000, ge=1)
    spine_clearance: float = Field(default=1e-2, gt=0.0)
    cap_method: Literal["analytic", "richardson"] = "analytic"
    corrupted_control: bool = True
    # metric_bench
    bench_pairs: int = Field(default=20, ge=1)
    bench_degree: int = Field(default=16, ge=1, le=24)
    bidisc_points_per_axis: int = Field(default=41, ge=3, le=201, description="Grid density of each planar factor graph")
    # triangle_growth
    scales: List[float] = Field(default_factory=lambda: [1.0, 2.0, 4.0])
    radius_factor: float = Field(default=2.0, ge=1.0)
    # scaling_convergence
    n_values: List[float] = Field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0, 16.0])
    pairs: Optional[List[Tuple[float, float, float, float, float, float, float, float]]] = None
    tangent_samples: int = Field(default=24, ge=1)
    # delta_growth
    radii: List[float] = Field(default_factory=lambda: [1.0, 2.0, 3.0])
    samples_per_radius: int = Field(default=16, ge=1)
    control: bool = True
    graph_radius: float = Field(default=0.5, gt=0.0, description="Ball radius of the graph cross-check")
    # projection_audit
    pair_count: int = Field(default=200, ge=1)
    # completeness
    steps: int = Field(default=8, ge=2)
    # slice
    z_values: List[Tuple[float, float]] = Field(default_factory=lambda: [(1.0, 0.0)])

    config_dir: Optional[str] = Field(default=None, exclude=True)

    @field_validator("scales", "n_values", "radii")
    @classmethod
    def _check_increasing(cls, values: List[float], info: ValidationInfo) -> List[float]:
        values = _strictly_increasing(values, info.field_name)
        if values[0] <= 0:
            raise ValueError(f"{info.field_name} must be positive")
        return values

    def tolerance(self, key: str, default: float) -> float:
        """Declared tolerance ``key``, falling back to ``default``."""
        return float(self.tolerances.get(key, default))

    def worm_path(self) -> Optional[Path]:
        if self.worm is None:
            return None
        path = Path(self.worm)
        if not path.is_absolute() and self.config_dir:
            path = Path(self.config_dir) / path
        return path


def _read_json(path: Path) -> Dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise SpecValidationError(f"Configuration file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise SpecValidationError(f"Invalid JSON in {path}: {e}") from e


def load_worm_config(path: Path) -> WormConfig:
    """Read and validate a Worm configuration file."""
    data = _read_json(Path(path))
    try:
        config = WormConfig.model_validate(data)
    except ValidationError as e:
        raise SpecValidationError(f"Invalid Worm configuration {path}: {e}") from e
    logger.info(f"Loaded Worm configuration '{config.name}' from {path}")
    return config


def load_experiment_config(path: Path) -> ExperimentConfig:
    """Read and validate an experiment configuration file."""
    path = Path(path)
    data = _read_json(path)
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise SpecValidationError(f"Invalid experiment configuration {path}: {e}") from e
    config.config_dir = str(path.parent)
    logger.info(f"Loaded {config.experiment} configuration from {path}")
    return config
