"""Test configuration and fixtures."""

import os
import shutil
import sys
import tempfile
from typing import Callable, Generator
from unittest.mock import patch

import pytest

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from metrics.covering import CoveringOracle
from metrics.domains import ModelHandle
from metrics.exact import UnitDisc
from metrics.graph import MetricGraph, SamplingRegion, build_metric_graph
from models.config import ExperimentConfig, GraphSettings, SurfaceConfig, WormConfig
from models.geometry import ComplexPoint2
from worms.preworm import PreWormSpec
from worms.worm import WormSpec


@pytest.fixture(scope="session")
def classical_spec() -> WormSpec:
    """Classical Worm with I = [-1, 1] and J = [-1.6, 1.6]."""
    return WormSpec.classical()


@pytest.fixture(scope="session")
def two_puncture_config() -> WormConfig:
    """Worm configuration over C minus {-1, 1} with weights 1/2."""
    return WormConfig(
        name="two-puncture",
        surface=SurfaceConfig(kind="punctured_plane", punctures=[(-1.0, 0.0), (1.0, 0.0)], weights=[0.5, 0.5]),
    )


@pytest.fixture(scope="session")
def two_puncture_spec(two_puncture_config: WormConfig) -> WormSpec:
    """Worm whose angle function has a critical point at z = 0."""
    return WormSpec.from_config(two_puncture_config)


@pytest.fixture(scope="session")
def inner_preworm(classical_spec: WormSpec) -> PreWormSpec:
    """W_in of the classical Worm: annular base e^{-1/2} < |z| < e^{1/2}."""
    return PreWormSpec.inner_of(classical_spec)


@pytest.fixture(scope="session")
def covering_oracle(inner_preworm: PreWormSpec) -> CoveringOracle:
    """Exact distance oracle of the classical inner pre-Worm."""
    return CoveringOracle(inner_preworm)


@pytest.fixture
def disc_handle() -> ModelHandle:
    """Unit disc as a planar domain handle."""
    return ModelHandle(UnitDisc())


@pytest.fixture
def disc_graph(disc_handle: ModelHandle) -> MetricGraph:
    """Metric graph on the unit disc with nodes at 0 and 0.5."""
    region = SamplingRegion((-0.9, -0.9), (0.9, 0.9))
    settings = GraphSettings(points_per_axis=21)
    ends = [ComplexPoint2(0j), ComplexPoint2(0.5 + 0j)]
    return build_metric_graph(disc_handle, region, settings, extra_nodes=ends)


@pytest.fixture
def temp_output_dir() -> Generator[str, None, None]:
    """Create a temporary output directory for reports."""
    temp_dir = tempfile.mkdtemp()
    output_dir = os.path.join(temp_dir, "results")

    yield output_dir

    # Cleanup
    if os.path.exists(temp_dir):
        shutil.rmtree(temp_dir)


@pytest.fixture
def experiment_config(temp_output_dir: str) -> Callable[..., ExperimentConfig]:
    """Factory for experiment configurations writing into the temporary directory."""

    def make(experiment: str, **overrides) -> ExperimentConfig:
        data = {"experiment": experiment, "output_dir": temp_output_dir, "seed": 7}
        data.update(overrides)
        return ExperimentConfig.model_validate(data)

    return make


@pytest.fixture(autouse=True)
def setup_test_environment(temp_output_dir: str):
    """Setup test environment variables."""
    test_env = {
        "WORMLAB_OUTPUT_DIR": temp_output_dir,
        "WORMLAB_SEED": "7",
        "WORMLAB_WORKERS": "1",
        "WORMLAB_LOG_FILE": os.path.join(os.path.dirname(temp_output_dir), "wormlab.log"),
    }

    with patch.dict(os.environ, test_env):
        yield
