"""Base experiment class and common utilities."""

import logging
import time
from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Optional

import numpy as np

from models.config import ExperimentConfig, load_worm_config
from models.reports import ExperimentReport, ReportRow, spec_hash
from worms.preworm import PreWormSpec
from worms.worm import WormSpec

logger = logging.getLogger(__name__)


def load_worm(config: ExperimentConfig) -> WormSpec:
    """Worm named by the experiment config, or the classical Worm when none is named."""
    path = config.worm_path()
    if path is None:
        return WormSpec.classical()
    return WormSpec.from_config(load_worm_config(path))


class BaseExperiment(ABC):
    """Base class for all experiments.

    Subclasses implement ``collect_rows``; ``run`` wraps it with timing and
    report metadata. Library errors propagate to the caller.
    """

    name: str = "experiment"

    def __init__(self, config: ExperimentConfig, spec: Optional[WormSpec] = None, output_dir: Optional[Path] = None):
        self.config = config
        self.spec = spec if spec is not None else load_worm(config)
        self.output_dir = Path(output_dir or config.output_dir)

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def resolution(self) -> float:
        return self.config.resolution

    def rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)

    def inner_preworm(self) -> PreWormSpec:
        return PreWormSpec.inner_of(self.spec)

    @abstractmethod
    def collect_rows(self) -> List[ReportRow]:
        """Measure and return the report rows."""
        pass

    def run(self) -> ExperimentReport:
        """Run the experiment and return its timed report."""
        start_time = time.time()
        logger.info(f"Running {self.name} on '{self.spec.name}' (seed {self.seed}, resolution {self.resolution:g})")

        report = ExperimentReport(
            experiment=self.name,
            seed=self.seed,
            resolution=self.resolution,
            spec_hash=spec_hash(self.spec.config_dict()),
        )
        report.extend(self.collect_rows())
        report.processing_time = time.time() - start_time

        counts = report.status_counts()
        logger.info(
            f"Finished {self.name} in {report.processing_time:.2f}s: "
            f"{counts['pass']} pass, {counts['fail']} fail, {counts['info']} info, "
            f"{counts['infeasible']} infeasible, {counts['inconclusive']} inconclusive"
        )
        return report
