"""Experiment manager for running configured experiments and collecting their reports."""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Type

import pandas as pd

from experiments.base_experiment import BaseExperiment
from experiments.completeness import CompletenessExperiment
from experiments.delta_growth import DeltaGrowthExperiment
from experiments.levi_audit import LeviAuditExperiment
from experiments.metric_bench import MetricBenchExperiment
from experiments.projection_audit import ProjectionAuditExperiment
from experiments.scaling_convergence import ScalingConvergenceExperiment
from experiments.slices import SliceExperiment
from experiments.triangle_growth import TriangleGrowthExperiment
from models.config import ExperimentConfig, load_experiment_config
from models.errors import SpecValidationError
from models.reports import ExperimentReport

logger = logging.getLogger(__name__)


class ExperimentManager:
    """Runs experiments by name and writes one CSV report per run."""

    EXPERIMENTS: Dict[str, Type[BaseExperiment]] = {
        "levi_audit": LeviAuditExperiment,
        "metric_bench": MetricBenchExperiment,
        "triangle_growth": TriangleGrowthExperiment,
        "scaling_convergence": ScalingConvergenceExperiment,
        "delta_growth": DeltaGrowthExperiment,
        "projection_audit": ProjectionAuditExperiment,
        "completeness": CompletenessExperiment,
        "slice": SliceExperiment,
    }

    def __init__(self, output_dir: Optional[Path] = None):
        self.output_dir = Path(output_dir) if output_dir is not None else None

    def get_available_experiments(self) -> List[str]:
        return list(self.EXPERIMENTS.keys())

    def report_path(self, config: ExperimentConfig) -> Path:
        return self._output_dir(config) / f"{config.experiment}.csv"

    def _output_dir(self, config: ExperimentConfig) -> Path:
        return self.output_dir if self.output_dir is not None else Path(config.output_dir)

    def run(self, config: ExperimentConfig) -> Tuple[ExperimentReport, Path]:
        """Run one configured experiment and write its CSV report."""
        experiment_class = self.EXPERIMENTS.get(config.experiment)
        if experiment_class is None:
            raise SpecValidationError(f"Unknown experiment: {config.experiment}")
        experiment = experiment_class(config, output_dir=self._output_dir(config))
        report = experiment.run()
        path = report.write_csv(self.report_path(config))
        logger.info(f"Wrote {len(report.rows)} rows to {path}")
        return report, path

    def run_file(self, config_path: Path) -> Tuple[ExperimentReport, Path]:
        return self.run(load_experiment_config(config_path))

    def run_many(self, configs: List[ExperimentConfig]) -> List[Tuple[ExperimentReport, Path]]:
        """Run configs in order; a failing report does not stop the others."""
        results = []
        for config in configs:
            results.append(self.run(config))
        passed = sum(report.all_passed for report, _ in results)
        logger.info(f"Ran {len(results)} experiments: {passed} passed")
        return results

    @staticmethod
    def exit_status(reports: List[ExperimentReport]) -> int:
        return 0 if all(report.all_passed for report in reports) else 1

    def summarize(self, directory: Optional[Path] = None) -> pd.DataFrame:
        """Status counts per CSV report found in ``directory``."""
        directory = Path(directory or self.output_dir or "results")
        records = []
        for path in sorted(directory.glob("*.csv")):
            frame = pd.read_csv(path)
            if "status" not in frame.columns or "experiment" not in frame.columns:
                logger.debug(f"Skipping {path}: not an experiment report")
                continue
            counts = frame["status"].value_counts()
            records.append(
                {
                    "report": path.name,
                    "experiment": frame["experiment"].iloc[0] if len(frame) else path.stem,
                    "rows": len(frame),
                    "pass": int(counts.get("pass", 0)),
                    "fail": int(counts.get("fail", 0)),
                    "info": int(counts.get("info", 0)),
                    "infeasible": int(counts.get("infeasible", 0)),
                    "inconclusive": int(counts.get("inconclusive", 0)),
                }
            )
        return pd.DataFrame.from_records(
            records, columns=["report", "experiment", "rows", "pass", "fail", "info", "infeasible", "inconclusive"]
        )
