"""Tests for the experiments and the experiment manager."""

import math
import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from experiments.completeness import CompletenessExperiment
from experiments.delta_growth import DeltaGrowthExperiment, nested_deltas
from experiments.experiment_manager import ExperimentManager
from experiments.levi_audit import LeviAuditExperiment
from experiments.metric_bench import MetricBenchExperiment
from experiments.projection_audit import ProjectionAuditExperiment
from experiments.scaling_convergence import ScalingConvergenceExperiment, parse_pairs
from experiments.slices import SliceExperiment, render_slice
from experiments.triangle_growth import TriangleGrowthExperiment
from gromov.probes import disc_ball_samples
from metrics.covering import CoveringOracle
from metrics.exact import UnitDisc
from models.config import EXPERIMENT_NAMES
from models.errors import SpecValidationError
from models.reports import ExperimentReport, ReportRow


def single(report: ExperimentReport, quantity: str) -> ReportRow:
    rows = report.rows_for(quantity)
    assert len(rows) == 1, f"expected one {quantity} row, got {len(rows)}"
    return rows[0]


class TestLeviAudit:
    """Test the boundary pseudoconvexity audit."""

    @pytest.fixture
    def report(self, experiment_config) -> ExperimentReport:
        return LeviAuditExperiment(experiment_config("levi_audit", samples=300)).run()

    def test_spine_is_levi_flat(self, report):
        """Test the spine eigenvalue and curvature rows."""
        assert single(report, "spine_min_eigenvalue").status == "pass"
        assert single(report, "spine_tangential_curvature").status == "pass"

    def test_body_kernel(self, report):
        """Test that the Levi kernel on the body is the predicted direction."""
        assert single(report, "body_kernel_residual").status == "pass"
        assert single(report, "body_min_eigenvalue").status == "pass"
        assert single(report, "body_tangency").status == "pass"

    def test_corrupted_control_detects_concavity(self, report):
        """Test that a concave cap is caught."""
        row = single(report, "corrupted_cap_min_curvature")

        assert row.status == "pass"
        assert row.value < 0

    def test_report_metadata(self, report):
        """Test report fields."""
        assert report.experiment == "levi_audit"
        assert report.seed == 7
        assert len(report.spec_hash) == 64


class TestMetricBench:
    """Test the closed-form anchors of the benchmark."""

    def test_exact_rows(self, experiment_config):
        """Test anchors, annulus rotations and product diagonals."""
        rows = MetricBenchExperiment(experiment_config("metric_bench", bench_pairs=5))._exact_rows()

        assert [row.quantity for row in rows] == [
            "disc_distance",
            "halfplane_distance",
            "annulus_rotation_drift",
            "product_diagonal_gap",
        ]
        assert all(row.status == "pass" for row in rows)

    def test_halfplane_disc_search_row(self, experiment_config):
        """Test the half-plane disc-search row against K = 1/2 within 2%."""
        experiment = MetricBenchExperiment(
            experiment_config("metric_bench", bench_degree=3, disc_search={"restarts": 1, "max_iters": 60})
        )
        rows = [row for row in experiment._disc_search_rows() if row.quantity == "halfplane_royden_upper"]

        assert len(rows) == 1
        assert rows[0].status == "pass"
        assert rows[0].value <= 0.51

    def test_bidisc_graph_within_five_percent(self, experiment_config):
        """Test the bidisc graph distance against the max formula at the shipped density."""
        rows = MetricBenchExperiment(experiment_config("metric_bench", bench_pairs=6))._bidisc_graph_rows()

        assert [row.quantity for row in rows] == ["bidisc_graph_rel_error"]
        assert rows[0].status == "pass"
        assert rows[0].value <= 0.05
        assert rows[0].extras["points_per_axis"] == 41


class TestScalingConvergence:
    """Test the pieces of the scaling experiment."""

    def test_parse_pairs(self):
        """Test the eight-number pair rows."""
        (p, q), = parse_pairs([(1.0, 0.0, 1.0, 0.0, 1.05, 0.0, 1.1, 0.1)])

        assert p.z == 1 + 0j and p.w == 1 + 0j
        assert q.z == 1.05 + 0j and q.w == 1.1 + 0.1j

    def test_trend_rows_pass(self, experiment_config):
        """Test decreasing residuals and epsilons."""
        experiment = ScalingConvergenceExperiment(experiment_config("scaling_convergence", n_values=[1.0, 2.0, 4.0]))
        rows = experiment._trend_rows({1.0: 0.3, 4.0: 0.1}, {1.0: 0.5, 2.0: 0.3, 4.0: 0.2}, {4.0: 0.1})

        assert [row.quantity for row in rows] == ["residual_final", "residual_trend", "epsilon_upper_monotone"]
        assert all(row.status == "pass" for row in rows)

    def test_increasing_epsilon_fails(self, experiment_config):
        """Test that a growing epsilon is reported."""
        experiment = ScalingConvergenceExperiment(experiment_config("scaling_convergence", n_values=[1.0, 2.0]))
        rows = experiment._trend_rows({2.0: 0.1}, {1.0: 0.2, 2.0: 0.4}, {2.0: 0.1})

        assert rows[-1].quantity == "epsilon_upper_monotone"
        assert rows[-1].status == "fail"

    def test_missing_final_residual(self, experiment_config):
        """Test the infeasible flag when the last scale has no residual."""
        experiment = ScalingConvergenceExperiment(experiment_config("scaling_convergence", n_values=[1.0, 2.0]))
        rows = experiment._trend_rows({1.0: 0.2}, {1.0: 0.2, 2.0: 0.1}, {})

        assert rows[0].status == "infeasible"

    def test_rejects_non_classical(self, experiment_config, two_puncture_spec):
        """Test that the experiment needs the classical angle."""
        experiment = ScalingConvergenceExperiment(experiment_config("scaling_convergence"), spec=two_puncture_spec)

        with pytest.raises(SpecValidationError):
            experiment.collect_rows()


class TestTriangleGrowth:
    """Test the trend rows of the triangle experiment."""

    def test_growing_slimness(self, experiment_config):
        """Test monotone slimness with linear ratio."""
        experiment = TriangleGrowthExperiment(experiment_config("triangle_growth"))
        rows = experiment._trend_rows([0.9, None, 3.5], budget=0.1)

        assert rows[0].quantity == "slim_covering_monotone"
        assert all(row.status == "pass" for row in rows)

    def test_ambient_rows_name_the_covering_oracle(self, experiment_config):
        """Test that no ambient row claims a graph measurement."""
        experiment = TriangleGrowthExperiment(experiment_config("triangle_growth"))
        rows = experiment._trend_rows([0.9, 1.8, 3.5], budget=0.1)

        assert [row.quantity for row in rows] == ["slim_covering_monotone"] + ["slim_covering_ratio"] * 2
        assert not any("graph" in row.quantity for row in rows)

    def test_too_few_measurements(self, experiment_config):
        """Test the inconclusive flag."""
        experiment = TriangleGrowthExperiment(experiment_config("triangle_growth"))
        rows = experiment._trend_rows([None, None, 1.0], budget=0.1)

        assert len(rows) == 1
        assert rows[0].status == "inconclusive"


class TestDeltaGrowth:
    """Test four-point delta growth in the inner pre-Worm."""

    def test_run(self, experiment_config):
        """Test that delta grows in W_in and plateaus in the disc."""
        report = DeltaGrowthExperiment(
            experiment_config("delta_growth", radii=[1.0, 3.0], samples_per_radius=8, graph={"points_per_axis": 7})
        ).run()
        deltas = [row.value for row in report.rows_for("delta")]

        assert report.all_passed
        assert deltas[1] >= 3.0 - 1e-9
        assert single(report, "delta_gain").status == "pass"
        assert single(report, "disc_delta_plateau").status == "pass"

    def test_graph_delta_beside_exact(self, experiment_config):
        """Test that the small-ball sample is measured on a graph and compared with the exact delta."""
        experiment = DeltaGrowthExperiment(
            experiment_config("delta_growth", samples_per_radius=6, graph_radius=0.4, graph={"points_per_axis": 7})
        )
        rows = experiment.graph_rows(CoveringOracle(experiment.inner_preworm()))

        assert [row.quantity for row in rows] == ["graph_delta"]
        assert rows[0].status == "pass"
        assert rows[0].reference >= 0.0
        assert rows[0].tolerance == pytest.approx(6.0 * rows[0].extras["graph_resolution"])

    def test_nested_deltas_are_running_max(self):
        """Test that nested deltas never decrease."""
        rng = np.random.default_rng(11)
        shells = [disc_ball_samples(radius, 3, rng) for radius in (0.5, 1.0, 2.0)]
        deltas = nested_deltas(UnitDisc(), shells, seed=11)

        assert deltas[0] == 0.0
        assert all(b >= a for a, b in zip(deltas, deltas[1:]))


class TestProjectionAudit:
    """Test the non-expansion audit of the bundle projection."""

    def test_run(self, experiment_config):
        """Test that every projection row passes."""
        report = ProjectionAuditExperiment(experiment_config("projection_audit", pair_count=20, radii=[2.0])).run()

        assert report.all_passed
        assert single(report, "covering_projection_excess").value <= 1e-12
        assert single(report, "fiber_pair_base_distance").value == pytest.approx(0.0, abs=1e-12)

    def test_excess_is_measured_on_a_graph(self, experiment_config):
        """Test that total-space distances come from a pre-Worm graph, not the covering oracle."""
        experiment = ProjectionAuditExperiment(
            experiment_config("projection_audit", pair_count=4, radii=[1.0], graph={"points_per_axis": 7})
        )
        row = single(experiment.run(), "projection_excess")

        assert row.status == "pass"
        assert math.isfinite(row.value)
        assert abs(row.value) > 1e-9
        assert row.tolerance == pytest.approx(3.0 * row.extras["graph_resolution"])
        assert row.extras["nodes"] > 2 * 6


class TestCompleteness:
    """Test the completeness probe structure."""

    def test_anchor_points(self, experiment_config):
        """Test o on the centerline and the boundary target with |w| = 2."""
        o, target, control = CompletenessExperiment(experiment_config("completeness")).anchor_points()

        assert o.z == pytest.approx(1.0)
        assert abs(target.w) == pytest.approx(2.0)
        assert abs(control.w) == pytest.approx(1.5)

    def test_run(self, experiment_config):
        """Test rows of a short run."""
        report = CompletenessExperiment(
            experiment_config("completeness", steps=2, graph={"points_per_axis": 5})
        ).run()
        boundary = report.rows_for("boundary_distance")

        assert len(boundary) == 2
        assert boundary[1].value > boundary[0].value
        assert all(row.extras["certified_lower"] > 0 for row in boundary)
        assert single(report, "certified_increment_min").status == "pass"
        assert single(report, "boundary_increment_min").status == "info"
        assert len(report.rows_for("interior_distance")) == 2

    def test_distances_dominate_certified_lower(self, experiment_config):
        """Test that every graph distance from o is gated on its certified lower bound."""
        report = CompletenessExperiment(
            experiment_config("completeness", steps=3, graph={"points_per_axis": 5})
        ).run()
        boundary = report.rows_for("boundary_distance")

        assert len(boundary) == 3
        for row in boundary:
            assert row.reference == row.extras["certified_lower"]
            assert row.status == "pass"
            assert row.value >= row.extras["certified_lower"] - 1e-9


class TestSlices:
    """Test SVG slice renderings."""

    def test_run(self, experiment_config, temp_output_dir):
        """Test one full slice and one empty slice."""
        report = SliceExperiment(experiment_config("slice", z_values=[(1.0, 0.0), (2.3396, 0.0)])).run()
        full, empty = report.rows_for("slice_radius")

        assert full.status == "pass" and full.value == pytest.approx(1.0)
        assert empty.status == "info" and empty.value == 0.0
        assert (Path(temp_output_dir) / "slice_00.svg").exists()
        assert (Path(temp_output_dir) / "slice_01.svg").exists()

    def test_rendering_is_deterministic(self, classical_spec, temp_output_dir):
        """Test byte-identical SVGs for identical inputs."""
        first = Path(temp_output_dir) / "a.svg"
        second = Path(temp_output_dir) / "b.svg"
        render_slice(classical_spec, 1.2 + 0.3j, first)
        render_slice(classical_spec, 1.2 + 0.3j, second)

        assert first.read_bytes() == second.read_bytes()


class TestExperimentManager:
    """Test running experiments by name and summarizing reports."""

    def test_available_experiments(self):
        """Test that every configured experiment has a runner."""
        assert sorted(ExperimentManager().get_available_experiments()) == sorted(EXPERIMENT_NAMES)

    def test_run_writes_csv(self, experiment_config, temp_output_dir):
        """Test the report path and contents."""
        report, path = ExperimentManager().run(experiment_config("slice"))

        assert path == Path(temp_output_dir) / "slice.csv"
        assert path.exists()
        assert ExperimentManager.exit_status([report]) == 0

    def test_reports_are_reproducible(self, experiment_config):
        """Test that two runs with the same seed write identical CSVs."""
        config = experiment_config("projection_audit", pair_count=10, radii=[1.5])
        manager = ExperimentManager()
        _, path = manager.run(config)
        first = path.read_text()
        _, path = manager.run(config)

        assert path.read_text() == first

    def test_exit_status(self):
        """Test that any failing row gives status 1."""
        good = ExperimentReport(experiment="x", seed=1, resolution=0.1, rows=[ReportRow.info("q", 1.0, 1.0)])
        bad = ExperimentReport(
            experiment="x", seed=1, resolution=0.1, rows=[ReportRow.at_most("q", 1.0, 2.0, 1.0, 0.0)]
        )

        assert ExperimentManager.exit_status([good]) == 0
        assert ExperimentManager.exit_status([good, bad]) == 1

    def test_summarize(self, experiment_config, temp_output_dir):
        """Test status counts per report, skipping foreign CSVs."""
        manager = ExperimentManager(Path(temp_output_dir))
        manager.run(experiment_config("slice", z_values=[(1.0, 0.0)]))
        (Path(temp_output_dir) / "notes.csv").write_text("a,b\n1,2\n")
        summary = manager.summarize()

        assert list(summary["report"]) == ["slice.csv"]
        assert int(summary["pass"].iloc[0]) == 1
        assert int(summary["fail"].iloc[0]) == 0

    def test_summarize_empty(self, temp_output_dir):
        """Test an empty directory."""
        os.makedirs(temp_output_dir, exist_ok=True)

        assert ExperimentManager(Path(temp_output_dir)).summarize().empty

    def test_worm_from_config_file(self, experiment_config):
        """Test that a named Worm configuration is loaded relative to the config directory."""
        config_dir = Path(__file__).resolve().parent.parent / "configs"
        config = experiment_config("slice", worm="two_puncture_worm.json")
        config.config_dir = str(config_dir)
        experiment = SliceExperiment(config)

        assert not experiment.spec.angle.is_classical
        assert math.isfinite(experiment.spec.slice_radius(0.5 + 0j))
