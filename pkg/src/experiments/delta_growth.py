"""Four-point hyperbolicity constants of growing Kobayashi balls in W_in, with a disc control."""

import logging
from typing import List, Sequence, Tuple

from experiments.base_experiment import BaseExperiment
from gromov.probes import disc_ball_samples, product_ball_samples, quasi_flat_diamond
from gromov.products import delta_four_point
from metrics.covering import CoveringOracle
from metrics.domains import PreWormHandle
from metrics.exact import UnitDisc
from metrics.graph import GraphOracle, SamplingRegion, build_metric_graph
from models.errors import SpecValidationError
from models.geometry import ComplexPoint2
from models.oracle import MetricOracle
from models.reports import ReportRow

logger = logging.getLogger(__name__)

REGION_PADDING = 0.15


def nested_deltas(oracle: MetricOracle, shells: Sequence[List[ComplexPoint2]], seed: int) -> List[float]:
    """delta of the union of the first k shells for every k, carried as a running max."""
    points: List[ComplexPoint2] = []
    deltas: List[float] = []
    for shell in shells:
        points.extend(shell)
        value = delta_four_point(oracle, points, seed=seed) if len(points) >= 4 else 0.0
        deltas.append(max([value] + deltas[-1:]))
    return deltas


class DeltaGrowthExperiment(BaseExperiment):
    """delta(R) for nested samples of balls B(o, R) of W_in and of the unit disc."""

    name = "delta_growth"

    def _preworm_shells(self) -> Tuple[CoveringOracle, List[List[ComplexPoint2]]]:
        preworm = self.inner_preworm()
        lo, height = preworm.log_strip()
        zeta0, u0 = complex(lo + 0.5 * height), 1 + 0j
        rng = self.rng()
        shells = [
            product_ball_samples(preworm, zeta0, u0, radius, self.config.samples_per_radius, rng)
            + quasi_flat_diamond(preworm, zeta0, u0, radius)
            for radius in self.config.radii
        ]
        return CoveringOracle(preworm), shells

    def collect_rows(self) -> List[ReportRow]:
        if not self.spec.angle.is_classical:
            raise SpecValidationError("Delta growth samples the annular pre-Worm of the classical Worm")
        cfg = self.config
        oracle, shells = self._preworm_shells()
        deltas = nested_deltas(oracle, shells, cfg.seed)
        rows: List[ReportRow] = []
        total = 0
        for radius, shell, delta in zip(cfg.radii, shells, deltas):
            total += len(shell)
            rows.append(ReportRow.info("delta", radius, delta, points=float(total)))
            logger.info(f"delta(R={radius:g}) = {delta:.4g} over {total} points")

        gain = deltas[-1] - deltas[0]
        rows.append(ReportRow.at_least("delta_gain", cfg.radii[-1], gain, cfg.tolerance("delta_gain", 0.5), 0.0))
        rows.extend(self.graph_rows(oracle))

        if cfg.control:
            rng = self.rng(1)
            disc_shells = [
                disc_ball_samples(radius, cfg.samples_per_radius + 4, rng) for radius in cfg.radii
            ]
            disc_deltas = nested_deltas(UnitDisc(), disc_shells, cfg.seed)
            for radius, delta in zip(cfg.radii, disc_deltas):
                rows.append(ReportRow.info("disc_delta", radius, delta))
            rows.append(
                ReportRow.at_most("disc_delta_plateau", cfg.radii[-1], disc_deltas[-1], cfg.tolerance("disc_delta_plateau", 1.2), 0.0)
            )
        return rows

    def graph_rows(self, covering: CoveringOracle) -> List[ReportRow]:
        """delta of a random sample of B(o, graph_radius) on a pre-Worm graph next to its exact value."""
        cfg = self.config
        preworm = covering.spec
        lo, height = preworm.log_strip()
        sample = product_ball_samples(
            preworm, complex(lo + 0.5 * height), 1 + 0j, cfg.graph_radius, max(cfg.samples_per_radius, 4), self.rng(2)
        )
        handle = PreWormHandle(preworm)
        region = SamplingRegion.around(sample, REGION_PADDING)
        graph = build_metric_graph(handle, region, cfg.graph, extra_nodes=sample, workers=cfg.workers)
        oracle = GraphOracle(graph, handle, cfg.graph)

        exact = delta_four_point(covering, sample, seed=cfg.seed)
        measured = delta_four_point(oracle, sample, seed=cfg.seed)
        logger.info(f"Graph delta {measured:.4g} against exact {exact:.4g} at R={cfg.graph_radius:g}")
        # each Gromov-product sum moves by at most twice the distance error
        return [
            ReportRow.within(
                "graph_delta", cfg.graph_radius, measured, exact, 2.0 * oracle.tolerance,
                graph_resolution=graph.resolution, points=float(len(sample)),
            )
        ]
