"""Checks that the bundle projection of the inner pre-Worm does not expand Kobayashi distances."""

import logging
from typing import List

import numpy as np

from experiments.base_experiment import BaseExperiment
from gromov.probes import product_ball_samples
from metrics.covering import CoveringOracle
from metrics.domains import PreWormHandle
from metrics.exact import Annulus, Product, RightHalfPlane
from metrics.graph import GraphOracle, SamplingRegion, build_metric_graph
from models.errors import SpecValidationError
from models.geometry import ComplexPoint2
from models.reports import ReportRow
from worms.preworm import PreWormSpec

logger = logging.getLogger(__name__)

# Graph pairs stay in a small product ball so a 4-d grid can resolve them
GRAPH_PAIRS = 6
GRAPH_RADIUS = 0.4
REGION_PADDING = 0.15


class ProjectionAuditExperiment(BaseExperiment):
    """k_X(pi p, pi q) <= k_E(p, q) with k_E measured on a pre-Worm graph, plus exact controls."""

    name = "projection_audit"

    def collect_rows(self) -> List[ReportRow]:
        if not self.spec.angle.is_classical:
            raise SpecValidationError("The projection audit needs the annular pre-Worm of the classical Worm")
        cfg = self.config
        preworm = self.inner_preworm()
        covering = CoveringOracle(preworm)
        tol = cfg.tolerance("projection", 3.0 * covering.tolerance + 1e-12)
        lo, height = preworm.log_strip()
        zeta0 = complex(lo + 0.5 * height)
        radius = cfg.radii[-1]
        rng = self.rng()

        rows = self.graph_rows(preworm, covering, zeta0, rng)

        points = product_ball_samples(preworm, zeta0, 1 + 0j, radius, 2 * cfg.pair_count, rng)
        pairs = list(zip(points[: cfg.pair_count], points[cfg.pair_count :]))
        covering_excess = max(covering.base_distance(p, q) - covering.distance(p, q) for p, q in pairs)
        rows.append(ReportRow.info("covering_projection_excess", radius, covering_excess, pairs=float(len(pairs))))

        # same base point, fiber moved along its ray
        fiber_pairs = [(p, ComplexPoint2(p.z, p.w * abs(q.w / p.w))) for p, q in pairs[:20]]
        fiber_base = max(covering.base_distance(p, q) for p, q in fiber_pairs)
        rows.append(ReportRow.within("fiber_pair_base_distance", radius, fiber_base, 0.0, tol))

        product = Product(Annulus(*preworm.annulus_radii()), RightHalfPlane())
        gaps = []
        for p, q in pairs[:20]:
            a, b = ComplexPoint2(p.z, 1 + 0j), ComplexPoint2(q.z, 1 + 0j)
            gaps.append(abs(product.distance(a, b) - product.first.planar_distance(p.z, q.z)))
        rows.append(ReportRow.within("product_control_gap", radius, float(np.max(gaps)), 0.0, cfg.tolerance("exact", 1e-12)))
        return rows

    def graph_rows(
        self, preworm: PreWormSpec, covering: CoveringOracle, zeta0: complex, rng: np.random.Generator
    ) -> List[ReportRow]:
        """Exact base distances against graph distances in the total space."""
        cfg = self.config
        handle = PreWormHandle(preworm)
        points = product_ball_samples(preworm, zeta0, 1 + 0j, GRAPH_RADIUS, 2 * GRAPH_PAIRS, rng)
        pairs = list(zip(points[:GRAPH_PAIRS], points[GRAPH_PAIRS:]))
        region = SamplingRegion.around(points, REGION_PADDING)
        graph = build_metric_graph(handle, region, cfg.graph, extra_nodes=points, workers=cfg.workers)
        oracle = GraphOracle(graph, handle, cfg.graph)

        base = np.array([covering.base_distance(p, q) for p, q in pairs])
        total = np.array([oracle.distance(p, q) for p, q in pairs])
        excess = float(np.max(base - total))
        logger.info(
            f"Projection audit: graph excess {excess:.4g} over {len(pairs)} pairs, "
            f"resolution {graph.resolution:.4g}"
        )
        return [
            ReportRow.at_most(
                "projection_excess", GRAPH_RADIUS, excess, 0.0, oracle.tolerance,
                pairs=float(len(pairs)), graph_resolution=graph.resolution, nodes=float(graph.node_count),
            )
        ]
