"""Distances toward a boundary point of the Worm grow without bound; toward an interior point they settle."""

import cmath
import logging
from typing import List, Tuple

import numpy as np

from experiments.base_experiment import BaseExperiment
from metrics.covering import CoveringOracle
from metrics.domains import WormHandle
from metrics.exact import disc_distance
from metrics.graph import approach_points, completeness_probe
from models.geometry import ComplexPoint2
from models.reports import ReportRow
from worms.preworm import PreWormSpec

logger = logging.getLogger(__name__)


class CompletenessExperiment(BaseExperiment):
    """Graph distances from o to points approaching a body boundary point geometrically."""

    name = "completeness"

    def anchor_points(self) -> Tuple[ComplexPoint2, ComplexPoint2, ComplexPoint2]:
        """Base point o = (z0, e^{i theta}), boundary target (z0, 2 e^{i theta}) and an interior control."""
        level = self.spec.inner.midpoint
        if self.spec.angle.is_classical:
            z0 = complex(np.exp(0.5 * level))
        else:
            z0 = complex(self.spec.angle.level_set_samples(level)[0])
        center = cmath.exp(1j * self.spec.angle.theta(z0))
        return ComplexPoint2(z0, center), ComplexPoint2(z0, 2.0 * center), ComplexPoint2(z0, 1.5 * center)

    def certified_lower(self, o: ComplexPoint2, points: List[ComplexPoint2]) -> List[float]:
        """max(k_{W_out}, k_{D(0,2)} on the fiber), both enclosing W."""
        outer = PreWormSpec.outer_of(self.spec)
        covering = CoveringOracle(outer) if outer.is_annular else None
        values = []
        for p in points:
            fiber = disc_distance(o.w / 2.0, p.w / 2.0)
            values.append(max(fiber, covering.distance(o, p)) if covering is not None else fiber)
        return values

    def collect_rows(self) -> List[ReportRow]:
        cfg = self.config
        handle = WormHandle(self.spec)
        o, target, control = self.anchor_points()
        slack = cfg.tolerance("certified_slack", 1e-9)

        sequence = completeness_probe(handle, o, target, cfg.steps, cfg.graph)
        lower = self.certified_lower(o, approach_points(o, target, cfg.steps))
        rows: List[ReportRow] = []
        for k, (value, bound) in enumerate(zip(sequence, lower), start=1):
            row = ReportRow.at_least("boundary_distance", float(k), value, bound, slack, certified_lower=bound)
            if not row.passed:
                logger.warning(f"Graph distance {value:.6g} at step {k} is below its certified lower bound {bound:.6g}")
            rows.append(row)
        rows.append(ReportRow.info("boundary_increment_min", float(cfg.steps), float(np.diff(sequence).min())))
        # growth is certified by the lower bounds, which the graph distances must dominate
        rows.append(
            ReportRow.at_least("certified_increment_min", float(cfg.steps), float(np.diff(lower).min()), 1e-12, 0.0)
        )
        rows.append(
            ReportRow.at_least(
                "boundary_growth_ratio", float(cfg.steps), lower[-1] / lower[0], cfg.tolerance("growth_ratio", 2.0), 0.0
            )
        )
        logger.info(f"Completeness: {sequence[0]:.4g} -> {sequence[-1]:.4g} over {cfg.steps} steps")

        interior = completeness_probe(handle, o, control, cfg.steps, cfg.graph)
        for k, value in enumerate(interior, start=1):
            rows.append(ReportRow.info("interior_distance", float(k), value))
        rows.append(
            ReportRow.at_most(
                "interior_last_increment", float(cfg.steps), abs(interior[-1] - interior[-2]),
                cfg.tolerance("completeness_control", 1e-2), 0.0,
            )
        )
        return rows
