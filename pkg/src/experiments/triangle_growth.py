"""Growth of non-slim triangles in the inner pre-Worm."""

import logging
import math
from typing import List, Optional

import numpy as np

from experiments.base_experiment import BaseExperiment
from gromov.curves import SampledCurve, SampledTriangle, build_bundle_triangle, quasigeodesic_check, side_chord, slimness
from gromov.probes import ambient_points, annular_recipe, bilipschitz_constant_probe
from metrics.covering import CoveringOracle
from metrics.domains import ModelHandle
from metrics.exact import Annulus, Product, RightHalfPlane
from metrics.graph import SamplingRegion
from models.errors import SpecValidationError
from models.geometry import ComplexPoint2
from models.reports import ReportRow
from worms.preworm import PreWormSpec, trivializing_radius

logger = logging.getLogger(__name__)

PROBE_RADIUS = 1.0


def _ambient_triangle(spec: PreWormSpec, chart_center: complex, triangle: SampledTriangle) -> SampledTriangle:
    sides = [
        SampledCurve(side.params, tuple(ambient_points(spec, chart_center, side.points)), side.a, side.b)
        for side in triangle.sides
    ]
    return SampledTriangle(*sides, closure_tolerance=1e-9 * max(1.0, max(abs(p.w) for p in sides[2].points)))


class TriangleGrowthExperiment(BaseExperiment):
    """Slimness of the fiber-bundle triangles T_n for growing side length t_n."""

    name = "triangle_growth"

    def probe_constant(self, annulus: Annulus) -> float:
        """Empirical bilipschitz constant of unit balls in the base annulus."""
        center = ComplexPoint2(complex(math.sqrt(annulus.inner * annulus.outer)), 0j)
        region = SamplingRegion((-annulus.outer, -annulus.outer), (annulus.outer, annulus.outer))
        return bilipschitz_constant_probe(
            ModelHandle(annulus), center, PROBE_RADIUS, region, self.config.graph, seed=self.seed
        )

    def collect_rows(self) -> List[ReportRow]:
        if not self.spec.angle.is_classical:
            raise SpecValidationError("Triangle growth needs an annular base (classical angle function)")
        cfg = self.config
        preworm = self.inner_preworm()
        inner, outer = preworm.annulus_radii()
        annulus = Annulus(inner, outer)
        exact = Product(annulus, RightHalfPlane())
        covering = CoveringOracle(preworm)
        constant = self.probe_constant(annulus)
        budget = 3.0 * cfg.resolution

        rows: List[ReportRow] = [ReportRow.info("bilipschitz_constant", PROBE_RADIUS, constant)]
        slim_covering: List[Optional[float]] = []
        for t in cfg.scales:
            if budget >= t:
                logger.warning(f"Scale t={t} is below the error budget {budget:g}; row is inconclusive")
                rows.append(ReportRow.flagged("slim_exact", t, "inconclusive", error_budget=budget))
                slim_covering.append(None)
                continue
            recipe = annular_recipe(preworm, t, cfg.radius_factor, cfg.resolution, constant)
            if recipe is None:
                logger.warning(f"No base point with trivializing radius {cfg.radius_factor * t:g}; row is infeasible")
                rows.append(ReportRow.flagged("slim_exact", t, "infeasible"))
                slim_covering.append(None)
                continue

            triangle = build_bundle_triangle(recipe)
            radius = trivializing_radius(preworm, recipe.base_point)
            chord = max(side_chord(exact, side) for side in triangle.sides)
            measured = slimness(exact, triangle)
            rows.append(
                ReportRow.within(
                    "slim_exact", t, measured, t, budget,
                    trivializing_radius=radius, containment_scale=radius / (16.0 * constant), max_chord=chord,
                )
            )
            for label, side in zip("abc", triangle.sides):
                a_fit, b_fit, ok = quasigeodesic_check(exact, side)
                row = ReportRow.at_most(f"quasigeodesic_{label}", t, b_fit, side.b, exact.tolerance + 1e-12, a_fit=a_fit, a_claim=side.a)
                rows.append(row)
                if not ok:
                    logger.warning(f"Side {label} of T(t={t}) misses its ({side.a:g}, {side.b:g}) claim: B = {b_fit:.3g}")

            ambient = slimness(covering, _ambient_triangle(preworm, recipe.base_point, triangle))
            slim_covering.append(ambient)
            rows.append(ReportRow.info("slim_covering", t, ambient, ratio=ambient / t))
            logger.info(f"T(t={t}): slim_exact {measured:.6g}, slim_covering {ambient:.6g}, r(z_n) {radius:.4g}")

        rows.extend(self._trend_rows(slim_covering, budget))
        return rows

    def _trend_rows(self, slim_covering: List[Optional[float]], budget: float) -> List[ReportRow]:
        scales = self.config.scales
        measured = [(t, s) for t, s in zip(scales, slim_covering) if s is not None]
        if len(measured) < 2:
            return [ReportRow.flagged("slim_covering_monotone", scales[-1], "inconclusive")]
        steps = np.diff([s for _, s in measured])
        rows = [ReportRow.at_least("slim_covering_monotone", measured[-1][0], float(steps.min()), 0.0, budget)]
        floor = self.config.tolerance("slim_ratio", 0.5)
        for t, s in measured[-2:]:
            rows.append(ReportRow.at_least("slim_covering_ratio", t, s / t, floor, 0.0))
        return rows
