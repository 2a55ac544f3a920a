"""Pseudoconvexity audit of the Worm boundary, stratum by stratum."""

import logging
from collections import defaultdict
from typing import Dict, List

import numpy as np

from experiments.base_experiment import BaseExperiment
from models.geometry import min_eigenvalue
from models.reports import ReportRow
from worms.sampling import BoundarySample, sample_boundary
from worms.worm import (
    BoundaryStratum,
    WormSpec,
    classify_boundary,
    gradient_norm,
    kernel_residual,
    levi_form,
    tangency_check,
    tangential_curvature,
)

logger = logging.getLogger(__name__)

STRATUM_INDEX = {
    BoundaryStratum.SPINE: 0.0,
    BoundaryStratum.BODY: 1.0,
    BoundaryStratum.EXCEPTIONAL: 2.0,
    BoundaryStratum.CAP: 3.0,
}


def audit_samples(spec: WormSpec, samples: List[BoundarySample], cap_method: str) -> Dict[BoundaryStratum, Dict[str, List[float]]]:
    """Per-stratum lists of Levi eigenvalues, tangential curvatures and gradient norms."""
    measured: Dict[BoundaryStratum, Dict[str, List[float]]] = defaultdict(lambda: defaultdict(list))
    for sample in samples:
        p = sample.point
        stratum = classify_boundary(spec, p)
        values = measured[stratum]
        values["min_eigenvalue"].append(min_eigenvalue(levi_form(spec, p, cap_method=cap_method)))
        values["tangential_curvature"].append(tangential_curvature(spec, p, cap_method))
        values["gradient_norm"].append(gradient_norm(spec, p))
        if stratum == BoundaryStratum.BODY:
            values["kernel_residual"].append(kernel_residual(spec, p))
            values["tangency"].append(tangency_check(spec, p))
    return measured


class LeviAuditExperiment(BaseExperiment):
    """Levi form of the Worm boundary on sampled points of every stratum."""

    name = "levi_audit"

    def collect_rows(self) -> List[ReportRow]:
        cfg = self.config
        eigen_tol = cfg.tolerance("levi_eigenvalue", 1e-8)
        curvature_floor = cfg.tolerance("tangential_curvature", 1e-6)
        kernel_tol = cfg.tolerance("kernel_residual", 1e-10)

        samples = sample_boundary(self.spec, cfg.samples, cfg.seed, spine_clearance=cfg.spine_clearance)
        measured = audit_samples(self.spec, samples, cfg.cap_method)
        rows: List[ReportRow] = []
        for stratum, values in sorted(measured.items(), key=lambda item: STRATUM_INDEX[item[0]]):
            index = STRATUM_INDEX[stratum]
            count = float(len(values["min_eigenvalue"]))
            rows.append(
                ReportRow.at_least(
                    f"{stratum.value}_min_eigenvalue", index, min(values["min_eigenvalue"]), 0.0, eigen_tol, count=count
                )
            )
            rows.append(ReportRow.at_least(f"{stratum.value}_gradient_norm", index, min(values["gradient_norm"]), 0.0, 0.0))
            curvature = np.asarray(values["tangential_curvature"])
            if stratum == BoundaryStratum.SPINE:
                # the spine is Levi flat
                rows.append(ReportRow.within("spine_tangential_curvature", index, float(np.max(np.abs(curvature))), 0.0, eigen_tol))
            else:
                rows.append(
                    ReportRow.at_least(
                        f"{stratum.value}_tangential_curvature", index, float(curvature.min()), curvature_floor, 0.0
                    )
                )
            if stratum == BoundaryStratum.BODY:
                rows.append(ReportRow.at_most("body_kernel_residual", index, max(values["kernel_residual"]), 0.0, kernel_tol))
                rows.append(ReportRow.at_least("body_tangency", index, min(values["tangency"]), 0.0, 0.0))
            logger.info(f"Audited {int(count)} {stratum.value} points")

        if cfg.corrupted_control and hasattr(self.spec.eta, "with_flipped_convexity"):
            rows.append(self._corrupted_control())
        return rows

    def _corrupted_control(self) -> ReportRow:
        """A concave cap must produce negative tangential curvature somewhere on the caps."""
        corrupted = self.spec.with_cap(self.spec.eta.with_flipped_convexity())
        samples = sample_boundary(corrupted, max(self.config.samples // 10, 100), self.seed + 1)
        caps = [s.point for s in samples if classify_boundary(corrupted, s.point) == BoundaryStratum.CAP]
        if not caps:
            return ReportRow.flagged("corrupted_cap_min_curvature", STRATUM_INDEX[BoundaryStratum.CAP], "infeasible")
        worst = min(tangential_curvature(corrupted, p, self.config.cap_method) for p in caps)
        logger.info(f"Corrupted-cap control: min tangential curvature {worst:.3e} over {len(caps)} cap points")
        # passes when the audit detects the loss of pseudoconvexity
        return ReportRow.at_most("corrupted_cap_min_curvature", STRATUM_INDEX[BoundaryStratum.CAP], worst, 0.0, 0.0,
                                 count=float(len(caps)))
