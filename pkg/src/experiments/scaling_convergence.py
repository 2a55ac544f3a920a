"""Convergence of the metrics of the scaled Worms B_n(W) to the inner pre-Worm."""

import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from experiments.base_experiment import BaseExperiment
from metrics.bounds import inscribed_royden_upper_arrays
from metrics.covering import CoveringOracle
from metrics.domains import DomainHandle, PreWormHandle, WormHandle, evaluate_bounds
from metrics.graph import MetricGraph, SamplingRegion, build_metric_graph, graph_distance
from models.config import GraphSettings
from models.errors import DomainViolationError, SpecValidationError
from models.geometry import ComplexPoint2, points_to_arrays
from models.reports import ReportRow

logger = logging.getLogger(__name__)

# Pairs in a compact subset of the classical W_in with I = [-1, 1]
DEFAULT_PAIRS: List[Tuple[float, ...]] = [
    (1.0, 0.0, 1.0, 0.0, 1.05, 0.0, 1.1, 0.1),
    (0.9553, 0.2955, 1.2, 0.0, 1.0, 0.0, 0.9, -0.2),
    (0.9, 0.0, 0.95, -0.2, 1.0780, 0.2185, 1.0, 0.15),
    (1.0, 0.0, 1.3, 0.0, 1.0, 0.0, 0.7, 0.0),
    (0.9311, -0.1887, 1.0, 0.0, 0.9689, 0.2474, 1.1, -0.1),
]
REGION_PADDING = 0.15

Pair = Tuple[ComplexPoint2, ComplexPoint2]


def parse_pairs(raw: Sequence[Sequence[float]]) -> List[Pair]:
    """(Re z1, Im z1, Re w1, Im w1, Re z2, Im z2, Re w2, Im w2) rows as point pairs."""
    return [(ComplexPoint2.from_real(row[:4]), ComplexPoint2.from_real(row[4:])) for row in raw]


def pair_distances(
    domain: DomainHandle, region: SamplingRegion, pairs: List[Pair], settings: GraphSettings, workers: int
) -> Tuple[MetricGraph, List[float]]:
    points = [p for pair in pairs for p in pair]
    graph = build_metric_graph(domain, region, settings, extra_nodes=points, workers=workers)
    return graph, [graph_distance(graph, p, q)[0] for p, q in pairs]


class ScalingConvergenceExperiment(BaseExperiment):
    """Graph distances in B_n(W) against W_in, plus the two one-sided metric inequalities."""

    name = "scaling_convergence"

    def collect_rows(self) -> List[ReportRow]:
        if not self.spec.angle.is_classical:
            raise SpecValidationError("Scaling convergence uses inscribed bounds of the classical Worm")
        cfg = self.config
        preworm = self.inner_preworm()
        inner = PreWormHandle(preworm)
        covering = CoveringOracle(preworm)
        pairs = parse_pairs(cfg.pairs or DEFAULT_PAIRS)
        for p, q in pairs:
            if not (inner.contains(p) and inner.contains(q)):
                raise DomainViolationError(f"Pair ({p}, {q}) is outside W_in")

        settings = cfg.graph.model_copy(update={"edge_rule": "upper"})
        region = SamplingRegion.around([p for pair in pairs for p in pair], REGION_PADDING)
        inner_graph, inner_distances = pair_distances(inner, region, pairs, settings, cfg.workers)
        handles = {n: WormHandle(self.spec, n) for n in cfg.n_values}
        vectors = self._tangent_samples(pairs, list(handles.values()))

        rows: List[ReportRow] = []
        residuals: Dict[float, float] = {}
        epsilons: Dict[float, float] = {}
        combined: Dict[float, float] = {}
        for n in cfg.n_values:
            handle = handles[n]
            kept = [k for k, (p, q) in enumerate(pairs) if handle.contains(p) and handle.contains(q)]
            for k in sorted(set(range(len(pairs))) - set(kept)):
                rows.append(ReportRow.flagged("residual", n, "infeasible", pair=float(k)))
            if kept:
                graph, distances = pair_distances(handle, region, [pairs[k] for k in kept], settings, cfg.workers)
                combined[n] = graph.resolution + inner_graph.resolution
                worst = 0.0
                for k, d_n in zip(kept, distances):
                    residual = abs(d_n - inner_distances[k])
                    worst = max(worst, residual)
                    rows.append(
                        ReportRow.info(
                            "residual", n, residual, pair=float(k), distance_scaled=d_n,
                            distance_inner=inner_distances[k], exact_inner=covering.distance(*pairs[k]),
                            combined_resolution=combined[n],
                        )
                    )
                residuals[n] = worst
                logger.info(f"n={n:g}: worst residual {worst:.4g} (combined resolution {combined[n]:.4g})")
            upper_eps, lower_eps = self._fitted_epsilons(handle, covering, vectors)
            epsilons[n] = upper_eps
            rows.append(ReportRow.info("epsilon_upper", n, upper_eps))
            rows.append(ReportRow.info("epsilon_lower", n, lower_eps))

        rows.extend(self._trend_rows(residuals, epsilons, combined))
        return rows

    def _tangent_samples(self, pairs: List[Pair], handles: List[WormHandle]) -> Tuple[np.ndarray, ...]:
        """Seeded tangent vectors at the pair points lying in every B_n(W)."""
        rng = self.rng()
        count = self.config.tangent_samples
        bases = [p for pair in pairs for p in pair]
        z, w = points_to_arrays([bases[k % len(bases)] for k in range(count)])
        directions = rng.standard_normal((count, 4))
        dz = directions[:, 0] + 1j * directions[:, 1]
        dw = directions[:, 2] + 1j * directions[:, 3]
        common = np.all([h.margin_arrays(z, w) > 0 for h in handles], axis=0)
        return z[common], w[common], dz[common], dw[common]

    def _fitted_epsilons(
        self, handle: WormHandle, covering: CoveringOracle, vectors: Tuple[np.ndarray, ...]
    ) -> Tuple[float, float]:
        """Smallest eps with K_n <= (1 + eps) K_in and K_in <= (1 + eps) K_n on the samples."""
        z, w, dz, dw = vectors
        if len(z) == 0:
            return np.inf, np.inf
        k_inner = covering.royden_arrays(z, w, dz, dw)
        upper = inscribed_royden_upper_arrays(self.spec, handle.scale, z, w, dz, dw)
        lower = evaluate_bounds(handle.lower_bounds(), z, w, dz, dw, combine="max")
        upper_eps = float(np.max(upper / k_inner)) - 1.0
        lower_eps = float(np.max(k_inner / lower)) - 1.0
        logger.debug(f"{handle.name}: eps_upper {upper_eps:.4g}, eps_lower {lower_eps:.4g} over {len(z)} vectors")
        return upper_eps, lower_eps

    def _trend_rows(
        self, residuals: Dict[float, float], epsilons: Dict[float, float], combined: Dict[float, float]
    ) -> List[ReportRow]:
        n_values = self.config.n_values
        n_last = n_values[-1]
        rows: List[ReportRow] = []
        if n_last in residuals:
            factor = self.config.tolerance("residual_factor", 2.0)
            rows.append(ReportRow.at_most("residual_final", n_last, residuals[n_last], factor * combined[n_last], 0.0))
            if n_values[0] in residuals and n_values[0] != n_last:
                rows.append(ReportRow.at_most("residual_trend", n_last, residuals[n_last], residuals[n_values[0]], 0.0))
        else:
            rows.append(ReportRow.flagged("residual_final", n_last, "infeasible"))
        values = [epsilons[n] for n in n_values]
        increase = max((b - a for a, b in zip(values, values[1:])), default=0.0)
        rows.append(ReportRow.at_most("epsilon_upper_monotone", n_last, increase, 0.0, self.config.tolerance("epsilon_monotone", 1e-12)))
        return rows
