"""Kobayashi distance approximation by shortest paths on sampled metric graphs.

Nodes are grid samples of a box intersected with the domain; an edge joins
nodes within ``neighbor_factor`` grid spacings and weighs the chord by the
metric estimate at its midpoint, or by Simpson's rule over the upper bound.
Graph resolution is the largest edge weight.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial import cKDTree

from metrics.disc_search import affine_royden_upper_arrays
from metrics.domains import DomainHandle, evaluate_bounds
from models.config import GraphSettings
from models.errors import DisconnectedPairError, DomainViolationError
from models.geometry import ComplexPoint2, TangentVector2, points_to_arrays
from models.oracle import AccuracyClass, MetricOracle

logger = logging.getLogger(__name__)

EDGE_CHUNK = 50_000


@dataclass(frozen=True)
class SamplingRegion:
    """Axis-aligned box in real coordinates (Re z, Im z[, Re w, Im w])."""

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper) or len(self.lower) not in (2, 4):
            raise DomainViolationError("Sampling boxes are 2- or 4-dimensional")
        if any(hi < lo for lo, hi in zip(self.lower, self.upper)):
            raise DomainViolationError("Sampling box bounds are inverted")

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @classmethod
    def around(cls, points: Sequence[ComplexPoint2], padding: float, dimension: int = 4) -> "SamplingRegion":
        coords = np.array([p.as_real()[:dimension] for p in points])
        return cls(
            tuple(float(x) for x in coords.min(axis=0) - padding),
            tuple(float(x) for x in coords.max(axis=0) + padding),
        )

    def grid(self, points_per_axis: int) -> Tuple[np.ndarray, np.ndarray]:
        """Grid coordinates (N, d) and per-axis spacing; flat axes get a single node."""
        axes, spacing = [], []
        for lo, hi in zip(self.lower, self.upper):
            if hi > lo:
                axes.append(np.linspace(lo, hi, points_per_axis))
                spacing.append((hi - lo) / (points_per_axis - 1))
            else:
                axes.append(np.array([lo]))
                spacing.append(1.0)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([m.ravel() for m in mesh]), np.array(spacing)


def _to_complex(coords: np.ndarray, dimension: int) -> Tuple[np.ndarray, np.ndarray]:
    z = coords[:, 0] + 1j * coords[:, 1]
    if dimension == 2:
        return z, np.zeros_like(z)
    return z, coords[:, 2] + 1j * coords[:, 3]


def _to_real(z: np.ndarray, w: np.ndarray, dimension: int) -> np.ndarray:
    if dimension == 2:
        return np.column_stack([z.real, z.imag])
    return np.column_stack([z.real, z.imag, w.real, w.imag])


@dataclass(eq=False)
class MetricGraph:
    """Nodes inside a domain, Kobayashi-length weighted edges, and the graph resolution."""

    z: np.ndarray
    w: np.ndarray
    edges: np.ndarray
    weights: np.ndarray
    dimension: int = 4
    max_chord: float = 0.0
    domain_name: str = ""
    matrix: csr_matrix = field(init=False, repr=False)
    labels: np.ndarray = field(init=False, repr=False)
    _tree: cKDTree = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.edges = np.asarray(self.edges, dtype=int).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=float)
        n = len(self.z)
        if n == 0:
            raise DomainViolationError("A metric graph needs at least one node")
        if len(self.edges) and not np.all(np.isfinite(self.weights) & (self.weights > 0)):
            raise DomainViolationError("Edge weights must be positive and finite")
        self.matrix = csr_matrix((self.weights, (self.edges[:, 0], self.edges[:, 1])), shape=(n, n))
        _, self.labels = connected_components(self.matrix, directed=False)
        self._tree = cKDTree(self.coordinates)
        self._row = lru_cache(maxsize=1024)(self._single_source)

    @property
    def coordinates(self) -> np.ndarray:
        return _to_real(self.z, self.w, self.dimension)

    @property
    def resolution(self) -> float:
        return float(np.max(self.weights)) if len(self.weights) else 0.0

    @property
    def node_count(self) -> int:
        return len(self.z)

    def node(self, index: int) -> ComplexPoint2:
        return ComplexPoint2(complex(self.z[index]), complex(self.w[index]))

    def nodes(self) -> List[ComplexPoint2]:
        return [self.node(i) for i in range(self.node_count)]

    def snap(self, p: ComplexPoint2) -> int:
        """Index of the nearest node; it must lie within one chord of ``p``."""
        coords = np.array(p.as_real()[: self.dimension])
        distance, index = self._tree.query(coords)
        if distance > max(self.max_chord, 1e-12):
            raise DomainViolationError(f"{p} is {distance:.3g} away from the graph (snapping tolerance {self.max_chord:.3g})")
        return int(index)

    def _single_source(self, index: int) -> np.ndarray:
        return dijkstra(self.matrix, directed=False, indices=index)

    def distances_from(self, index: int) -> np.ndarray:
        return self._row(index)

    def check_connected(self, i: int, j: int) -> None:
        if self.labels[i] != self.labels[j]:
            raise DisconnectedPairError((int(self.labels[i]), int(self.labels[j])))

    def without_nodes(self, removed: Sequence[int]) -> "MetricGraph":
        """Induced subgraph on the remaining nodes, reindexed."""
        keep = np.ones(self.node_count, dtype=bool)
        keep[list(removed)] = False
        return self.induced(np.flatnonzero(keep))

    def induced(self, kept: np.ndarray) -> "MetricGraph":
        kept = np.asarray(kept, dtype=int)
        index = np.full(self.node_count, -1)
        index[kept] = np.arange(len(kept))
        mask = (index[self.edges[:, 0]] >= 0) & (index[self.edges[:, 1]] >= 0)
        edges = np.column_stack([index[self.edges[mask, 0]], index[self.edges[mask, 1]]])
        return MetricGraph(
            z=self.z[kept],
            w=self.w[kept],
            edges=edges,
            weights=self.weights[mask],
            dimension=self.dimension,
            max_chord=self.max_chord,
            domain_name=self.domain_name,
        )


def _chunked(fn: Callable[[slice], np.ndarray], total: int, workers: int) -> np.ndarray:
    """Evaluate ``fn`` on consecutive slices; results are concatenated in slice order."""
    slices = [slice(start, min(start + EDGE_CHUNK, total)) for start in range(0, total, EDGE_CHUNK)]
    if not slices:
        return np.zeros(0)
    if workers <= 1:
        parts = [fn(s) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(fn, slices))
    return np.concatenate(parts)


def edge_metric(
    domain: DomainHandle,
    z: np.ndarray,
    w: np.ndarray,
    dz: np.ndarray,
    dw: np.ndarray,
    settings: GraphSettings,
) -> np.ndarray:
    """Metric estimate per vector: bound midpoint when the bounds are close under the "midpoint" rule, else the upper bound.

    Vectors without a closed-form upper bound fall back to the affine disc search.
    """
    upper = evaluate_bounds(domain.upper_bounds(), z, w, dz, dw, combine="min")
    if upper is None:
        upper = np.full(z.shape, np.inf)
    missing = ~np.isfinite(upper)
    if np.any(missing):
        upper = upper.copy()
        upper[missing] = affine_royden_upper_arrays(domain, z[missing], w[missing], dz[missing], dw[missing])
    lower = evaluate_bounds(domain.lower_bounds(), z, w, dz, dw, combine="max")
    if lower is None or settings.edge_rule != "midpoint":
        return upper
    upper = np.maximum(upper, lower)
    gap = (upper - lower) / np.where(upper > 0, upper, 1.0)
    return np.where(gap <= settings.max_bound_gap, 0.5 * (upper + lower), upper)


def build_metric_graph(
    domain: DomainHandle,
    region: SamplingRegion,
    settings: Optional[GraphSettings] = None,
    extra_nodes: Sequence[ComplexPoint2] = (),
    workers: int = 1,
) -> MetricGraph:
    """Sample ``region`` on a grid, keep interior nodes and weigh neighbor chords."""
    settings = settings or GraphSettings()
    dimension = region.dimension
    if dimension != domain.dimension:
        raise DomainViolationError(f"A {dimension}-d box cannot sample the {domain.dimension}-d domain {domain.name}")
    coords, spacing = region.grid(settings.points_per_axis)
    z, w = _to_complex(coords, dimension)
    keep = domain.margin_arrays(z, w) > settings.min_margin
    z, w = z[keep], w[keep]
    if extra_nodes:
        ez, ew = points_to_arrays(extra_nodes)
        if dimension == 2:
            ew = np.zeros_like(ez)
        if not np.all(domain.margin_arrays(ez, ew) > 0):
            raise DomainViolationError(f"Extra graph nodes must lie inside {domain.name}")
        extra = np.unique(_to_real(ez, ew, dimension), axis=0)
        ez, ew = _to_complex(extra, dimension)
        if len(z):
            # grid nodes coinciding with an extra node would leave a zero-length edge
            gap, _ = cKDTree(extra / spacing).query(_to_real(z, w, dimension) / spacing)
            z, w = z[gap > 1e-9], w[gap > 1e-9]
        z, w = np.concatenate([z, ez]), np.concatenate([w, ew])
    if len(z) == 0:
        raise DomainViolationError(f"The sampling box does not meet {domain.name}")

    scaled = _to_real(z, w, dimension) / spacing
    pairs = cKDTree(scaled).query_pairs(settings.neighbor_factor, output_type="ndarray")
    return _weighted_graph(domain, z, w, pairs, settings, workers)


def _weighted_graph(
    domain: DomainHandle,
    z: np.ndarray,
    w: np.ndarray,
    pairs: np.ndarray,
    settings: GraphSettings,
    workers: int,
) -> MetricGraph:
    """Weigh candidate node pairs whose midpoint lies inside the domain."""
    dimension = domain.dimension
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))] if len(pairs) else pairs.reshape(0, 2)
    dz = z[pairs[:, 1]] - z[pairs[:, 0]]
    dw = w[pairs[:, 1]] - w[pairs[:, 0]]
    mid_z = 0.5 * (z[pairs[:, 0]] + z[pairs[:, 1]])
    mid_w = 0.5 * (w[pairs[:, 0]] + w[pairs[:, 1]])
    if dimension == 2:
        dw = np.zeros_like(dz)
    inside = domain.margin_arrays(mid_z, mid_w) > 0
    pairs, dz, dw, mid_z, mid_w = pairs[inside], dz[inside], dw[inside], mid_z[inside], mid_w[inside]

    def weigh(at_z: np.ndarray, at_w: np.ndarray) -> np.ndarray:
        return _chunked(
            lambda s: edge_metric(domain, at_z[s], at_w[s], dz[s], dw[s], settings),
            len(pairs),
            workers,
        )

    weights = weigh(mid_z, mid_w)
    if settings.edge_rule == "simpson":
        ends = [weigh(z[pairs[:, k]], w[pairs[:, k]]) for k in (0, 1)]
        weights = (ends[0] + 4.0 * weights + ends[1]) / 6.0
    usable = np.isfinite(weights) & (weights > 0)
    if not np.all(usable):
        logger.warning(f"Dropped {int(np.sum(~usable))} edges without a finite metric estimate")
    pairs, weights = pairs[usable], weights[usable]
    chords = np.hypot(np.abs(dz[usable]), np.abs(dw[usable]))
    graph = MetricGraph(
        z=z,
        w=w,
        edges=pairs.astype(int),
        weights=weights,
        dimension=dimension,
        max_chord=float(np.max(chords)) if len(chords) else 0.0,
        domain_name=domain.name,
    )
    logger.info(
        f"Built metric graph on {domain.name}: {graph.node_count} nodes, {len(weights)} edges, "
        f"resolution {graph.resolution:.4g}"
    )
    return graph


def graph_distance(g: MetricGraph, p: ComplexPoint2, q: ComplexPoint2) -> Tuple[float, List[ComplexPoint2]]:
    """Shortest-path length between the snapped endpoints and the node path."""
    i, j = g.snap(p), g.snap(q)
    if i == j:
        return 0.0, [g.node(i)]
    g.check_connected(i, j)
    distances, predecessors = dijkstra(g.matrix, directed=False, indices=i, return_predecessors=True)
    path = [j]
    while path[-1] != i:
        path.append(int(predecessors[path[-1]]))
    return float(distances[j]), [g.node(k) for k in reversed(path)]


class GraphOracle(MetricOracle[ComplexPoint2]):
    """Graph-approximate Kobayashi distance with snapping to the nearest node."""

    def __init__(self, graph: MetricGraph, domain: DomainHandle, settings: Optional[GraphSettings] = None):
        self.graph = graph
        self.domain = domain
        self.settings = settings or GraphSettings()
        self.accuracy = AccuracyClass.graph_approx(graph.resolution)

    def contains(self, p: ComplexPoint2) -> bool:
        return self.domain.contains(p)

    def distance(self, p: ComplexPoint2, q: ComplexPoint2) -> float:
        i, j = self.graph.snap(p), self.graph.snap(q)
        if i == j:
            return 0.0
        self.graph.check_connected(i, j)
        # single-source rows are cached per smaller index so d(p, q) = d(q, p) exactly
        a, b = min(i, j), max(i, j)
        return float(self.graph.distances_from(a)[b])

    def distance_matrix(self, xs: Sequence[ComplexPoint2], ys: Sequence[ComplexPoint2]) -> np.ndarray:
        rows = [self.graph.snap(p) for p in xs]
        cols = [self.graph.snap(q) for q in ys]
        out = np.empty((len(rows), len(cols)))
        for r, i in enumerate(rows):
            for c, j in enumerate(cols):
                if i == j:
                    out[r, c] = 0.0
                    continue
                a, b = min(i, j), max(i, j)
                out[r, c] = self.graph.distances_from(a)[b]
        if not np.all(np.isfinite(out)):
            bad = np.argwhere(~np.isfinite(out))[0]
            self.graph.check_connected(rows[bad[0]], cols[bad[1]])
        return out

    def royden(self, v: TangentVector2) -> float:
        v.require_nonzero()
        arrays = [np.array([x]) for x in (v.base.z, v.base.w, v.dz, v.dw)]
        return float(edge_metric(self.domain, *arrays, self.settings)[0])

    @property
    def name(self) -> str:
        return f"graph:{self.graph.domain_name}"


class ProductGraphOracle(MetricOracle[ComplexPoint2]):
    """Distance on a product of planar domains as the max of the factor graph distances."""

    def __init__(self, first: GraphOracle, second: GraphOracle):
        if first.graph.dimension != 2 or second.graph.dimension != 2:
            raise DomainViolationError("Product graph factors must be planar graphs")
        self.first, self.second = first, second
        self.accuracy = AccuracyClass.graph_approx(max(first.graph.resolution, second.graph.resolution))

    def contains(self, p: ComplexPoint2) -> bool:
        return self.first.contains(ComplexPoint2(p.z)) and self.second.contains(ComplexPoint2(p.w))

    def distance(self, p: ComplexPoint2, q: ComplexPoint2) -> float:
        return max(
            self.first.distance(ComplexPoint2(p.z), ComplexPoint2(q.z)),
            self.second.distance(ComplexPoint2(p.w), ComplexPoint2(q.w)),
        )

    def royden(self, v: TangentVector2) -> float:
        v.require_nonzero()
        parts = []
        if v.dz != 0:
            parts.append(self.first.royden(TangentVector2(ComplexPoint2(v.base.z), v.dz)))
        if v.dw != 0:
            parts.append(self.second.royden(TangentVector2(ComplexPoint2(v.base.w), v.dw)))
        return max(parts)

    @property
    def name(self) -> str:
        return f"graph:{self.first.graph.domain_name}x{self.second.graph.domain_name}"


def export_graph(g: MetricGraph, directory: Path, stem: str = "graph") -> Tuple[Path, Path]:
    """Write ``<stem>_nodes.csv`` and ``<stem>_edges.csv``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    nodes = pd.DataFrame(
        {
            "node": np.arange(g.node_count),
            "z_re": g.z.real,
            "z_im": g.z.imag,
            "w_re": g.w.real,
            "w_im": g.w.imag,
        }
    )
    edges = pd.DataFrame({"source": g.edges[:, 0], "target": g.edges[:, 1], "weight": g.weights})
    nodes_path = directory / f"{stem}_nodes.csv"
    edges_path = directory / f"{stem}_edges.csv"
    nodes.to_csv(nodes_path, index=False, float_format="%.17g")
    edges.to_csv(edges_path, index=False, float_format="%.17g")
    logger.info(f"Exported graph to {nodes_path} and {edges_path}")
    return nodes_path, edges_path


def import_graph(nodes_path: Path, edges_path: Path, dimension: int = 4, domain_name: str = "") -> MetricGraph:
    nodes = pd.read_csv(nodes_path).sort_values("node")
    edges = pd.read_csv(edges_path)
    z = nodes["z_re"].to_numpy() + 1j * nodes["z_im"].to_numpy()
    w = nodes["w_re"].to_numpy() + 1j * nodes["w_im"].to_numpy()
    pairs = edges[["source", "target"]].to_numpy(dtype=int).reshape(-1, 2)
    chords = np.hypot(np.abs(z[pairs[:, 1]] - z[pairs[:, 0]]), np.abs(w[pairs[:, 1]] - w[pairs[:, 0]]))
    return MetricGraph(
        z=z,
        w=w,
        edges=pairs,
        weights=edges["weight"].to_numpy(dtype=float),
        dimension=dimension,
        max_chord=float(np.max(chords)) if len(chords) else 0.0,
        domain_name=domain_name,
    )


def _level_region(a: ComplexPoint2, b: ComplexPoint2, dimension: int) -> SamplingRegion:
    coords = np.array([a.as_real()[:dimension], b.as_real()[:dimension]])
    pad = 0.5 * float(np.linalg.norm(coords[1] - coords[0]))
    return SamplingRegion(tuple(coords.min(axis=0) - pad), tuple(coords.max(axis=0) + pad))


def approach_points(o: ComplexPoint2, target: ComplexPoint2, steps: int) -> List[ComplexPoint2]:
    """p_k = target + 2^{-k} (o - target), k = 1..steps."""
    return [
        ComplexPoint2(target.z + (o.z - target.z) * 0.5**k, target.w + (o.w - target.w) * 0.5**k)
        for k in range(1, steps + 1)
    ]


def build_multiresolution_graph(
    domain: DomainHandle,
    regions: Sequence[SamplingRegion],
    settings: Optional[GraphSettings] = None,
    extra_nodes: Sequence[ComplexPoint2] = (),
    workers: int = 1,
) -> MetricGraph:
    """One graph over a chain of grids, one grid per region.

    Level k joins pairs within ``neighbor_factor`` of its own spacing among its
    nodes, the nodes of level k + 1 and the extra nodes; pairs lying entirely in
    level k + 1 are left to that level's finer radius.
    """
    settings = settings or GraphSettings()
    dimension = domain.dimension
    extra = np.zeros((0, dimension))
    if extra_nodes:
        ez, ew = points_to_arrays(extra_nodes)
        if dimension == 2:
            ew = np.zeros_like(ez)
        if not np.all(domain.margin_arrays(ez, ew) > 0):
            raise DomainViolationError(f"Extra graph nodes must lie inside {domain.name}")
        extra = np.unique(_to_real(ez, ew, dimension), axis=0)
    blocks, levels, spacings = [extra], [np.full(len(extra), -1)], []
    for level, region in enumerate(regions):
        if region.dimension != dimension:
            raise DomainViolationError(f"A {region.dimension}-d box cannot sample the {dimension}-d domain {domain.name}")
        coords, spacing = region.grid(settings.points_per_axis)
        z, w = _to_complex(coords, dimension)
        coords = coords[domain.margin_arrays(z, w) > settings.min_margin]
        if len(extra) and len(coords):
            gap, _ = cKDTree(extra / spacing).query(coords / spacing)
            coords = coords[gap > 1e-9]
        blocks.append(coords)
        levels.append(np.full(len(coords), level))
        spacings.append(spacing)
    coords = np.concatenate(blocks)
    level_of = np.concatenate(levels)
    if len(coords) == 0:
        raise DomainViolationError(f"The sampling boxes do not meet {domain.name}")

    found = []
    for level, spacing in enumerate(spacings):
        candidates = np.flatnonzero((level_of == level) | (level_of == level + 1) | (level_of == -1))
        if len(candidates) < 2:
            continue
        local = cKDTree(coords[candidates] / spacing).query_pairs(settings.neighbor_factor, output_type="ndarray")
        local = candidates[local.reshape(-1, 2)]
        finer = (level_of[local[:, 0]] == level + 1) & (level_of[local[:, 1]] == level + 1)
        found.append(local[~finer])
    pairs = np.unique(np.sort(np.concatenate(found), axis=1), axis=0) if found else np.zeros((0, 2), dtype=int)
    # grid nodes repeated across levels
    pairs = pairs[np.any(coords[pairs[:, 0]] != coords[pairs[:, 1]], axis=1)]
    z, w = _to_complex(coords, dimension)
    return _weighted_graph(domain, z, w, pairs, settings, workers)


def completeness_probe(
    domain: DomainHandle,
    o: ComplexPoint2,
    boundary_target: ComplexPoint2,
    steps: int,
    settings: Optional[GraphSettings] = None,
    points_per_level: int = 5,
) -> List[float]:
    """Graph distances d(o, p_k) to points approaching ``boundary_target`` geometrically.

    All distances come from one graph whose grids refine toward the target,
    each level with spacing proportional to its step length. Edges use Simpson's
    rule over the upper metric bound.
    """
    if steps < 1:
        raise DomainViolationError("Completeness distances need at least one step")
    if not domain.contains(o):
        raise DomainViolationError(f"{o} is outside {domain.name}")
    base = settings or GraphSettings()
    level_settings = base.model_copy(update={"points_per_axis": points_per_level, "min_margin": 0.0, "edge_rule": "simpson"})
    approach = approach_points(o, boundary_target, steps)
    chain = [o] + approach
    regions = [_level_region(a, b, domain.dimension) for a, b in zip(chain, chain[1:])]
    graph = build_multiresolution_graph(domain, regions, level_settings, extra_nodes=chain)
    source = graph.snap(o)
    from_o = graph.distances_from(source)
    sequence = []
    for level, p in enumerate(approach, start=1):
        target = graph.snap(p)
        graph.check_connected(source, target)
        sequence.append(float(from_o[target]))
        logger.debug(f"Completeness level {level}: d(o, p) = {sequence[-1]:.6g}")
    return sequence
