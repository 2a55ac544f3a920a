"""Tests for metric bounds, extremal-disc search and metric graphs."""

import cmath
import math
import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from metrics.bounds import closed_form_upper, inscribed_royden_upper, royden_lower
from metrics.covering import CoveringOracle
from metrics.disc_search import DiscSearchConfig, affine_royden_upper_arrays, royden_upper
from metrics.domains import DomainHandle, ModelHandle, WormHandle
from metrics.exact import RightHalfPlane
from metrics.graph import (
    GraphOracle,
    MetricGraph,
    ProductGraphOracle,
    SamplingRegion,
    build_metric_graph,
    build_multiresolution_graph,
    completeness_probe,
    export_graph,
    graph_distance,
    import_graph,
)
from models.config import GraphSettings
from models.errors import DisconnectedPairError, DomainViolationError
from models.geometry import ComplexPoint2, TangentVector2
from worms.preworm import PreWormSpec

ORIGIN = ComplexPoint2(0j)
HALF = ComplexPoint2(0.5 + 0j)


class _OpenBox(DomainHandle):
    """Handle without any enclosing oracle."""

    dimension = 2

    def margin_arrays(self, z, w):
        return 1.0 - np.abs(np.asarray(z).real)


class TestClosedFormBounds:
    """Test lower and upper bounds from comparison domains."""

    def test_disc_bounds_are_exact(self, disc_handle):
        """Test that a model domain bounds its own metric from both sides."""
        v = TangentVector2(HALF, 1 + 0j)

        lower = royden_lower(disc_handle, v)
        upper = closed_form_upper(disc_handle, v)

        assert lower.value == pytest.approx(4.0 / 3.0)
        assert upper.value == pytest.approx(4.0 / 3.0)
        assert not lower.flagged and not upper.flagged

    def test_lower_without_oracle_is_flagged(self):
        """Test the trivial lower bound 0."""
        estimate = royden_lower(_OpenBox(), TangentVector2(ORIGIN, 1 + 0j))

        assert estimate.value == 0.0
        assert estimate.flagged

    def test_upper_without_bound_is_flagged(self, two_puncture_spec):
        """Test that a non-classical Worm has no closed-form upper bound."""
        handle = WormHandle(two_puncture_spec)
        estimate = closed_form_upper(handle, TangentVector2(ComplexPoint2(0.5 + 0j, 1 + 0j), 1 + 0j))

        assert math.isinf(estimate.value)
        assert estimate.flagged

    def test_zero_vector_rejected(self, disc_handle):
        """Test that K needs a nonzero vector."""
        with pytest.raises(DomainViolationError):
            royden_lower(disc_handle, TangentVector2(ORIGIN))


class TestInscribedBound:
    """Test the inscribed product bound for scaled classical Worms."""

    @pytest.fixture
    def vector(self) -> TangentVector2:
        return TangentVector2(ComplexPoint2(1 + 0j, 1 + 0j), 0.2 + 0.1j, 0.3 - 0.2j)

    def test_not_below_outer_preworm(self, classical_spec, vector):
        """Test K_{W_out} <= inscribed bound, since B_n(W) lies in W_out."""
        outer = CoveringOracle(PreWormSpec.outer_of(classical_spec))

        assert inscribed_royden_upper(classical_spec, 1.0, vector) >= outer.royden(vector) - 1e-12

    def test_decreases_with_scale(self, classical_spec, vector):
        """Test that larger scaled Worms get smaller bounds."""
        values = [inscribed_royden_upper(classical_spec, scale, vector) for scale in (1.0, 4.0, 16.0)]

        assert values[0] >= values[1] >= values[2]
        assert math.isfinite(values[2])

    def test_infinite_off_inner_base(self, classical_spec):
        """Test that points over theta^{-1}(J \\ I) get no bound."""
        v = TangentVector2(ComplexPoint2(math.exp(0.7) + 0j, cmath.exp(1.4j)), 1 + 0j)

        assert math.isinf(inscribed_royden_upper(classical_spec, 1.0, v))

    def test_needs_classical_angle(self, two_puncture_spec, vector):
        """Test that the bound rejects non-classical angles."""
        with pytest.raises(DomainViolationError):
            inscribed_royden_upper(two_puncture_spec, 1.0, vector)


class TestDiscSearch:
    """Test the extremal-disc upper bound."""

    @pytest.fixture
    def config(self) -> DiscSearchConfig:
        return DiscSearchConfig(degree=2, restarts=1, max_iters=50)

    def test_disc_center(self, disc_handle, config):
        """Test that the identity disc is nearly extremal at the origin."""
        estimate = royden_upper(disc_handle, TangentVector2(ORIGIN, 1 + 0j), config)

        assert estimate.value == pytest.approx(1.0, rel=1e-3)
        assert estimate.value >= 1.0
        assert not estimate.flagged

    def test_never_below_exact(self, disc_handle, config):
        """Test that sampled discs do not undercut K_D by more than the sampling error."""
        estimate = royden_upper(disc_handle, TangentVector2(HALF, 1 + 0j), config)

        assert estimate.value >= 0.99 * 4.0 / 3.0
        assert estimate.value <= 2.0 + 1e-3

    def test_homogeneous(self, disc_handle, config):
        """Test K(t v) = |t| K(v)."""
        v = TangentVector2(ORIGIN, 1 + 0j)
        single = royden_upper(disc_handle, v, config).value
        double = royden_upper(disc_handle, v.scaled(2.0), config).value

        assert double == pytest.approx(2.0 * single, rel=1e-12)

    def test_deterministic(self, disc_handle, config):
        """Test that a fixed seed gives the same bound."""
        v = TangentVector2(HALF, 0.6 + 0.8j)

        assert royden_upper(disc_handle, v, config) == royden_upper(disc_handle, v, config)

    def test_outside_and_zero_rejected(self, disc_handle, config):
        """Test invalid inputs."""
        with pytest.raises(DomainViolationError):
            royden_upper(disc_handle, TangentVector2(ComplexPoint2(2 + 0j), 1 + 0j), config)
        with pytest.raises(DomainViolationError):
            royden_upper(disc_handle, TangentVector2(ORIGIN), config)

    def test_fallback_near_boundary(self, disc_handle, config):
        """Test the flagged affine fallback inside the feasibility margin."""
        estimate = royden_upper(disc_handle, TangentVector2(ComplexPoint2(0.99995 + 0j), 1 + 0j), config)

        assert estimate.flagged
        assert estimate.source == "affine_fallback"

    def test_halfplane_within_two_percent(self, config):
        """Test the right half-plane at 1, where the extremal disc has its pole on the circle."""
        handle = ModelHandle(RightHalfPlane())
        estimate = royden_upper(handle, TangentVector2(ComplexPoint2(1 + 0j), 1 + 0j), config)

        assert estimate.source == "disc_search"
        assert estimate.value <= 0.5 * 1.02
        assert estimate.value >= 0.5 * (1.0 - 1e-3)

    def test_halfplane_rotated_direction(self, config):
        """Test an off-axis base point with a vertical direction."""
        handle = ModelHandle(RightHalfPlane())
        estimate = royden_upper(handle, TangentVector2(ComplexPoint2(2 + 1j), 1j), config)

        assert estimate.value == pytest.approx(0.25, rel=0.02)

    def test_invalid_config(self):
        """Test radii validation."""
        with pytest.raises(DomainViolationError):
            DiscSearchConfig(radii=(0.8, 0.5))

    def test_affine_batch(self, disc_handle):
        """Test the batched affine bound at the disc center."""
        values = affine_royden_upper_arrays(
            disc_handle, np.array([0j]), np.array([0j]), np.array([1 + 0j]), np.array([0j])
        )

        assert values[0] == pytest.approx(1.0 / (1.0 - 1e-4), rel=1e-6)


class TestMetricGraph:
    """Test graph distances on the unit disc."""

    def test_distance_close_to_exact(self, disc_graph):
        """Test the graph distance from 0 to 1/2 against arctanh(1/2)."""
        distance, path = graph_distance(disc_graph, ORIGIN, HALF)

        assert distance == pytest.approx(math.atanh(0.5), rel=0.05)
        assert path[0] == ORIGIN and path[-1] == HALF

    def test_same_node(self, disc_graph):
        """Test d(p, p) = 0."""
        distance, path = graph_distance(disc_graph, HALF, HALF)

        assert distance == 0.0
        assert path == [HALF]

    def test_oracle_is_symmetric(self, disc_graph, disc_handle):
        """Test exact symmetry of the cached oracle."""
        oracle = GraphOracle(disc_graph, disc_handle)
        p, q = ComplexPoint2(0.18 - 0.27j), ComplexPoint2(-0.36 + 0.45j)

        assert oracle.distance(p, q) == oracle.distance(q, p)
        assert oracle.accuracy.resolution == pytest.approx(disc_graph.resolution)

    def test_distance_matrix_matches_pairs(self, disc_graph, disc_handle):
        """Test the batched oracle."""
        oracle = GraphOracle(disc_graph, disc_handle)
        points = [ORIGIN, HALF, ComplexPoint2(-0.45 + 0.09j)]
        matrix = oracle.distance_matrix(points, points)

        for i, p in enumerate(points):
            for j, q in enumerate(points):
                assert matrix[i, j] == pytest.approx(oracle.distance(p, q))

    def test_removing_nodes_lengthens_paths(self, disc_graph):
        """Test that an induced subgraph never shortens a distance."""
        full, _ = graph_distance(disc_graph, ORIGIN, HALF)
        z = disc_graph.z
        blocked = np.flatnonzero((np.abs(z.imag) < 0.05) & (z.real > 0.05) & (z.real < 0.45))
        reduced, _ = graph_distance(disc_graph.without_nodes(blocked), ORIGIN, HALF)

        assert len(blocked) > 0
        assert reduced >= full - 1e-12

    def test_product_oracle_takes_the_max(self, disc_graph, disc_handle):
        """Test the product distance as the larger factor graph distance."""
        factor = GraphOracle(disc_graph, disc_handle)
        oracle = ProductGraphOracle(factor, factor)
        base_only = oracle.distance(ComplexPoint2(0j, 0j), ComplexPoint2(0.5 + 0j, 0j))
        both = oracle.distance(ComplexPoint2(0j, 0.5 + 0j), ComplexPoint2(0.5 + 0j, 0j))

        assert base_only == factor.distance(ORIGIN, HALF)
        assert both == pytest.approx(math.atanh(0.5), rel=0.05)
        assert oracle.royden(TangentVector2(ComplexPoint2(0j, 0j), 1 + 0j, 2 + 0j)) == pytest.approx(2.0, rel=0.05)
        assert oracle.accuracy.resolution == pytest.approx(disc_graph.resolution)

    def test_product_oracle_needs_planar_factors(self, disc_handle):
        """Test that a 4-d factor graph is rejected."""

        def single_node(dimension: int) -> GraphOracle:
            graph = MetricGraph(
                z=np.array([0j]), w=np.array([0j]), edges=np.zeros((0, 2)), weights=np.zeros(0), dimension=dimension
            )
            return GraphOracle(graph, disc_handle)

        planar, spatial = single_node(2), single_node(4)

        with pytest.raises(DomainViolationError):
            ProductGraphOracle(planar, spatial)

    def test_export_and_import(self, disc_graph, temp_output_dir):
        """Test that exported graphs reload with the same distances."""
        nodes_path, edges_path = export_graph(disc_graph, Path(temp_output_dir), stem="disc")
        loaded = import_graph(nodes_path, edges_path, dimension=2)

        assert nodes_path.name == "disc_nodes.csv"
        assert edges_path.name == "disc_edges.csv"
        assert graph_distance(loaded, ORIGIN, HALF)[0] == pytest.approx(graph_distance(disc_graph, ORIGIN, HALF)[0])

    def test_disconnected_pair(self):
        """Test that separated nodes raise instead of returning infinity."""
        graph = MetricGraph(
            z=np.array([0j, 0.5 + 0j]),
            w=np.zeros(2, dtype=complex),
            edges=np.zeros((0, 2), dtype=int),
            weights=np.zeros(0),
            dimension=2,
            max_chord=1.0,
        )

        with pytest.raises(DisconnectedPairError):
            graph_distance(graph, ORIGIN, HALF)

    def test_snapping_tolerance(self, disc_graph):
        """Test that points far from every node are rejected."""
        with pytest.raises(DomainViolationError):
            disc_graph.snap(ComplexPoint2(5 + 0j))

    def test_dimension_mismatch(self, disc_handle):
        """Test that a 4-d box cannot sample a planar domain."""
        region = SamplingRegion((-0.5, -0.5, -0.5, -0.5), (0.5, 0.5, 0.5, 0.5))

        with pytest.raises(DomainViolationError):
            build_metric_graph(disc_handle, region, GraphSettings(points_per_axis=5))

    def test_extra_nodes_must_be_inside(self, disc_handle):
        """Test that requested nodes outside the domain raise."""
        region = SamplingRegion((-0.5, -0.5), (0.5, 0.5))

        with pytest.raises(DomainViolationError):
            build_metric_graph(disc_handle, region, GraphSettings(points_per_axis=5), extra_nodes=[ComplexPoint2(1.5 + 0j)])

    def test_region_validation(self):
        """Test inverted and malformed boxes."""
        with pytest.raises(DomainViolationError):
            SamplingRegion((1.0, 0.0), (0.0, 1.0))
        with pytest.raises(DomainViolationError):
            SamplingRegion((0.0,), (1.0,))


class TestCompletenessProbe:
    """Test distances toward a boundary point."""

    def test_distances_track_arctanh(self, disc_handle):
        """Test that the sequence increases and tracks arctanh."""
        sequence = completeness_probe(disc_handle, ORIGIN, ComplexPoint2(1 + 0j), steps=3)

        assert len(sequence) == 3
        assert all(b > a for a, b in zip(sequence, sequence[1:]))
        assert sequence[-1] == pytest.approx(math.atanh(0.875), rel=0.1)

    def test_distances_never_undercut_exact(self, disc_handle):
        """Test each d(o, p_k) against the exact disc distance; path sums would not be checked this way."""
        sequence = completeness_probe(disc_handle, ORIGIN, ComplexPoint2(1 + 0j), steps=5)

        for k, value in enumerate(sequence, start=1):
            exact = math.atanh(1.0 - 0.5**k)
            assert value >= exact - 1e-9
            assert value == pytest.approx(exact, rel=0.1)

    def test_multiresolution_graph_is_one_component(self, disc_handle):
        """Test that levels are joined into one connected graph with every extra node kept."""
        regions = [SamplingRegion((-0.2, -0.3), (0.8, 0.3)), SamplingRegion((0.6, -0.1), (0.9, 0.1))]
        ends = [ORIGIN, ComplexPoint2(0.85 + 0j)]
        settings = GraphSettings(points_per_axis=5, min_margin=0.0, edge_rule="simpson")
        graph = build_multiresolution_graph(disc_handle, regions, settings, extra_nodes=ends)

        i, j = graph.snap(ends[0]), graph.snap(ends[1])
        assert graph.labels[i] == graph.labels[j]
        assert graph.distances_from(i)[j] >= math.atanh(0.85) - 1e-9

    def test_invalid_arguments(self, disc_handle):
        """Test step count and base point checks."""
        with pytest.raises(DomainViolationError):
            completeness_probe(disc_handle, ORIGIN, ComplexPoint2(1 + 0j), steps=0)
        with pytest.raises(DomainViolationError):
            completeness_probe(disc_handle, ComplexPoint2(2 + 0j), ComplexPoint2(1 + 0j), steps=2)
