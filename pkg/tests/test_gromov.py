"""Tests for Gromov products, slim triangles and geometric probes."""

import math
import os
import sys

import numpy as np
import pytest

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gromov.curves import (
    SampledCurve,
    SampledTriangle,
    build_bundle_triangle,
    curve_parameters,
    quasigeodesic_check,
    sample_curve,
    side_chord,
    slimness,
    vertex_diameter,
)
from gromov.probes import (
    annular_recipe,
    bilipschitz_constant_probe,
    disc_ball_samples,
    product_ball_samples,
    quasi_flat_diamond,
)
from gromov.products import delta_four_point, delta_from_matrix, gromov_product, pairwise_distances
from metrics.exact import Annulus, Product, RightHalfPlane, disc_distance, halfplane_ray_geodesic
from models.errors import DomainViolationError
from models.geometry import ComplexPoint2
from worms.preworm import project


def line_matrix(xs):
    xs = np.asarray(xs, dtype=float)
    return np.abs(xs[:, None] - xs[None, :])


@pytest.fixture
def product_oracle(inner_preworm) -> Product:
    """Trivialized model of W_in: annular base times the right half-plane."""
    inner, outer = inner_preworm.annulus_radii()
    return Product(Annulus(inner, outer), RightHalfPlane())


@pytest.fixture
def unit_triangle(inner_preworm):
    recipe = annular_recipe(inner_preworm, scale=1.0, radius_factor=2.0, max_step=0.1)
    return build_bundle_triangle(recipe)


class TestFourPointDelta:
    """Test the four-point hyperbolicity constant."""

    def test_line_is_zero_hyperbolic(self):
        """Test that points on a line give delta = 0."""
        assert delta_from_matrix(line_matrix([0.0, 1.0, 2.5, 4.0, 7.0])) == pytest.approx(0.0, abs=1e-12)

    def test_four_cycle(self):
        """Test the unit 4-cycle, delta = 1."""
        g = np.array(
            [
                [0.0, 1.0, 2.0, 1.0],
                [1.0, 0.0, 1.0, 2.0],
                [2.0, 1.0, 0.0, 1.0],
                [1.0, 2.0, 1.0, 0.0],
            ]
        )

        assert delta_from_matrix(g) == pytest.approx(1.0)

    def test_sampled_quadruples(self):
        """Test the sampled branch above the exhaustive limit."""
        g = line_matrix(np.linspace(0.0, 10.0, 80))

        assert delta_from_matrix(g, seed=3, quadruples=5000) == pytest.approx(0.0, abs=1e-9)

    def test_needs_four_points(self, covering_oracle):
        """Test that fewer than four points raise."""
        with pytest.raises(DomainViolationError):
            delta_from_matrix(line_matrix([0.0, 1.0, 2.0]))
        with pytest.raises(DomainViolationError):
            delta_four_point(covering_oracle, [ComplexPoint2(1 + 0j, 1 + 0j)] * 3)

    def test_gromov_product_bounds(self, covering_oracle):
        """Test 0 <= (x|y)_o <= min(d(x,o), d(y,o))."""
        o = ComplexPoint2(1 + 0j, 1 + 0j)
        x = ComplexPoint2(1 + 0j, 3 + 0j)
        y = ComplexPoint2(1.2 + 0j, 0.5 + 0.5j)
        value = gromov_product(covering_oracle, x, y, o)

        assert -1e-12 <= value <= min(covering_oracle.distance(x, o), covering_oracle.distance(y, o)) + 1e-12


class TestDiamond:
    """Test the quasi-flat diamond in the pre-Worm."""

    def test_delta_equals_radius(self, covering_oracle, inner_preworm):
        """Test that the diamond realizes four-point value R."""
        points = quasi_flat_diamond(inner_preworm, 0j, 1 + 0j, 2.0)

        assert delta_four_point(covering_oracle, points) == pytest.approx(2.0, abs=1e-9)

    def test_side_lengths(self, covering_oracle, inner_preworm):
        """Test adjacent vertices at distance R and opposite ones at 2R."""
        points = quasi_flat_diamond(inner_preworm, 0j, 1 + 0j, 1.5)
        g = pairwise_distances(covering_oracle, points)

        assert g[0, 1] == pytest.approx(3.0, abs=1e-9)
        assert g[2, 3] == pytest.approx(3.0, abs=1e-9)
        assert g[0, 2] == pytest.approx(1.5, abs=1e-9)


class TestSlimTriangles:
    """Test the fiber-bundle triangle over the annular base."""

    def test_recipe_centerline(self, inner_preworm):
        """Test that small radii put z_n on the centerline."""
        recipe = annular_recipe(inner_preworm, scale=1.0, radius_factor=2.0, max_step=0.1)

        assert recipe.base_point == pytest.approx(1.0)
        assert recipe.base_geodesic.max_step <= 0.1 + 1e-12

    def test_slimness_equals_scale(self, product_oracle, unit_triangle):
        """Test that the corner (gamma(t), sigma(t)) is at distance t from sides a and b."""
        assert slimness(product_oracle, unit_triangle) == pytest.approx(1.0, abs=1e-9)

    def test_vertex_diameter(self, product_oracle, unit_triangle):
        """Test that the vertices are pairwise t apart."""
        assert vertex_diameter(product_oracle, unit_triangle) == pytest.approx(1.0, abs=1e-9)

    def test_fiber_side_is_geodesic(self, product_oracle, unit_triangle):
        """Test that side a is a unit-speed geodesic."""
        a_fit, b_fit, ok = quasigeodesic_check(product_oracle, unit_triangle.a)

        assert ok
        assert a_fit == pytest.approx(1.0, abs=1e-9)
        assert b_fit == pytest.approx(0.0, abs=1e-9)

    def test_broken_side_is_quasigeodesic(self, product_oracle, unit_triangle):
        """Test the (2, 0) claim on the broken side c."""
        a_fit, _, ok = quasigeodesic_check(product_oracle, unit_triangle.c)

        assert ok
        assert a_fit <= 2.0 + 1e-9
        assert unit_triangle.c.length == pytest.approx(2.0)

    def test_side_chord(self, product_oracle, unit_triangle):
        """Test the sampling chord of a side."""
        assert side_chord(product_oracle, unit_triangle.b) == pytest.approx(0.1, abs=1e-9)

    def test_unrepresentable_recipe(self, inner_preworm):
        """Test that recipes needing overflowing radii return None."""
        assert annular_recipe(inner_preworm, scale=200.0, radius_factor=2.0, max_step=1.0) is None

    def test_open_triangle_rejected(self, unit_triangle):
        """Test that sides must close up."""
        with pytest.raises(DomainViolationError):
            SampledTriangle(unit_triangle.a, unit_triangle.c, unit_triangle.b)


class TestSampledCurves:
    """Test sampled-curve validation."""

    def test_parameters(self):
        """Test uniform parameters with bounded spacing."""
        params = curve_parameters(1.0, 0.3)

        assert list(params) == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])

    def test_invalid_parameters(self):
        """Test nonpositive lengths and steps."""
        with pytest.raises(DomainViolationError):
            curve_parameters(0.0, 0.1)
        with pytest.raises(DomainViolationError):
            curve_parameters(1.0, -0.1)

    def test_validation(self):
        """Test ordering and constant checks."""
        p, q = ComplexPoint2(0j), ComplexPoint2(0.1 + 0j)
        with pytest.raises(DomainViolationError):
            SampledCurve((1.0, 0.0), (p, q))
        with pytest.raises(DomainViolationError):
            SampledCurve((0.0, 1.0), (p, q), a=0.5)
        with pytest.raises(DomainViolationError):
            SampledCurve((0.0,), (p,))

    def test_sample_curve(self):
        """Test sampling a half-plane ray."""
        curve = sample_curve(lambda t: ComplexPoint2(0j, halfplane_ray_geodesic(1 + 0j, t)), 2.0, 0.5)

        assert len(curve.points) == 5
        assert curve.end.w == pytest.approx(math.exp(4.0))


class TestProbes:
    """Test ball samplers and the bilipschitz probe."""

    def test_disc_ball_samples(self):
        """Test that disc samples lie in the Kobayashi ball."""
        for p in disc_ball_samples(1.5, 50, np.random.default_rng(3)):
            assert disc_distance(0j, p.z) <= 1.5 + 1e-9

    def test_product_ball_samples(self, inner_preworm, covering_oracle):
        """Test that pre-Worm samples lie within the product ball of the center."""
        center = project(inner_preworm, 0j, 1 + 0j)
        samples = product_ball_samples(inner_preworm, 0j, 1 + 0j, 2.0, 20, np.random.default_rng(5))

        for p in samples:
            assert covering_oracle.distance(center, p) <= 2.0 + 1e-9

    def test_bilipschitz_constant(self, disc_handle, disc_graph):
        """Test that restricting to B(p, 4R) never shortens distances."""
        value = bilipschitz_constant_probe(disc_handle, ComplexPoint2(0j), 1.0, graph=disc_graph, pair_count=30)

        assert value >= 1.0
        assert math.isfinite(value)

    def test_bilipschitz_arguments(self, disc_handle, disc_graph):
        """Test R >= 1 and the graph-or-region requirement."""
        with pytest.raises(DomainViolationError):
            bilipschitz_constant_probe(disc_handle, ComplexPoint2(0j), 0.5, graph=disc_graph)
        with pytest.raises(DomainViolationError):
            bilipschitz_constant_probe(disc_handle, ComplexPoint2(0j), 1.0)
