"""Tests for the closed-form Kobayashi geometry of the model domains."""

import cmath
import math
import os
import sys

import numpy as np
import pytest

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from metrics.exact import (
    Annulus,
    Product,
    RightHalfPlane,
    Strip,
    UnitDisc,
    annulus_distance,
    cayley,
    deck_minimum,
    disc_distance,
    disc_geodesic,
    disc_royden,
    halfplane_distance,
    halfplane_point_royden,
    halfplane_ray_geodesic,
    strip_cross_geodesic,
    strip_distance,
    strip_royden,
    strip_to_halfplane,
)
from models.errors import DomainViolationError, SearchExhaustedError
from models.geometry import ComplexPoint2, TangentVector2


class TestDisc:
    """Test the unit disc anchors."""

    def test_distance_anchor(self):
        """Test k_D(0, 1/2) = arctanh(1/2)."""
        assert disc_distance(0j, 0.5 + 0j) == pytest.approx(math.atanh(0.5), abs=1e-12)

    def test_distance_symmetric_and_zero(self):
        """Test symmetry and zero diagonal."""
        p, q = 0.3 - 0.2j, -0.5 + 0.1j

        assert disc_distance(p, q) == pytest.approx(disc_distance(q, p), abs=1e-14)
        assert disc_distance(p, p) == 0.0

    def test_outside_rejected(self):
        """Test that points off the disc raise."""
        with pytest.raises(DomainViolationError):
            disc_distance(0j, 1.0 + 0j)

    def test_royden(self):
        """Test K_D(z; v) = |v| / (1 - |z|^2)."""
        assert disc_royden(0j, 1 + 0j) == pytest.approx(1.0)
        assert disc_royden(0.5 + 0j, 1 + 0j) == pytest.approx(4.0 / 3.0)

    def test_geodesic_is_unit_speed(self):
        """Test that the disc geodesic reaches distance t."""
        a, b = 0.2 + 0j, -0.3 + 0.4j
        point = disc_geodesic(a, b, 0.7)

        assert disc_distance(a, point) == pytest.approx(0.7, abs=1e-10)


class TestHalfPlane:
    """Test the right half-plane."""

    def test_distance_anchor(self):
        """Test k_H(1, 3) = arctanh(1/2)."""
        assert halfplane_distance(1 + 0j, 3 + 0j) == pytest.approx(math.atanh(0.5), abs=1e-12)

    def test_cayley_is_isometric(self):
        """Test that the Cayley map carries half-plane distances to the disc."""
        p, q = 0.7 + 0.4j, 2.0 - 1.5j

        assert disc_distance(cayley(p), cayley(q)) == pytest.approx(halfplane_distance(p, q), abs=1e-10)

    def test_royden(self):
        """Test K_H(w; v) = |v| / (2 Re w)."""
        assert halfplane_point_royden(1 + 0j, 1 + 0j) == pytest.approx(0.5)

    def test_ray_geodesic(self):
        """Test the horizontal geodesic through a real point."""
        assert halfplane_distance(1 + 0j, halfplane_ray_geodesic(1 + 0j, 0.8)) == pytest.approx(0.8, abs=1e-12)

    def test_outside_rejected(self):
        """Test that the imaginary axis is outside."""
        with pytest.raises(DomainViolationError):
            halfplane_distance(1j, 1 + 0j)


class TestStrip:
    """Test strips and their geodesics."""

    def test_matches_halfplane_image(self):
        """Test that the strip distance equals the distance of the conformal images."""
        a, b = 0.3 + 0.2j, 0.6 - 0.5j
        expected = halfplane_distance(strip_to_halfplane(a, 0.0, 1.0), strip_to_halfplane(b, 0.0, 1.0))

        assert strip_distance(a, b, 0.0, 1.0) == pytest.approx(expected, rel=1e-9)

    def test_far_apart_lifts_stay_finite(self):
        """Test that lifts far apart along the strip give finite distances."""
        value = strip_distance(0.5 + 0j, 0.5 + 200j, 0.0, 1.0)

        assert math.isfinite(value)
        assert value == pytest.approx(math.pi * 200.0 / 2.0, rel=1e-3)

    def test_cross_geodesic_is_unit_speed(self):
        """Test the geodesic across the strip."""
        zeta0 = -0.5 + 0.5 + 0.3j
        for t in (-2.0, 0.5, 3.0):
            point = strip_cross_geodesic(zeta0, t, -0.5, 1.0)
            assert strip_distance(zeta0, point, -0.5, 1.0) == pytest.approx(abs(t), abs=1e-9)

    def test_royden_at_center(self):
        """Test K_S at the centerline: pi |v| / (2 h)."""
        assert strip_royden(0.5 + 0j, 1 + 0j, 0.0, 1.0) == pytest.approx(math.pi / 2.0)

    def test_margin(self):
        """Test the planar margin of a strip."""
        strip = Strip(1.0, -0.5)

        assert list(strip.planar_margin(np.array([0.0 + 0j, 0.4 + 0j]))) == pytest.approx([0.5, 0.1])
        assert not strip.planar_contains(0.5 + 0j)


class TestAnnulus:
    """Test the annulus through its strip cover."""

    @pytest.fixture
    def annulus(self) -> Annulus:
        return Annulus(math.exp(-0.5), math.exp(0.5))

    def test_rotation_invariance(self, annulus):
        """Test that rotations are isometries."""
        a, b = 0.9 * cmath.exp(0.3j), 1.2 * cmath.exp(2.9j)
        rotation = cmath.exp(1.1j)

        assert annulus.planar_distance(rotation * a, rotation * b) == pytest.approx(
            annulus.planar_distance(a, b), abs=1e-12
        )

    def test_not_longer_than_principal_lift(self, annulus):
        """Test that the deck minimum does not exceed the principal lift distance."""
        a, b = 0.9 * cmath.exp(3.0j), 1.1 * cmath.exp(-3.0j)
        lift = strip_distance(cmath.log(a), cmath.log(b), -0.5, 1.0)

        assert annulus_distance(a, b, annulus.inner, annulus.outer) < lift

    def test_zero_on_diagonal(self, annulus):
        """Test d(p, p) = 0."""
        assert annulus.planar_distance(1 + 0j, 1 + 0j) == 0.0

    def test_outside_rejected(self, annulus):
        """Test points off the annulus."""
        with pytest.raises(DomainViolationError):
            annulus.planar_distance(0.1 + 0j, 1 + 0j)

    def test_royden_matches_strip(self, annulus):
        """Test K_A(z; v) = K_S(log z; v / z)."""
        z, dz = 1.1 * cmath.exp(0.4j), 0.3 - 0.2j
        expected = strip_royden(cmath.log(z), dz / z, -0.5, 1.0)

        assert annulus.planar_royden(z, dz) == pytest.approx(expected)
        assert annulus.planar_royden_array(np.array([z]), np.array([dz]))[0] == pytest.approx(expected)


class TestDeckMinimum:
    """Test the deck-index search."""

    def test_doubles_until_interior(self):
        """Test that the search range grows until the minimizer is interior."""
        value, k = deck_minimum(lambda k: abs(k - 20), start_range=8)

        assert (value, k) == (0, 20)

    def test_exhausted(self):
        """Test that a minimizer escaping every range raises."""
        with pytest.raises(SearchExhaustedError):
            deck_minimum(lambda k: -k, start_range=8)


class TestProduct:
    """Test products of planar domains."""

    def test_max_of_factors(self):
        """Test k_{A x B} = max(k_A, k_B)."""
        product = Product(UnitDisc(), RightHalfPlane())
        p, q = ComplexPoint2(0j, 1 + 0j), ComplexPoint2(0.5 + 0j, 1.2 + 0j)

        assert product.distance(p, q) == pytest.approx(
            max(disc_distance(0j, 0.5 + 0j), halfplane_distance(1 + 0j, 1.2 + 0j))
        )

    def test_royden_is_max(self):
        """Test K of a product vector."""
        product = Product(UnitDisc(), UnitDisc())
        v = TangentVector2(ComplexPoint2(0j, 0.5 + 0j), 1 + 0j, 1 + 0j)

        assert product.royden(v) == pytest.approx(4.0 / 3.0)
        assert product.royden_arrays(
            np.array([0j]), np.array([0.5 + 0j]), np.array([1 + 0j]), np.array([1 + 0j])
        )[0] == pytest.approx(4.0 / 3.0)

    def test_membership(self):
        """Test that both factors must contain the point."""
        product = Product(UnitDisc(), RightHalfPlane())

        assert product.contains(ComplexPoint2(0j, 1 + 0j))
        assert not product.contains(ComplexPoint2(0j, -1 + 0j))
        with pytest.raises(DomainViolationError):
            product.distance(ComplexPoint2(0j, -1 + 0j), ComplexPoint2(0j, 1 + 0j))
