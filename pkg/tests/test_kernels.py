import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sharpproj import Cone, distance_to_cone, distance_to_convex_hull, distance_to_ray, nnls
from sharpproj.errors import DimensionMismatch, InvalidInput
from sharpproj.kernels import _nnls_py, unit

from oracles import grid_cone_distance, grid_hull_distance, scipy_cone_distance

SQ2 = math.sqrt(2.0)


def unit_vectors(dim):
    return st.lists(st.floats(-5, 5), min_size=dim, max_size=dim).filter(
        lambda v: np.linalg.norm(v) > 1e-3).map(lambda v: unit(np.array(v)))


class TestDistanceToRay:
    def test_orthogonal(self):
        assert distance_to_ray([0.0, 1.0], [1.0, 0.0]) == 1.0

    def test_membership(self):
        v = unit(np.array([0.3, -0.7, 0.2]))
        assert distance_to_ray(v, v) <= 1e-15

    def test_wedge_value(self):
        # distance from straight-down to the diagonal edge normal: sqrt(2)/2
        u = np.array([0.0, -1.0])
        v = np.array([-1.0, -1.0]) / SQ2
        assert distance_to_ray(u, v) == pytest.approx(SQ2 / 2, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            distance_to_ray([0.0, 1.0], [1.0, 0.0, 0.0])

    def test_requires_unit(self):
        with pytest.raises(InvalidInput):
            distance_to_ray([0.0, 2.0], [1.0, 0.0])

    @settings(max_examples=200, derandomize=True)
    @given(unit_vectors(3), unit_vectors(3))
    def test_pythagorean_identity(self, u, v):
        d = distance_to_ray(u, v)
        s = max(0.0, float(np.dot(u, v)))
        assert abs(d * d + s * s - 1.0) <= 1e-12


class TestDistanceToCone:
    def test_membership_combination(self):
        x = np.array([0.0, -1 / SQ2, -1 / SQ2])
        K = Cone(np.array([[0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]))
        d, coeffs = distance_to_cone(x, K)
        assert d <= 1e-12
        assert np.all(coeffs >= 0)

    def test_negative_orthant_distance(self):
        x = np.array([1 / SQ2, 1 / SQ2])
        K = Cone(np.array([[-1.0, 0.0], [0.0, -1.0]]))
        d, _ = distance_to_cone(x, K)
        assert d == pytest.approx(1.0, abs=1e-12)

    def test_matches_grid_oracle(self, rng):
        for _ in range(25):
            k = rng.integers(1, 4)
            gens = rng.standard_normal((k, 3))
            x = rng.standard_normal(3)
            d, _ = distance_to_cone(x, Cone(gens))
            assert d == pytest.approx(grid_cone_distance(x, gens), abs=1e-2)

    def test_matches_scipy_nnls(self, rng):
        for _ in range(50):
            k = rng.integers(1, 6)
            n = rng.integers(1, 5)
            gens = rng.standard_normal((k, n))
            x = rng.standard_normal(n)
            d, _ = distance_to_cone(x, Cone(gens))
            assert d == pytest.approx(scipy_cone_distance(x, gens), abs=1e-9)

    def test_exact_membership_of_combinations(self, rng):
        for _ in range(40):
            gens = rng.standard_normal((3, 4))
            w = rng.uniform(0, 2, size=3)
            x = w @ gens
            d, _ = distance_to_cone(x, Cone(gens))
            assert d <= 1e-9

    def test_trivial_cone(self):
        d, coeffs = distance_to_cone(np.array([3.0, 4.0]), Cone.trivial(2))
        assert d == 5.0
        assert coeffs.size == 0

    def test_single_generator_matches_ray(self, rng):
        for _ in range(30):
            x = unit(rng.standard_normal(4))
            g = unit(rng.standard_normal(4))
            d_cone, _ = distance_to_cone(x, Cone(g[None, :]))
            assert abs(d_cone - distance_to_ray(x, g)) <= 1e-12

    def test_single_generator_scales_with_norm(self, rng):
        for _ in range(30):
            raw = rng.standard_normal(3) * rng.uniform(0.5, 4.0)
            g = unit(rng.standard_normal(3))
            d_cone, _ = distance_to_cone(raw, Cone(g[None, :]))
            expected = float(np.linalg.norm(raw)) * distance_to_ray(unit(raw), g)
            assert abs(d_cone - expected) <= 1e-12

    def test_normalized_symmetry(self, rng):
        # d(p/|p|, cone[q]) == d(q/|q|, cone[p])
        for _ in range(40):
            p = rng.standard_normal(3) * rng.uniform(0.1, 5)
            q = rng.standard_normal(3) * rng.uniform(0.1, 5)
            d1, _ = distance_to_cone(unit(p), Cone(q[None, :]))
            d2, _ = distance_to_cone(unit(q), Cone(p[None, :]))
            assert abs(d1 - d2) <= 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            distance_to_cone(np.ones(2), Cone(np.ones((1, 3))))


class TestNnls:
    def test_against_scipy(self, rng):
        import scipy.optimize
        for _ in range(60):
            n, k = rng.integers(1, 7), rng.integers(1, 7)
            G = rng.standard_normal((n, k))
            y = rng.standard_normal(n)
            t, rnorm = nnls(G, y)
            t_ref, r_ref = scipy.optimize.nnls(G, y)
            assert rnorm == pytest.approx(r_ref, abs=1e-9)
            assert np.all(t >= 0)

    def test_python_and_dispatch_agree(self, rng):
        # the jitted kernel and its plain-python source compute identically
        G = rng.standard_normal((5, 3))
        y = rng.standard_normal(5)
        t_py, r_py, s_py = _nnls_py(G, y, 1e-12, 150)
        t, r = nnls(G, y)
        assert s_py == 0
        assert r == pytest.approx(r_py, abs=1e-14)
        np.testing.assert_allclose(t, t_py, atol=1e-14)


class TestDistanceToConvexHull:
    def test_singleton_hulls(self):
        assert distance_to_convex_hull([0.0], [[1.0]]) == 1.0
        assert distance_to_convex_hull([0.0], [[-1.0]]) == 1.0

    def test_origin_inside(self):
        assert distance_to_convex_hull([0.0], [[1.0], [-1.0]]) <= 1e-12

    def test_two_piece_family(self):
        # gradients of max(2x, -x): singleton hulls at distances 2 and 1
        d1 = distance_to_convex_hull([0.0], [[2.0]])
        d2 = distance_to_convex_hull([0.0], [[-1.0]])
        assert (d1, d2) == (2.0, 1.0)
        assert min(d1, d2) == 1.0

    def test_matches_grid_oracle(self, rng):
        for _ in range(25):
            k = rng.integers(1, 4)
            pts = rng.standard_normal((k, 2)) * 2
            x = rng.standard_normal(2)
            d = distance_to_convex_hull(x, pts)
            assert d == pytest.approx(grid_hull_distance(x, pts), abs=1e-2)

    def test_segment_distance_exact(self):
        # hull of (1,1) and (1,-1) is a vertical segment at x=1
        d = distance_to_convex_hull([0.0, 0.0], [[1.0, 1.0], [1.0, -1.0]])
        assert d == pytest.approx(1.0, abs=1e-12)

    def test_empty_points_rejected(self):
        with pytest.raises(InvalidInput):
            distance_to_convex_hull([0.0], np.zeros((0, 1)))
