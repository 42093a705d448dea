import math

import numpy as np
import pytest

from sharpproj import (
    Polyhedron,
    distance_upper_bound,
    estimate_subtransversality,
    sharpness_exact,
    error_bound_constants,
)
from sharpproj.errors import InfeasibleProblem, InvalidInput
from sharpproj.instances import random_direction, random_polytope

from sharpproj.regularity import subtrans_alpha_from_sharpness

SQ2 = math.sqrt(2.0)


class TestErrorBoundConstants:
    def test_values_at_half(self):
        gamma, beta = error_bound_constants(0.5)
        assert gamma == pytest.approx(math.sqrt(15.0) / 8.0, abs=1e-15)
        assert beta == pytest.approx(2.0, abs=1e-15)

    def test_limits_toward_zero(self):
        gamma, beta = error_bound_constants(1e-12)
        assert gamma == pytest.approx(0.0, abs=1e-11)
        assert beta == pytest.approx(0.0, abs=1e-11)

    def test_composition_identity(self):
        for alpha in (0.3, 0.05, 0.9):
            a_prime = subtrans_alpha_from_sharpness(alpha)
            assert 2 * a_prime / (1 - a_prime) == pytest.approx(alpha, abs=1e-14)

    def test_range_check(self):
        for bad in (0.0, 1.0, -1.0, 2.0):
            with pytest.raises(InvalidInput):
                error_bound_constants(bad)


class TestEstimateSubtransversality:
    def test_wedge_exact_ratio(self, cone2d):
        rep = estimate_subtransversality(cone2d, np.array([0.0, -1.0]),
                                         num_samples=50, seed=1)
        # every hyperplane sample (s, 0) has d(x,P)/d(x,face) = 1/sqrt(2)
        assert rep.alpha_sub_est == pytest.approx(1 / SQ2, abs=1e-9)
        gamma_expected = (1 / SQ2) * math.sqrt(1 - 1 / 8)
        assert rep.gamma_implied == pytest.approx(gamma_expected, abs=1e-9)
        # one-sided check against the exact sharpness modulus
        assert rep.gamma_implied <= sharpness_exact(cone2d, np.array([0.0, -1.0])).alpha_exact + 1e-9

    def test_halfspace_vacuous(self):
        P = Polyhedron([[0.0, 1.0]], [0.0])
        rep = estimate_subtransversality(P, np.array([0.0, 1.0]),
                                         num_samples=30, seed=0)
        assert rep.vacuous
        assert rep.alpha_sub_est is None

    def test_unbounded_direction_rejected(self, cone2d):
        with pytest.raises(InvalidInput):
            estimate_subtransversality(cone2d, np.array([0.0, 1.0]))

    def test_forward_constant_check_random(self, rng):
        # gamma(0.99 * estimate) can never exceed the exact modulus
        for _ in range(12):
            P = random_polytope(rng, 2, 5)
            x_star = random_direction(rng, 2)
            rep = estimate_subtransversality(P, x_star, num_samples=120, seed=7)
            if rep.vacuous:
                continue
            sr = sharpness_exact(P, x_star).alpha_exact
            gamma, _ = error_bound_constants(min(0.99 * rep.alpha_sub_est, 1 - 1e-9))
            assert sr >= gamma - 1e-6

    def test_converse_inequality(self, rng):
        # if the set is beta-sharp for beta = 2a/(1-a) then the error bound
        # with constant a holds at every sampled hyperplane point
        from sharpproj.polyhedron import face_of
        from sharpproj.projection import project_polyhedron
        from sharpproj.sampling import box_samples
        from sharpproj.polyhedron import _nullspace

        for _ in range(10):
            P = random_polytope(rng, 2, 5)
            x_star = random_direction(rng, 2)
            sr = sharpness_exact(P, x_star).alpha_exact
            if not math.isfinite(sr):
                continue
            # choose a for which beta(a) <= sr, i.e. a = sr/(2+sr) scaled back
            a = subtrans_alpha_from_sharpness(sr) * 0.999
            fd = face_of(P, x_star)
            basis = _nullspace(x_star[None, :])
            t = box_samples(1, 60, seed=3, radius=8.0)
            for ti in t:
                x = fd.witness + basis @ ti
                d_set = project_polyhedron(P, x).distance
                d_face = project_polyhedron(fd.poly, x).distance
                assert a * d_face <= d_set + 1e-7


class TestDistanceUpperBound:
    def test_halfspace_alignment(self):
        P = Polyhedron([[0.0, 1.0]], [0.0])
        rep = distance_upper_bound(P, [0.0, 0.0], [0.0, 2.0], delta=0.5,
                                   num_samples=32, seed=0)
        # the outward direction coincides with the constraint normal, so the
        # sampled infimum collapses and the bound is trivially verified
        assert rep.sampled_inf <= 1e-9
        assert rep.epsilon <= 1e-9
        assert rep.verified

    def test_octagon_vertex(self):
        angles = (np.arange(8) + 0.5) * (2 * np.pi / 8)
        A = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        P = Polyhedron(A, np.ones(8))
        # a is the rightmost vertex, b sits outside, off the vertex normal
        a = np.array([1.0 / np.cos(np.pi / 8), 0.0])
        assert P.contains(a, tol=1e-9)
        b = a + np.array([0.8, 1.3])
        rep = distance_upper_bound(P, a, b, delta=0.6, num_samples=64, seed=2)
        assert rep.sampled_inf > 0
        assert rep.verified

    def test_random_instances_verify(self, rng):
        verified = 0
        for _ in range(30):
            n = int(rng.integers(2, 4))
            P = random_polytope(rng, n, n + 3)
            from sharpproj.polyhedron import feasible_point
            a = feasible_point(P.A, P.b)
            direction = random_direction(rng, n)
            b = a + direction * rng.uniform(1.0, 4.0)
            if P.contains(b, tol=1e-9):
                continue
            delta = rng.uniform(0.1, 1.0)
            rep = distance_upper_bound(P, a, b, delta, num_samples=64,
                                       seed=int(rng.integers(1 << 16)))
            assert rep.verified
            verified += 1
        assert verified >= 15

    def test_preconditions(self, unit_box2):
        with pytest.raises(InfeasibleProblem):
            distance_upper_bound(unit_box2, [5.0, 0.0], [9.0, 0.0], 0.5)
        with pytest.raises(InvalidInput):
            distance_upper_bound(unit_box2, [0.0, 0.0], [0.5, 0.5], 0.5)
        with pytest.raises(InvalidInput):
            distance_upper_bound(unit_box2, [0.0, 0.0], [3.0, 0.0], -1.0)
