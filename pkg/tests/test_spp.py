import math

import numpy as np
import pytest

from sharpproj import (
    MaxAffine,
    Polyhedron,
    check_conditions,
    construct_infeasible_v,
    lp_solve_enumeration,
    mu_threshold_exact,
    mu_threshold_oblivious,
    project_polyhedron,
    solve_cp_spp,
    solve_lp_spp,
    theta,
    verify_direct_certificate,
)
from sharpproj.errors import InvalidInput, UnboundedProblem
from sharpproj.instances import (
    random_bounded_lp,
    random_max_affine,
    random_polytope,
)
from sharpproj.polyhedron import feasible_point
from sharpproj.sharpness import sharpness_lower_bound

SQ2 = math.sqrt(2.0)
XSTAR2 = np.array([0.0, 1.0])
XSTAR3 = np.array([0.0, 1.0, 1.0]) / SQ2


class TestTheta:
    def test_wedge_gap(self, cone2d):
        assert theta(cone2d, XSTAR2, [-1.0, -0.5]) == pytest.approx(0.5, abs=1e-12)

    def test_minimizer_gap_zero(self, cone2d):
        assert theta(cone2d, XSTAR2, [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)

    def test_orthant_gap(self, orthant3):
        assert theta(orthant3, XSTAR3, [1.0, -1.0, 0.0]) == pytest.approx(
            1 / SQ2, abs=1e-12)

    def test_unbounded_rejected(self, cone2d):
        with pytest.raises(UnboundedProblem):
            theta(cone2d, np.array([0.0, -1.0]), [0.0, 0.0])


class TestCheckConditions:
    def test_cond1_only(self, cone2d):
        c1, c2, d = check_conditions(cone2d, XSTAR2, [-1.0, -0.5], SQ2 / 2)
        assert c1 and not c2
        assert d == pytest.approx(3 * SQ2 / 4, abs=1e-10)

    def test_both_after_shift(self, cone2d):
        c1, c2, d = check_conditions(cone2d, XSTAR2, [-1.0, -10.5], SQ2 / 2)
        assert c1 and c2
        # theta = 10.5, (1 - 1/8) d < 10.5
        assert (1 - 0.125) * d < 10.5

    def test_feasible_point_fails_cond1(self, cone2d):
        c1, _, _ = check_conditions(cone2d, XSTAR2, [0.0, 2.0], SQ2 / 2)
        assert not c1


class TestMuThresholds:
    def test_lemma_value(self):
        # theta = 1/2, d = 3 sqrt2/4, alpha = sqrt2/2 -> mu0 = 21 sqrt2/4 - 4
        mu0 = mu_threshold_exact(0.5, 3 * SQ2 / 4, SQ2 / 2)
        assert mu0 == pytest.approx(21 * SQ2 / 4 - 4.0, abs=1e-12)

    def test_lemma_boundary_zero(self):
        alpha = 0.8
        d = 1.7
        th = (1 - (alpha / 2) ** 2) * d
        assert mu_threshold_exact(th, d, alpha) == pytest.approx(0.0, abs=1e-12)

    def test_lemma_negative_when_cond2_holds(self):
        assert mu_threshold_exact(10.0, 0.5, 0.5) < 0

    def test_lemma_requires_cond1(self):
        with pytest.raises(InvalidInput):
            mu_threshold_exact(0.0, 1.0, 0.5)

    def test_prop_values(self):
        assert mu_threshold_oblivious(3 * SQ2 / 4, SQ2 / 2) == pytest.approx(
            21 * SQ2 / 4, abs=1e-10)
        assert mu_threshold_oblivious(1.0, 1 / SQ2) == pytest.approx(7.0, abs=1e-10)
        assert mu_threshold_oblivious(1.0, 1.0) == pytest.approx(3.0, abs=1e-12)

    def test_prop_dominates_lemma(self, rng):
        # whenever cond1 holds, the oblivious threshold exceeds the exact one
        for _ in range(50):
            th = rng.uniform(1e-3, 2.0)
            d = rng.uniform(th, 4.0)
            alpha = rng.uniform(0.05, 1.0)
            assert mu_threshold_oblivious(d, alpha) >= mu_threshold_exact(th, d, alpha) - 1e-12


class TestSolveLp:
    def test_wedge_explicit_mu(self, cone2d):
        rep = solve_lp_spp(cone2d, XSTAR2, [-1.0, -0.5], mu=10.0)
        np.testing.assert_allclose(rep.u, [-1.0, -10.5], atol=1e-15)
        np.testing.assert_allclose(rep.solution, [0.0, 0.0], atol=1e-8)
        assert rep.value == pytest.approx(0.0, abs=1e-12)
        assert rep.certificate_passed
        assert rep.kkt_certificate <= 1e-9

    def test_orthant_explicit_mu(self, orthant3):
        rep = solve_lp_spp(orthant3, XSTAR3, [1.0, -1.0, 0.0], mu=7 * SQ2)
        np.testing.assert_allclose(rep.u, [1.0, -8.0, -7.0], atol=1e-12)
        np.testing.assert_allclose(rep.solution, [1.0, 0.0, 0.0], atol=1e-8)
        assert rep.value == pytest.approx(0.0, abs=1e-12)

    def test_cond1_violation_raises(self, cone2d):
        with pytest.raises(InvalidInput):
            solve_lp_spp(cone2d, XSTAR2, [0.0, 1.0], mu=10.0)

    def test_auto_mu_uses_threshold(self, cone2d):
        rep = solve_lp_spp(cone2d, XSTAR2, [-1.0, -0.5], mu="auto")
        assert rep.mu_used > rep.mu_threshold
        assert rep.mu_used == pytest.approx(rep.mu_threshold * (1 + 1e-6), rel=1e-12)
        np.testing.assert_allclose(rep.solution, [0.0, 0.0], atol=1e-8)

    def test_random_doubling_matches_oracle(self, rng):
        for _ in range(60):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(n + 1, 9))
            P, x_star = random_bounded_lp(rng, n, m)
            rep = solve_lp_spp(P, x_star, "auto")
            oracle = lp_solve_enumeration(P, x_star)
            assert rep.certificate_passed
            assert abs(rep.value - oracle.value) <= 1e-7

    def test_unbounded_rejected(self, cone2d):
        with pytest.raises(UnboundedProblem):
            solve_lp_spp(cone2d, np.array([0.0, -1.0]), "auto")


class TestTheorem43Soundness:
    def test_conditions_imply_optimality(self, rng):
        # whenever both conditions hold with the safe lower-bound alpha,
        # the *unshifted* projection already solves
        hits = 0
        for _ in range(150):
            n = int(rng.integers(1, 4))
            m = int(rng.integers(n + 1, 8))
            P, x_star = random_bounded_lp(rng, n, m)
            alpha = sharpness_lower_bound(P, -x_star).alpha_lower
            x_hat = feasible_point(P.A, P.b)
            v = x_hat - rng.uniform(0.5, 30.0) * x_star \
                + rng.uniform(0.0, 2.0) * rng.standard_normal(n)
            try:
                c1, c2, _ = check_conditions(P, x_star, v, alpha)
            except UnboundedProblem:
                continue
            if not (c1 and c2):
                continue
            hits += 1
            proj = project_polyhedron(P, v).proj
            oracle = lp_solve_enumeration(P, x_star)
            assert abs(float(x_star @ proj) - oracle.value) <= 1e-7
        assert hits >= 30


class TestLemma44:
    def test_translation_activates_cond2(self, rng):
        # for cond1-only points, any mu above the exact threshold flips
        # condition 2 on
        done = 0
        trials = 0
        while done < 40 and trials < 400:
            trials += 1
            n = int(rng.integers(1, 4))
            m = int(rng.integers(n + 1, 8))
            P, x_star = random_bounded_lp(rng, n, m)
            alpha = sharpness_lower_bound(P, -x_star).alpha_lower
            x_hat = feasible_point(P.A, P.b)
            lateral = rng.standard_normal(n)
            lateral -= (lateral @ x_star) * x_star
            v = x_hat - (abs(theta(P, x_star, x_hat)) + 0.1) * x_star + 3.0 * lateral
            c1, c2, d = check_conditions(P, x_star, v, alpha)
            if not c1 or c2:
                continue
            th = theta(P, x_star, v)
            mu0 = mu_threshold_exact(th, d, alpha)
            assert mu0 >= 0
            for mu in (mu0 * 1.01 + 1e-9, mu0 + 1.0, 10 * mu0 + 10.0):
                u = v - mu * x_star
                uc1, uc2, _ = check_conditions(P, x_star, u, alpha)
                assert uc1 and uc2
            assert mu_threshold_oblivious(d, alpha) >= mu0 - 1e-12
            done += 1
        assert done >= 40


class TestConstructInfeasibleV:
    def test_oracle_mode_wedge(self, cone2d):
        v = construct_infeasible_v(cone2d, XSTAR2, mode="oracle")
        np.testing.assert_allclose(v, [0.0, -1.0], atol=1e-12)
        assert theta(cone2d, XSTAR2, v) == pytest.approx(1.0, abs=1e-12)

    def test_doubling_mode_wedge(self, cone2d):
        v = construct_infeasible_v(cone2d, XSTAR2, mode="doubling")
        rep = solve_lp_spp(cone2d, XSTAR2, v, mu="auto")
        assert rep.certificate_passed
        np.testing.assert_allclose(rep.solution, [0.0, 0.0], atol=1e-8)

    def test_theta_shift_identity(self, cone2d, rng):
        # theta(x - tau x*) = theta(x) + tau
        x_hat = np.array([0.3, 2.0])
        base = theta(cone2d, XSTAR2, x_hat)
        for tau in (1.0, 2.0, 16.0):
            assert theta(cone2d, XSTAR2, x_hat - tau * XSTAR2) == pytest.approx(
                base + tau, abs=1e-12)

    def test_unknown_mode(self, cone2d):
        with pytest.raises(InvalidInput):
            construct_infeasible_v(cone2d, XSTAR2, mode="guess")


class TestSolveCp:
    def test_abs_on_interval(self):
        P = Polyhedron([[1.0], [-1.0]], [1.0, 1.0])
        f = MaxAffine.from_pieces([([1.0], 0.0), ([-1.0], 0.0)])
        rep = solve_cp_spp(P, f)
        np.testing.assert_allclose(rep.w, [0.0], atol=1e-8)
        assert rep.fw == pytest.approx(0.0, abs=1e-8)
        assert rep.oracle_value == pytest.approx(0.0, abs=1e-12)

    def test_wedge_capped_box(self, cone2d):
        # f(x) = max(x1 + x2, -x1) over the wedge intersected with a box
        A = np.vstack([cone2d.A, np.eye(2), -np.eye(2)])
        b = np.concatenate([cone2d.b, 2 * np.ones(4)])
        P = Polyhedron(A, b)
        f = MaxAffine.from_pieces([([1.0, 1.0], 0.0), ([-1.0, 0.0], 0.0)])
        rep = solve_cp_spp(P, f)
        e3 = np.zeros(3)
        e3[2] = 1.0
        oracle = lp_solve_enumeration(rep.lifted_poly, e3)
        assert abs(rep.fw - oracle.value) <= 1e-7

    def test_random_instances_match_oracle(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 4))
            P = random_polytope(rng, n, n + 3)
            f = random_max_affine(rng, n, int(rng.integers(1, 4)))
            rep = solve_cp_spp(P, f)
            assert rep.oracle_value is not None
            assert abs(rep.fw - rep.oracle_value) <= 1e-7
            assert P.contains(rep.w, tol=1e-8)

    def test_explicit_point(self):
        P = Polyhedron([[1.0], [-1.0]], [1.0, 1.0])
        f = MaxAffine.from_pieces([([1.0], 0.0), ([-1.0], 0.0)])
        rep = solve_cp_spp(P, f, t=-50.0, v=[0.3])
        np.testing.assert_allclose(rep.w, [0.0], atol=1e-8)

    def test_explicit_v_auto_t(self):
        P = Polyhedron([[1.0], [-1.0]], [1.0, 1.0])
        f = MaxAffine.from_pieces([([1.0], 0.0), ([-1.0], 0.0)])
        rep = solve_cp_spp(P, f, v=[0.7])
        np.testing.assert_allclose(rep.w, [0.0], atol=1e-8)
        # the accepted lifted point sits below the graph
        assert rep.point[1] < rep.fw

    def test_auto_v_explicit_t_rejected(self):
        P = Polyhedron([[1.0], [-1.0]], [1.0, 1.0])
        f = MaxAffine.from_pieces([([1.0], 0.0)])
        with pytest.raises(InvalidInput):
            solve_cp_spp(P, f, t=-1.0, v="auto")


class TestVerifyDirectCertificate:
    def test_shifted_abs_instance(self):
        # f(x) = |x| - 1 over A = [1, 2]: min_A f = 0 at x = 1;
        # v = 0.5 has f(v) = -0.5 < 0 and the projection P_A(v) = 1 solves
        P = Polyhedron([[-1.0], [1.0]], [-1.0, 2.0])
        f = MaxAffine.from_pieces([([1.0], -1.0), ([-1.0], -1.0)])
        out = verify_direct_certificate(P, f, [0.5], alpha=0.9)
        assert out == {"cond_i": True, "cond_a": True, "cond_b": True}
        proj = project_polyhedron(P, [0.5]).proj
        np.testing.assert_allclose(proj, [1.0], atol=1e-12)
        lifted_min = solve_cp_spp(P, f).fw
        assert f(proj) == pytest.approx(lifted_min, abs=1e-9)

    def test_feasible_v_fails_cond_a(self):
        P = Polyhedron([[-1.0], [1.0]], [-1.0, 2.0])
        f = MaxAffine.from_pieces([([1.0], -1.0), ([-1.0], -1.0)])
        out = verify_direct_certificate(P, f, [1.5], alpha=0.9)
        assert not out["cond_a"]

    def test_all_true_implies_projection_solves(self, rng):
        confirmed = 0
        trials = 0
        while confirmed < 25 and trials < 400:
            trials += 1
            n = int(rng.integers(1, 3))
            P = random_polytope(rng, n, n + 2)
            f = random_max_affine(rng, n, int(rng.integers(1, 4)))
            rep = solve_cp_spp(P, f)
            M = rep.oracle_value
            # build v below the minimum near the solution
            g = f.subdifferential_points(rep.w, tol=1e-8)[0]
            if np.linalg.norm(g) < 1e-9:
                continue
            v = rep.w + rng.uniform(0.1, 0.5) * (-g / np.linalg.norm(g))
            if P.contains(v, tol=1e-9) or f(v) >= M:
                continue
            out = verify_direct_certificate(P, f, v, alpha=0.2)
            if not all(out.values()):
                continue
            proj = project_polyhedron(P, v).proj
            assert f(proj) <= M + 1e-7
            confirmed += 1
        assert confirmed >= 25


class TestReflectionSymmetry:
    def test_negated_instance_reflects_solution(self, rng):
        # under the isometry x -> -x the problem maps to (-P, -x*): values
        # agree and the reflected solution is optimal for the original
        for _ in range(20):
            P, x_star = random_bounded_lp(rng, 3, 6)
            reflected = Polyhedron(-P.A, P.b)
            rep = solve_lp_spp(P, x_star, "auto")
            rep_r = solve_lp_spp(reflected, -x_star, "auto")
            assert abs(rep.value - rep_r.value) <= 1e-7
            assert P.contains(-rep_r.solution, tol=1e-7)
            assert abs(float(x_star @ -rep_r.solution) - rep.value) <= 1e-7


class TestCertificateCompleteness:
    def test_certificate_iff_oracle_optimal(self, rng):
        # passing KKT certificate <=> oracle value match, over random
        # candidate points (optimal and deliberately suboptimal ones)
        from sharpproj.kernels import distance_to_cone
        from sharpproj.polyhedron import normal_cone_at

        for _ in range(40):
            P, x_star = random_bounded_lp(rng, 3, 6)
            oracle = lp_solve_enumeration(P, x_star)
            candidates = [oracle.x_opt]
            pts = [feasible_point(P.A, P.b)]
            candidates.extend(pts)
            for x in candidates:
                cert, _ = distance_to_cone(-x_star, normal_cone_at(P, x))
                optimal = abs(float(x_star @ x) - oracle.value) <= 1e-7
                assert (cert <= 1e-9) == optimal
