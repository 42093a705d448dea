"""The single-projection procedure.

A linear program ``min <x*, x>`` over a sharp set can be solved by one
projection: shift any point that is infeasible *in value* (condition 1)
far enough along ``-x*`` that the shifted point's distance to the set is
dominated by its optimality gap (condition 2), then project.  The shift
threshold is expressed through the sharpness constant; every solve is
certified a posteriori by the normal-cone distance of ``-x*`` at the
returned point, so the pipeline never has to trust the theory blindly.

Piecewise-linear convex objectives reduce to the linear case on the
lifted epigraph.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    CertificateError,
    InfeasibleProblem,
    InvalidInput,
    UnboundedProblem,
)
from .kernels import as_vector, distance_to_cone, require_unit
from .polyhedron import (
    LP_MAX_DIM,
    LP_MAX_ROWS,
    Polyhedron,
    _active_set_lattice,
    _feasible_basic_points,
    feasible_point,
    lp_solve_enumeration,
    normal_cone_at,
)
from .projection import DEFAULT_KKT_TOL, lift_epigraph, project_polyhedron
from .pwl import MaxAffine
from .sharpness import sharpness_lower_bound

DEFAULT_CERT_TOL = 1e-9
MAX_DOUBLINGS = 60


@dataclass(frozen=True, eq=False)
class SppReport:
    """Full provenance of one single-projection solve."""

    x_star: np.ndarray
    v: np.ndarray
    theta_v: float
    d_vA: float
    alpha_used: float
    mu_threshold: float
    mu_used: float
    u: np.ndarray
    solution: np.ndarray
    value: float
    kkt_certificate: float
    cond1: bool
    cond2: bool
    doublings: int = 0
    certificate_passed: bool = False

    @property
    def conditions(self) -> dict:
        return {"cond1": self.cond1, "cond2": self.cond2}


@dataclass(frozen=True, eq=False)
class CpReport:
    """Lifted-epigraph solve of ``min f`` over a polyhedron."""

    lifted_poly: Polyhedron
    point: tuple[np.ndarray, float]
    oracle_value: float | None
    w: np.ndarray
    fw: float
    lp_report: SppReport


def theta(P: Polyhedron, x_star, v) -> float:
    """Optimality gap ``inf_{x in A} <x*, x - v>`` of the point ``v``."""
    x_star = require_unit(x_star, P.dim)
    v = as_vector(v, P.dim)
    res = lp_solve_enumeration(P, x_star)
    if res.status == "unbounded":
        raise UnboundedProblem("objective unbounded below: no minimizer to project to")
    if res.status == "infeasible":
        raise InfeasibleProblem("constraint set is empty")
    return float(res.value - np.dot(x_star, v))


def check_conditions(P: Polyhedron, x_star, v, alpha: float,
                     kkt_tol: float = DEFAULT_KKT_TOL) -> tuple[bool, bool, float]:
    """Evaluate the two shift conditions for a candidate point.

    cond1: ``<x*, v>`` lies strictly below the optimal value.
    cond2: ``(1 - (alpha/2)^2) d(v, A)`` is less than the gap ``theta(v)``.
    """
    if not 0.0 < alpha <= 1.0:
        raise InvalidInput(f"alpha must be in (0, 1], got {alpha}")
    th = theta(P, x_star, v)
    d_vA = project_polyhedron(P, v, kkt_tol=kkt_tol).distance
    cond1 = th > 0.0
    cond2 = (1.0 - (alpha / 2.0) ** 2) * d_vA < th
    return cond1, cond2, d_vA


def mu_threshold_exact(theta_v: float, d_vA: float, alpha: float) -> float:
    """Exact shift threshold ``mu_0`` computed from the optimality gap.

    Any ``mu > mu_0`` makes ``v - mu x*`` satisfy both conditions.  Needs
    condition 1 (``theta_v > 0``); the value is negative when condition 2
    already holds.
    """
    if theta_v <= 0.0:
        raise InvalidInput("translation threshold needs theta(v) > 0 (condition 1)")
    if not 0.0 < alpha <= 1.0:
        raise InvalidInput(f"alpha must be in (0, 1], got {alpha}")
    half_sq = (alpha / 2.0) ** 2
    return ((1.0 - half_sq) * d_vA - theta_v) / half_sq


def mu_threshold_oblivious(d_vA: float, alpha: float) -> float:
    """Oblivious shift threshold ``(4 - alpha^2)/alpha^2 * d(v, A)``.

    Dominates ``mu_threshold_exact`` whenever condition 1 holds, without
    needing the optimality gap.
    """
    if not 0.0 < alpha <= 1.0:
        raise InvalidInput(f"alpha must be in (0, 1], got {alpha}")
    if d_vA < 0.0:
        raise InvalidInput("distance must be nonnegative")
    return (4.0 - alpha * alpha) / (alpha * alpha) * d_vA


def _resolve_alpha(P: Polyhedron, x_star, alpha) -> float:
    if alpha == "auto" or alpha is None:
        return sharpness_lower_bound(P, -x_star).alpha_lower
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise InvalidInput(f"alpha must be in (0, 1], got {alpha}")
    return alpha


def solve_lp_spp(P: Polyhedron, x_star, v, mu="auto", alpha="auto",
                 cert_tol: float = DEFAULT_CERT_TOL, strict: bool = True,
                 cross_check: bool = True,
                 max_doublings: int = MAX_DOUBLINGS) -> SppReport:
    """Solve ``min <x*, x>`` over ``P`` by one certified projection.

    Pipeline: resolve the sharpness constant (safe lower bound with
    respect to ``-x*`` when ``auto``), require condition 1 of ``v``,
    resolve the shift ``mu`` (the oblivious threshold with a relative
    nudge when ``auto``), project ``u = v - mu x*`` and certify via the
    normal-cone distance of ``-x*`` at the result.  With ``strict`` a
    failed certificate raises; otherwise it is reported.  ``v`` may be
    ``"auto"`` to construct a certified point by doubling.
    """
    x_star = require_unit(x_star, P.dim)
    if isinstance(v, str) and v == "auto":
        report, _ = _doubling_solve(P, x_star, alpha=alpha, cert_tol=cert_tol,
                                    max_doublings=max_doublings)
        if strict and not report.certificate_passed:
            raise CertificateError("doubling exhausted without a certified solution")
        return report
    v = as_vector(v, P.dim)
    a = _resolve_alpha(P, x_star, alpha)
    th = theta(P, x_star, v)
    d_vA = project_polyhedron(P, v, kkt_tol=cert_tol).distance
    cond1 = th > 0.0
    cond2 = (1.0 - (a / 2.0) ** 2) * d_vA < th
    if not cond1:
        raise InvalidInput(
            f"condition 1 fails: <x*, v> = {float(np.dot(x_star, v)):.6g} is not below "
            f"the optimal value (theta = {th:.3e})")
    threshold = mu_threshold_oblivious(d_vA, a)
    mu_used = threshold * (1.0 + 1e-6) if (isinstance(mu, str) and mu == "auto") \
        else float(mu)
    if mu_used < 0.0:
        raise InvalidInput("mu must be nonnegative")
    u = v - mu_used * x_star
    proj = project_polyhedron(P, u, kkt_tol=cert_tol)
    solution = _polish_far_projection(P, v, x_star, mu_used, proj)
    value = float(np.dot(x_star, solution))
    cert, _ = distance_to_cone(-x_star, normal_cone_at(P, solution))
    passed = cert <= cert_tol
    if passed and cross_check and P.m <= LP_MAX_ROWS and P.dim <= LP_MAX_DIM:
        oracle = lp_solve_enumeration(P, x_star)
        if oracle.status == "optimal" and abs(oracle.value - value) > 1e-7:
            passed = False
    report = SppReport(x_star=x_star, v=v, theta_v=th, d_vA=d_vA, alpha_used=a,
                       mu_threshold=threshold, mu_used=mu_used, u=u,
                       solution=solution, value=value, kkt_certificate=float(cert),
                       cond1=cond1, cond2=cond2, doublings=0,
                       certificate_passed=passed)
    if strict and not passed:
        raise CertificateError(
            f"optimality certificate failed: normal-cone distance {cert:.3e} "
            f"> {cert_tol:.1e}")
    return report


def _polish_far_projection(P: Polyhedron, v, x_star, mu: float, proj) -> np.ndarray:
    """Recover full precision for far-shifted projections.

    ``P(v - mu x*)`` computed directly carries absolute error ~ mu * eps.
    Once the shift is past its threshold the projection lands on a face on
    which the objective is constant, so the shift component is orthogonal
    to the face and the same point equals the *affine* projection of ``v``
    onto that face, computable at unit scale.  The candidate is accepted
    only when it is feasible, consistent with the raw solve, and certified.
    """
    raw = proj.proj
    if mu <= 1e3 or not proj.active.indices:
        return raw
    rows = list(proj.active.indices)
    Aw = P.A[rows]
    gram = Aw @ Aw.T
    lam_v = np.linalg.lstsq(gram, Aw @ v - P.b[rows], rcond=None)[0]
    cand = v - Aw.T @ lam_v
    err_budget = 1e-6 + mu * 1e-10
    if np.linalg.norm(cand - raw) > err_budget:
        return raw
    if not P.contains(cand, tol=1e-8):
        return raw
    return cand


def _doubling_solve(P: Polyhedron, x_star, alpha="auto",
                    cert_tol: float = DEFAULT_CERT_TOL,
                    max_doublings: int = MAX_DOUBLINGS,
                    start=None) -> tuple[SppReport, np.ndarray]:
    """Escalate ``v_k = x_hat - 2^k x*`` until a solve certifies.

    The gap grows as ``theta(v_k) = theta(x_hat) + 2^k``, so condition 1
    holds after finitely many doublings; each accepted step is validated
    by its own KKT certificate, not by oracle knowledge.
    """
    x_star = require_unit(x_star, P.dim)
    # reject unbounded problems up front rather than doubling forever
    oracle = lp_solve_enumeration(P, x_star)
    if oracle.status == "unbounded":
        raise UnboundedProblem("objective unbounded below: no minimizer to project to")
    if oracle.status == "infeasible":
        raise InfeasibleProblem("constraint set is empty")
    if start is None:
        start = feasible_point(P.A, P.b)
        if start is None:
            raise InfeasibleProblem("constraint set is empty")
    resolved_alpha = _resolve_alpha(P, x_star, alpha)
    best = None
    for k in range(max_doublings + 1):
        v = start - (2.0 ** k) * x_star
        if oracle.value - float(np.dot(x_star, v)) <= 0.0:
            continue  # condition 1 not yet reached
        report = solve_lp_spp(P, x_star, v, mu="auto", alpha=resolved_alpha,
                              cert_tol=cert_tol, strict=False)
        report = replace(report, doublings=k)
        best = report
        if report.certificate_passed:
            return report, v
    if best is None:
        raise CertificateError(
            f"no doubling step up to 2^{max_doublings} satisfied condition 1")
    return best, best.v


def construct_infeasible_v(P: Polyhedron, x_star, mode: str = "doubling",
                           cert_tol: float = DEFAULT_CERT_TOL,
                           max_doublings: int = MAX_DOUBLINGS) -> np.ndarray:
    """Produce a point satisfying condition 1.

    ``oracle`` mode peeks at the enumeration optimum (test-only path);
    ``doubling`` escalates shifts from a feasible point, accepting the
    first shift whose single-projection solve certifies.
    """
    x_star = require_unit(x_star, P.dim)
    if mode == "oracle":
        res = lp_solve_enumeration(P, x_star)
        if res.status == "unbounded":
            raise UnboundedProblem("objective unbounded below")
        if res.status == "infeasible":
            raise InfeasibleProblem("constraint set is empty")
        x_opt = res.x_opt
        return x_opt - x_star * (1.0 + float(np.linalg.norm(x_opt)))
    if mode == "doubling":
        report, v = _doubling_solve(P, x_star, cert_tol=cert_tol,
                                    max_doublings=max_doublings)
        if not report.certificate_passed:
            raise CertificateError(
                f"doubling cap 2^{max_doublings} exhausted; best candidate had "
                f"certificate {report.kkt_certificate:.3e}")
        return v
    raise InvalidInput(f"unknown mode {mode!r}")


def solve_cp_spp(P: Polyhedron, f: MaxAffine, t="auto", v="auto",
                 cert_tol: float = DEFAULT_CERT_TOL,
                 cross_check: bool = True) -> CpReport:
    """Minimize a max-affine ``f`` over ``P`` by one projection on the lift.

    The epigraph lift turns the problem into a vertical LP; the solve runs
    in dimension ``n + 1`` with direction ``(0, ..., 0, 1)``.  The
    projection lands on the graph, so the solution is ``(w, f(w))``.
    """
    lifted = lift_epigraph(P, f)
    n = P.dim
    e_last = np.zeros(n + 1)
    e_last[n] = 1.0

    auto_v = isinstance(v, str) and v == "auto"
    auto_t = isinstance(t, str) and t == "auto"
    if auto_v and not auto_t:
        raise InvalidInput("explicit t requires an explicit v")

    if auto_v:
        report, _ = _doubling_solve(lifted.poly, e_last, cert_tol=cert_tol)
    elif auto_t:
        v_arr = as_vector(v, n)
        start = np.concatenate([v_arr, [f(v_arr)]])
        report, _ = _doubling_solve(lifted.poly, e_last, cert_tol=cert_tol,
                                    start=start)
    else:
        v_arr = as_vector(v, n)
        point = np.concatenate([v_arr, [float(t)]])
        report = solve_lp_spp(lifted.poly, e_last, point, mu="auto",
                              cert_tol=cert_tol)
    if not report.certificate_passed:
        raise CertificateError("lifted solve failed its optimality certificate")

    w = report.solution[:n]
    s = float(report.solution[n])
    fw = f(w)
    if abs(s - fw) > 1e-8:
        raise CertificateError(
            f"projection did not land on the graph: |s - f(w)| = {abs(s - fw):.3e}")
    oracle_value = None
    if cross_check and lifted.poly.m <= LP_MAX_ROWS and lifted.poly.dim <= LP_MAX_DIM:
        oracle = lp_solve_enumeration(lifted.poly, e_last)
        if oracle.status == "optimal":
            oracle_value = float(oracle.value)
            if abs(oracle_value - fw) > 1e-7:
                raise CertificateError(
                    f"value mismatch against the lifted oracle: {fw} vs {oracle_value}")
    return CpReport(lifted_poly=lifted.poly, point=(report.v[:n], float(report.v[n])),
                    oracle_value=oracle_value, w=w, fw=fw, lp_report=report)


def _solution_set_polyhedron(P: Polyhedron, f: MaxAffine, M: float) -> Polyhedron:
    """``{x in P : f(x) <= M}`` with constant pieces dropped."""
    keep = np.linalg.norm(f.grads, axis=1) > 1e-14
    rows = [P.A]
    rhs = [P.b]
    if np.any(keep):
        rows.append(f.grads[keep])
        rhs.append(M - f.offsets[keep])
    return Polyhedron(np.vstack(rows), np.concatenate(rhs))


def verify_direct_certificate(P: Polyhedron, f: MaxAffine, v, alpha: float,
                          tol: float = 1e-7) -> dict:
    """Check the three hypotheses under which projecting ``v`` onto ``P``
    solves ``min f`` directly (no lift, no shift).

    * ``cond_i``: every unit subgradient direction at the solution set
      keeps its negation at distance ``>= alpha`` from the normal cones of
      all non-solution faces (faces classified through relative-interior
      witnesses; subgradients sampled at the hull vertices, i.e. the
      active piece gradients at solution vertices).
    * ``cond_a``: ``f(v)`` lies strictly below the constrained minimum.
    * ``cond_b``: ``(1 - (alpha/2)^2) d(v, P)`` is less than the gap.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha must be in (0, 1), got {alpha}")
    v = as_vector(v, P.dim)
    lifted = lift_epigraph(P, f)
    e_last = np.zeros(P.dim + 1)
    e_last[P.dim] = 1.0
    oracle = lp_solve_enumeration(lifted.poly, e_last)
    if oracle.status != "optimal":
        raise InvalidInput("constrained minimum of f is not attained")
    M = float(oracle.value)

    sol_poly = _solution_set_polyhedron(P, f, M)
    sol_vertices = _feasible_basic_points(sol_poly.A, sol_poly.b)
    if sol_vertices.shape[0] == 0:
        sol_vertices = oracle.x_opt[None, :P.dim]

    # candidate subgradient directions: active piece gradients at solution vertices
    candidates = []
    for y in sol_vertices:
        for g in f.subdifferential_points(y, tol=1e-8):
            nrm = float(np.linalg.norm(g))
            if nrm > 1e-12:
                candidates.append(g / nrm)
    # a zero subgradient at a solution makes the infimum vacuous-by-zero
    has_zero = any(
        float(np.linalg.norm(g)) <= 1e-12
        for y in sol_vertices for g in f.subdifferential_points(y, tol=1e-8))

    lattice = _active_set_lattice(P)
    cond_i = not has_zero
    if cond_i:
        for J, (margin, witness) in lattice.items():
            if margin <= 1e-7 or witness is None:
                continue
            if f(witness) <= M + tol:
                continue  # face lies in the solution set
            cone = normal_cone_at(P, witness)
            for xs in candidates:
                dist, _ = distance_to_cone(-xs, cone)
                if dist < alpha - 1e-12:
                    cond_i = False
                    break
            if not cond_i:
                break

    fv = f(v)
    cond_a = fv < M
    d_vP = project_polyhedron(P, v).distance
    cond_b = (1.0 - (alpha / 2.0) ** 2) * d_vP < M - fv
    return {"cond_i": bool(cond_i), "cond_a": bool(cond_a), "cond_b": bool(cond_b)}
