"""Sharpness moduli and their KL-constant counterparts.

A polyhedron is sharp with respect to every unit direction; the constants
computed here quantify how sharp:

* ``sharpness_lower_bound`` -- the safe lower bound obtained by minimizing
  the cone distance over *all* row subsets that do not contain the
  direction (2^m enumeration).
* ``sharpness_exact`` -- the exact modulus, restricting the minimization
  to active sets that are actually realized by feasible points (the
  normal cone is constant on the relative interior of each face).
* ``sharpness_dual_estimate`` -- a sampled upper estimate built from
  directions whose maximizing faces are disjoint from the query face
  (valid on bounded sets only).

The KL conversions translate between set sharpness and subgradient norm
bounds for piecewise-linear objectives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import maybe_jit
from .errors import CapsExceeded, ConvergenceError, InvalidInput, UnboundedProblem
from .kernels import (
    NNLS_ITER_FACTOR,
    Cone,
    _nnls,
    distance_to_cone,
    distance_to_convex_hull,
    distance_to_ray,
    require_unit,
)
from .polyhedron import (
    ACTIVE_SET_MAX_ROWS,
    Polyhedron,
    _active_set_lattice,
    face_of,
    linear_system_margin,
    lp_solve_enumeration,
)
from .pwl import MaxAffine
from .sampling import sphere_samples

MEMBERSHIP_TOL = 1e-9
STRICT_FACE_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class SharpnessReport:
    direction: np.ndarray
    alpha_lower: float
    alpha_exact: float | None = None
    subsets_examined: int = 0
    vacuous: bool = False
    dual_estimate: float | None = None
    samples: int = 0


# --------------------------------------------------------------------------
# Subset enumeration driver (hot loop: one NNLS per subset).
# --------------------------------------------------------------------------


def _subset_min_distance_py(G, x, membership_tol, rel_tol, iter_factor):
    """Min cone distance over all 2^m row subsets excluding memberships.

    Returns (min distance over subsets with distance > membership_tol,
    number of qualifying subsets, number of failed NNLS solves).  The
    empty subset is the trivial cone.
    """
    m, n = G.shape
    best = np.linalg.norm(x)  # empty subset: cone {0}
    qualifying = 1
    failed = 0
    sub = np.empty((n, m))
    for mask in range(1, 2 ** m):
        k = 0
        for i in range(m):
            if (mask >> i) & 1:
                for c in range(n):
                    sub[c, k] = G[i, c]
                k += 1
        t, dist, status = _nnls(np.ascontiguousarray(sub[:, :k]), x,
                                rel_tol, iter_factor * k)
        if status != 0:
            failed += 1
            continue
        if dist > membership_tol:
            qualifying += 1
            if dist < best:
                best = dist
    return best, qualifying, failed


_subset_min_distance = maybe_jit(_subset_min_distance_py)


def sharpness_lower_bound(P: Polyhedron, x_star) -> SharpnessReport:
    """Safe sharpness lower bound from the full subset enumeration.

    Minimizes ``d(x*, cone[rows J])`` over every index subset ``J`` whose
    cone does not contain ``x*`` (membership decided at
    ``MEMBERSHIP_TOL``), capped at 1.
    """
    x_star = require_unit(x_star, P.dim)
    if P.m > ACTIVE_SET_MAX_ROWS:
        raise CapsExceeded(f"2^m enumeration capped at m <= {ACTIVE_SET_MAX_ROWS}")
    best, qualifying, failed = _subset_min_distance(
        np.ascontiguousarray(P.A), x_star, MEMBERSHIP_TOL, 1e-12,
        NNLS_ITER_FACTOR)
    if failed > 0:
        # a skipped subset could hide the true minimum; the lower-bound
        # contract does not allow that
        raise ConvergenceError(
            f"{failed} subset NNLS solves did not converge; rows are too "
            "ill-conditioned for a certified lower bound")
    vacuous = qualifying == 0
    alpha = 1.0 if vacuous else min(1.0, float(best))
    return SharpnessReport(direction=x_star, alpha_lower=alpha,
                           subsets_examined=2 ** P.m, vacuous=vacuous)


def sharpness_exact(P: Polyhedron, x_star,
                    strict_tol: float = STRICT_FACE_TOL) -> SharpnessReport:
    """Exact sharpness modulus over realizable active sets.

    Minimizes the cone distance over active sets that some feasible point
    attains exactly, skipping cones containing ``x*``.  Equals the
    sharpness modulus for polyhedra; ``alpha_exact`` is ``inf`` (vacuous)
    when every realized normal cone contains ``x*``.
    """
    x_star = require_unit(x_star, P.dim)
    lower = sharpness_lower_bound(P, x_star)
    lattice = _active_set_lattice(P)
    exact_sets = [J for J, (margin, _) in lattice.items() if margin > strict_tol]
    best = math.inf
    for J in exact_sets:
        if J:
            dist, _ = distance_to_cone(x_star, Cone(P.A[sorted(J)]))
        else:
            dist = 1.0
        if dist > MEMBERSHIP_TOL and dist < best:
            best = dist
    vacuous = not math.isfinite(best)
    return SharpnessReport(direction=x_star, alpha_lower=lower.alpha_lower,
                           alpha_exact=best, subsets_examined=len(lattice),
                           vacuous=vacuous)


def _is_bounded(P: Polyhedron) -> bool:
    for i in range(P.dim):
        for sign in (1.0, -1.0):
            c = np.zeros(P.dim)
            c[i] = sign
            if lp_solve_enumeration(P, c).status == "unbounded":
                return False
    return True


def sharpness_dual_estimate(P: Polyhedron, x_star, num_samples: int = 128,
                            seed: int = 0) -> float:
    """Sampled dual upper estimate of the sharpness modulus (bounded sets).

    Draws quasi-uniform unit directions; whenever the maximizing face of a
    direction is disjoint from the query face, the distance from ``x*`` to
    the ray spanned by that direction bounds the modulus from above (the
    scale along the ray is optimized out since all scalings share one
    face).  Returns ``+inf`` when every sampled face intersects the query
    face.
    """
    x_star = require_unit(x_star, P.dim)
    if num_samples < 1:
        raise InvalidInput("num_samples must be >= 1")
    if not _is_bounded(P):
        raise UnboundedProblem("dual estimate requires a bounded polyhedron")
    fx = face_of(P, x_star)
    best = math.inf
    for y in sphere_samples(P.dim, num_samples, seed):
        fy = face_of(P, y)
        margin, _ = linear_system_margin(
            P.A, P.b,
            np.vstack([x_star, y]),
            np.array([fx.optimal_value, fy.optimal_value]))
        if margin >= -1e-9:
            continue  # faces intersect
        best = min(best, distance_to_ray(x_star, y))
    return best


# --------------------------------------------------------------------------
# KL-constant conversions.
# --------------------------------------------------------------------------


def kl_beta_from_alpha(alpha: float) -> float:
    """Subgradient-norm bound ``beta = alpha / sqrt(1 - alpha^2)`` matching
    epigraph sharpness ``alpha`` (requires ``0 < alpha < 1``)."""
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha must be in (0, 1), got {alpha}")
    return alpha / math.sqrt(1.0 - alpha * alpha)


def kl_alpha_from_beta(beta: float) -> float:
    """Inverse conversion ``alpha = beta / sqrt(1 + beta^2)`` (``beta > 0``)."""
    if beta <= 0.0:
        raise InvalidInput(f"beta must be positive, got {beta}")
    return beta / math.sqrt(1.0 + beta * beta)


def pwl_kl_constant(f: MaxAffine, strict_tol: float = STRICT_FACE_TOL) -> float | None:
    """Global subgradient-norm lower bound off the minimizer set of a
    max-affine function.

    Enumerates piece index sets realizable as exact arg-max patterns
    (margin LP per subset), keeps those whose gradient hull misses the
    origin, and returns the minimum hull distance.  ``None`` when every
    realizable pattern contains the origin in its hull (the function is
    minimized everywhere it is evaluated).
    """
    if f.piece_count > ACTIVE_SET_MAX_ROWS:
        raise CapsExceeded(f"piece enumeration capped at {ACTIVE_SET_MAX_ROWS}")
    rows = np.hstack([f.grads, -np.ones((f.piece_count, 1))])
    epi = Polyhedron(rows, -f.offsets)
    lattice = _active_set_lattice(epi)
    best = math.inf
    for J, (margin, _) in lattice.items():
        if not J or margin <= strict_tol:
            continue
        dist = distance_to_convex_hull(np.zeros(f.dim), f.grads[sorted(J)])
        if dist > MEMBERSHIP_TOL and dist < best:
            best = dist
    return None if not math.isfinite(best) else best


def indicator_linear_kl(P: Polyhedron, x_star) -> tuple[float, float | None]:
    """Sharpness constant of the indicator-minus-linear objective and the
    implied epigraph sharpness.

    The function ``f = 1_P - <x*, .>`` satisfies the global KL property
    with constant ``alpha`` equal to the exact sharpness modulus; when
    ``alpha < 1`` its epigraph is ``alpha/sqrt(1+alpha^2)``-sharp with
    respect to the downward vertical direction.
    """
    rep = sharpness_exact(P, x_star)
    alpha = rep.alpha_exact
    if alpha is None or not math.isfinite(alpha) or alpha >= 1.0 - 1e-12:
        return alpha, None
    return alpha, alpha / math.sqrt(1.0 + alpha * alpha)
