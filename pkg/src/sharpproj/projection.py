"""Production projectors: polyhedra and lifted epigraphs.

``project_polyhedron`` is a working-set least-squares iteration with exact
multiplier certificates; on the (degenerate) instances where it stalls it
falls back to the exhaustive :func:`sharpproj.polyhedron.project_brute`
when the oracle caps allow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import ConvergenceError, InvalidInput
from .kernels import as_vector, distance_to_cone
from .polyhedron import (
    DEFAULT_ACTIVE_TOL,
    LP_MAX_DIM,
    LP_MAX_ROWS,
    ActiveSet,
    Polyhedron,
    active_set,
    normal_cone_at,
    project_brute,
)
from .pwl import MaxAffine

DEFAULT_KKT_TOL = 1e-9


class SupportsProjection(Protocol):
    """Anything that can project a point onto itself; lets callers plug
    non-polyhedral sets (closed-form ball projectors and the like) into
    distance computations."""

    def project(self, z: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    proj: np.ndarray
    residual_normal: float
    active: ActiveSet
    iterations: int
    distance: float = 0.0  # ||input - proj||


@dataclass(frozen=True, eq=False)
class LiftedEpigraph:
    """Polyhedron over ``(x, s)`` encoding ``{x in P, f(x) <= s}``."""

    poly: Polyhedron
    base_rows: tuple[int, ...]
    piece_rows: tuple[int, ...]


def project_halfspace(z, normal, offset: float) -> np.ndarray:
    """Closed-form projection onto ``{x : <normal, x> <= offset}``."""
    z = as_vector(z)
    normal = as_vector(normal, z.size)
    nrm2 = float(np.dot(normal, normal))
    if nrm2 <= 0.0:
        raise InvalidInput("halfspace normal must be nonzero")
    gap = float(np.dot(normal, z)) - float(offset)
    if gap <= 0.0:
        return z.copy()
    return z - (gap / nrm2) * normal


def project_polyhedron(P: Polyhedron, z, kkt_tol: float = DEFAULT_KKT_TOL,
                       active_tol: float = DEFAULT_ACTIVE_TOL,
                       max_iter: int | None = None,
                       allow_fallback: bool = True) -> ProjectionResult:
    """Project ``z`` onto ``P`` with a certified multiplier residual.

    Working-set iteration: solve the equality-constrained least-squares
    problem on the current rows, drop rows with negative multipliers
    (smallest-index rule as a cycling guard), add the most violated row,
    stop when primal-feasible with multipliers ``>= -kkt_tol``.  The
    returned ``residual_normal`` re-certifies optimality through the
    normal-cone distance of the displacement.
    """
    z = as_vector(z, P.dim)
    if max_iter is None:
        max_iter = 30 * (P.m + P.dim) + 60
    # absolute accuracy is limited to ~ ||z|| * eps for far inputs
    scale = max(1.0, float(np.linalg.norm(z)))
    feas_tol = max(kkt_tol, 1e-12, 1e-13 * scale)
    drop_tol = max(kkt_tol, 1e-13 * scale)

    work: list[int] = []
    x = z.copy()
    iterations = 0
    converged = False
    while iterations < max_iter:
        iterations += 1
        if work:
            Aw = P.A[work]
            gram = Aw @ Aw.T
            rhs = Aw @ z - P.b[work]
            lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
            x = z - Aw.T @ lam
        else:
            lam = np.zeros(0)
            x = z.copy()
        neg = np.where(lam < -drop_tol)[0]
        if neg.size:
            drop = min(int(i) for i in neg)  # smallest position -> smallest row index
            work.pop(drop)
            continue
        resid = P.A @ x - P.b
        worst = float(np.max(resid))
        if worst > feas_tol:
            j = int(np.argmax(resid))
            if j in work:
                break  # stalled on an inconsistent working set
            work.append(j)
            work.sort()
            continue
        converged = True
        break

    if converged:
        result = _certified_result(P, z, x, iterations, kkt_tol, active_tol)
        if result is not None:
            return result

    if allow_fallback and P.m <= LP_MAX_ROWS and P.dim <= LP_MAX_DIM:
        brute = project_brute(P, z)
        result = _certified_result(P, z, brute.proj, iterations, kkt_tol, active_tol,
                                   force=True)
        return result
    raise ConvergenceError(
        f"projection working set cycled after {iterations} iterations "
        "(degenerate instance beyond oracle caps)")


def _certified_result(P, z, x, iterations, kkt_tol, active_tol, force=False):
    scale = max(1.0, float(np.linalg.norm(z)))
    act_tol = max(active_tol, 1e-13 * scale)
    dist = float(np.linalg.norm(z - x))
    if dist <= 1e-13 * scale:
        residual = 0.0
    else:
        residual, _ = distance_to_cone((z - x) / dist, normal_cone_at(P, x, act_tol))
    if residual > max(kkt_tol, 1e-12) and not force:
        return None
    act = active_set(P, x, act_tol)
    return ProjectionResult(proj=x, residual_normal=float(residual), active=act,
                            iterations=iterations, distance=dist)


def distance_to_set(z, target: SupportsProjection | Polyhedron,
                    kkt_tol: float = DEFAULT_KKT_TOL) -> float:
    """Distance from ``z`` to a polyhedron or any pluggable projector."""
    z = np.asarray(z, dtype=float)
    if isinstance(target, Polyhedron):
        return project_polyhedron(target, z, kkt_tol=kkt_tol).distance
    return float(np.linalg.norm(z - np.asarray(target.project(z), dtype=float)))


def lift_epigraph(P: Polyhedron, f: MaxAffine) -> LiftedEpigraph:
    """Polyhedron over ``(x, s)`` whose feasible set is
    ``{(x, s) : x in P, f(x) <= s}``.

    Base rows get a zero ``s``-coefficient; each affine piece contributes
    ``<a_i, x> - s <= -c_i``.
    """
    if f.dim != P.dim:
        raise InvalidInput(f"function dim {f.dim} != polyhedron dim {P.dim}")
    m, n = P.m, P.dim
    k = f.piece_count
    A = np.zeros((m + k, n + 1))
    A[:m, :n] = P.A
    A[m:, :n] = f.grads
    A[m:, n] = -1.0
    b = np.concatenate([P.b, -f.offsets])
    poly = Polyhedron(A, b)
    return LiftedEpigraph(poly=poly, base_rows=tuple(range(m)),
                          piece_rows=tuple(range(m, m + k)))


def project_epigraph(P: Polyhedron, f: MaxAffine, point,
                     kkt_tol: float = DEFAULT_KKT_TOL) -> ProjectionResult:
    """Project a lifted point ``(v, t)`` onto the lifted epigraph.

    When ``t`` lies below the constrained minimum of ``f`` the projection
    lands on the graph: the returned ``(w, s)`` satisfies ``s == f(w)`` up
    to tolerance.
    """
    lifted = lift_epigraph(P, f)
    z = as_vector(point, P.dim + 1)
    return project_polyhedron(lifted.poly, z, kkt_tol=kkt_tol)
