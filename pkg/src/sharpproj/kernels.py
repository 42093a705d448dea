"""Dense vector arithmetic, ray/cone distances and nonnegative least squares.

Everything downstream (normal cones, sharpness moduli, KKT certificates)
reduces to distances from a point to a finitely generated cone or to a
convex hull, and those reduce to small dense NNLS solves.  The NNLS
active-set loop is the hot kernel of the package: sharpness bounds call
it once per index subset (up to 2^m times per query), so it is compiled
with numba unless ``SHARPPROJ_BACKEND=numpy`` selects the fallback.

All comparisons assume inputs pre-scaled so that directions are unit
vectors; tolerances are absolute on that scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import maybe_jit
from .errors import ConvergenceError, DimensionMismatch, InvalidInput

UNIT_TOL = 1e-12
NNLS_REL_TOL = 1e-12
NNLS_ITER_FACTOR = 50


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate and convert to a finite 1-D float64 array."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInput(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInput("vector has NaN/Inf entries")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.size}")
    return v


def require_unit(x, dim: int | None = None) -> np.ndarray:
    """Validate a unit direction (norm within ``UNIT_TOL`` of 1)."""
    v = as_vector(x, dim)
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > UNIT_TOL:
        raise InvalidInput(f"direction must be a unit vector, got norm {nrm!r}")
    return v


def unit(x) -> np.ndarray:
    """Normalize a nonzero vector to unit length."""
    v = as_vector(x)
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        raise InvalidInput("cannot normalize the zero vector")
    return v / nrm


@dataclass(frozen=True)
class Cone:
    """Finitely generated convex cone, ``{G.T @ t : t >= 0}``.

    ``generators`` has one generator per row; an empty generator list
    represents the trivial cone ``{0}``.  Generators need not be
    normalized or independent.
    """

    generators: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        g = np.asarray(self.generators, dtype=np.float64)
        if g.ndim != 2:
            raise InvalidInput(f"generators must be a 2-D array, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise InvalidInput("generators have NaN/Inf entries")
        object.__setattr__(self, "generators", g)
        object.__setattr__(self, "dim", int(g.shape[1]))
        g.setflags(write=False)

    @classmethod
    def trivial(cls, dim: int) -> "Cone":
        return cls(np.zeros((0, dim)))

    @classmethod
    def from_rows(cls, rows) -> "Cone":
        return cls(np.atleast_2d(np.asarray(rows, dtype=np.float64)))

    def __len__(self) -> int:
        return self.generators.shape[0]


# --------------------------------------------------------------------------
# NNLS kernel (Lawson-Hanson active set).
#
# Written in numba-compatible style; `_nnls_py` is the plain-Python source
# and `_nnls` the (possibly) compiled dispatch target.  Status codes:
# 0 = converged, 1 = iteration cap hit.
# --------------------------------------------------------------------------


def _nnls_py(G, y, rel_tol, max_iter):
    k = G.shape[1]
    GT = np.ascontiguousarray(G.T)
    t = np.zeros(k)
    passive = np.zeros(k, dtype=np.bool_)
    # indices whose entry produced no progress are banned until the iterate
    # moves again (degenerate-column cycling guard)
    banned = np.zeros(k, dtype=np.bool_)
    resid = y.copy()
    scale = np.max(np.abs(GT @ resid))
    if scale < 1.0:
        scale = 1.0
    dual_tol = rel_tol * scale
    iters = 0
    status = 0
    while True:
        w = GT @ resid
        best = -1
        best_w = dual_tol
        for j in range(k):
            if (not passive[j]) and (not banned[j]) and w[j] > best_w:
                best_w = w[j]
                best = j
        if best < 0:
            break
        passive[best] = True
        progressed = False
        while True:
            iters += 1
            if iters > max_iter:
                status = 1
                break
            idx = np.where(passive)[0]
            sol = np.linalg.lstsq(np.ascontiguousarray(G[:, idx]), y)[0]
            if np.min(sol) > 0.0:
                t[:] = 0.0
                for a in range(idx.size):
                    t[idx[a]] = sol[a]
                progressed = True
                break
            # step back along the segment to the first variable hitting zero
            alpha = np.inf
            for a in range(idx.size):
                j = idx[a]
                if sol[a] <= 0.0:
                    denom = t[j] - sol[a]
                    if denom > 0.0:
                        step = t[j] / denom
                        if step < alpha:
                            alpha = step
            if not np.isfinite(alpha):
                alpha = 0.0
            if alpha > 0.0:
                progressed = True
            for a in range(idx.size):
                j = idx[a]
                # indices attaining the step hit zero exactly; rounding can
                # leave a positive residue, so force them out
                if sol[a] <= 0.0 and t[j] <= alpha * (t[j] - sol[a]) * (1.0 + 1e-10):
                    t[j] = 0.0
                    passive[j] = False
                    continue
                t[j] = t[j] + alpha * (sol[a] - t[j])
                if t[j] <= 0.0:
                    t[j] = 0.0
                    passive[j] = False
            # keep at least the entering index if everything collapsed
            if not np.any(passive):
                break
        resid = y - G @ t
        if status == 1:
            break
        if progressed:
            for j in range(k):
                banned[j] = False
        else:
            banned[best] = True
    rnorm = np.sqrt(np.sum(resid * resid))
    return t, rnorm, status


_nnls = maybe_jit(_nnls_py)


def nnls(G: np.ndarray, y: np.ndarray, rel_tol: float = NNLS_REL_TOL,
         max_iter: int | None = None) -> tuple[np.ndarray, float]:
    """Solve ``min_{t >= 0} ||y - G t||`` for a dense ``(n, k)`` matrix G.

    Returns the coefficient vector and the residual norm.  Raises
    :class:`ConvergenceError` at the iteration cap, which signals
    ill-conditioned generators.
    """
    G = np.ascontiguousarray(G, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if G.ndim != 2 or y.ndim != 1 or G.shape[0] != y.size:
        raise DimensionMismatch(f"incompatible NNLS shapes {G.shape} / {y.shape}")
    k = G.shape[1]
    if k == 0:
        return np.zeros(0), float(np.linalg.norm(y))
    if max_iter is None:
        max_iter = NNLS_ITER_FACTOR * k
    t, rnorm, status = _nnls(G, y, rel_tol, max_iter)
    if status != 0:
        raise ConvergenceError(
            f"NNLS did not converge within {max_iter} iterations "
            f"({k} generators); generators may be ill-conditioned")
    return t, float(rnorm)


def distance_to_ray(u, v) -> float:
    """Distance from the unit vector ``u`` to the ray spanned by unit ``v``.

    Equals ``sqrt(1 - max(0, <u, v>)^2)``; computed as the norm of the
    optimal residual ``u - max(0, <u, v>) v``, which avoids the
    cancellation of the closed form near membership.
    """
    u = require_unit(u)
    v = require_unit(v, dim=u.size)
    s = max(0.0, float(np.dot(u, v)))
    return float(np.linalg.norm(u - s * v))


def distance_to_cone(x, cone: Cone, tol: float = 1e-9) -> tuple[float, np.ndarray]:
    """Distance from ``x`` to a finitely generated cone, with coefficients.

    Solves ``min_{t >= 0} ||x - G t||`` by NNLS.  The trivial cone gives
    distance ``||x||`` and an empty coefficient vector.  ``distance <= tol``
    certifies membership at the caller's tolerance.
    """
    x = as_vector(x)
    if tol <= 0.0:
        raise InvalidInput("tol must be positive")
    if cone.dim != x.size and len(cone) > 0:
        raise DimensionMismatch(f"cone dim {cone.dim} != vector dim {x.size}")
    if len(cone) == 0:
        return float(np.linalg.norm(x)), np.zeros(0)
    coeffs, rnorm = nnls(cone.generators.T, x)
    return rnorm, coeffs


def cone_contains(x, cone: Cone, tol: float = 1e-9) -> bool:
    dist, _ = distance_to_cone(x, cone, tol=tol)
    return dist <= tol


def distance_to_convex_hull(x, points, tol: float = 1e-9) -> float:
    """Distance from ``x`` to the convex hull of a finite point list.

    Minimizes ``||x - sum(lam_i p_i)||`` over the simplex (``lam >= 0``,
    ``sum lam = 1``) via NNLS with an affine penalty row, then polishes
    the identified support through its exact KKT system.
    """
    x = as_vector(x)
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[0] == 0:
        raise InvalidInput("point list must be nonempty")
    if pts.shape[1] != x.size:
        raise DimensionMismatch(f"points dim {pts.shape[1]} != vector dim {x.size}")
    if not np.all(np.isfinite(pts)):
        raise InvalidInput("points have NaN/Inf entries")
    k = pts.shape[0]
    if k == 1:
        return float(np.linalg.norm(x - pts[0]))

    scale = max(1.0, float(np.linalg.norm(x)), float(np.max(np.abs(pts))))
    rho = 1e6 * scale
    G = np.vstack([pts.T, rho * np.ones((1, k))])
    y = np.concatenate([x, [rho]])
    lam, _ = nnls(G, y)

    support = np.where(lam > 1e-12)[0]
    if support.size == 0:
        support = np.array([int(np.argmin(np.linalg.norm(pts - x, axis=1)))])
    best = _polish_hull_support(x, pts, support, tol)
    if best is not None:
        return best
    # support identification failed; fall back to exact support enumeration
    from itertools import combinations

    dists = [float(np.linalg.norm(x - p)) for p in pts]
    best = min(dists)
    max_size = min(k, x.size + 1)
    for size in range(2, max_size + 1):
        for sub in combinations(range(k), size):
            d = _polish_hull_support(x, pts, np.array(sub), tol)
            if d is not None and d < best:
                best = d
    return best


def _polish_hull_support(x, pts, support, tol):
    """Solve the equality-KKT system on a candidate support.

    Returns the distance when the resulting weights are a valid simplex
    combination satisfying the variational inequality, else None.
    """
    P = pts[support]
    s = P.shape[0]
    K = np.zeros((s + 1, s + 1))
    K[:s, :s] = P @ P.T
    K[:s, s] = 1.0
    K[s, :s] = 1.0
    rhs = np.concatenate([P @ x, [1.0]])
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    lam = sol[:s]
    if np.min(lam) < -1e-10:
        return None
    q = P.T @ np.clip(lam, 0.0, None)
    # variational inequality over all points certifies optimality
    gap = pts @ (x - q) - np.dot(q, x - q)
    if np.max(gap) > 10 * max(tol, 1e-12) * max(1.0, float(np.linalg.norm(x - q))):
        return None
    return float(np.linalg.norm(x - q))
