"""Polyhedron model, active sets, normal cones, faces and exact oracles.

The enumeration-based LP solver and projector here are deliberately
exhaustive: they are the desk-scale ground truth that validates the fast
paths in :mod:`sharpproj.projection` and :mod:`sharpproj.spp`.  Row caps
keep them honest about their intended size.

Rows of every :class:`Polyhedron` are normalized to unit length at
construction (with ``b`` rescaled), so all tolerances in this package are
absolute distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ._backend import maybe_jit
from .errors import (
    CapsExceeded,
    ConvergenceError,
    DimensionMismatch,
    InfeasibleProblem,
    InvalidInput,
)
from .kernels import Cone, as_vector, distance_to_cone, nnls, require_unit

LP_MAX_ROWS = 24
LP_MAX_DIM = 10
ACTIVE_SET_MAX_ROWS = 20
DEFAULT_ACTIVE_TOL = 1e-8
FEAS_TOL = 1e-9
COND_CAP = 1e12
_MAX_SUBSETS = 5_000_000


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """``{x : A x <= b}`` with unit-norm rows.

    ``row_scale`` records the norms the input rows were divided by, so
    reports can echo the applied scaling.  Row order is preserved: indices
    are stable identifiers.
    """

    A: np.ndarray
    b: np.ndarray
    row_scale: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        b = np.asarray(self.b, dtype=np.float64).ravel()
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise InvalidInput(f"constraint matrix must be m x n with m,n >= 1, got {A.shape}")
        if b.size != A.shape[0]:
            raise DimensionMismatch(f"b has length {b.size}, expected {A.shape[0]}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvalidInput("constraint data has NaN/Inf entries")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms < 1e-14):
            raise InvalidInput("zero constraint row has no normal direction")
        A = A / norms[:, None]
        b = b / norms
        A.setflags(write=False)
        b.setflags(write=False)
        norms.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "row_scale", norms)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def residuals(self, x) -> np.ndarray:
        """Signed slack violations ``A x - b`` (``<= 0`` means satisfied)."""
        return self.A @ as_vector(x, self.dim) - self.b

    def contains(self, x, tol: float = FEAS_TOL) -> bool:
        return bool(np.max(self.residuals(x)) <= tol)


@dataclass(frozen=True, eq=False)
class ActiveSet:
    """Constraint rows holding with equality (within ``tol``) at ``at``."""

    indices: tuple[int, ...]
    at: np.ndarray
    tol: float

    def __contains__(self, i) -> bool:
        return i in self.indices

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class LpResult:
    status: str  # optimal | unbounded | infeasible
    x_opt: np.ndarray | None = None
    value: float | None = None
    vertex_active_set: ActiveSet | None = None


@dataclass(frozen=True, eq=False)
class FaceDescription:
    """Exposed face arg-maximizing a direction, as a polyhedron.

    ``poly`` is ``base`` plus the supporting hyperplane encoded as the two
    inequality rows listed in ``equalities``.  ``witness`` certifies the
    face nonempty.
    """

    base: Polyhedron
    poly: Polyhedron
    equalities: frozenset[int]
    optimal_value: float
    witness: np.ndarray


def active_set(P: Polyhedron, x, tol: float = DEFAULT_ACTIVE_TOL) -> ActiveSet:
    """Rows within ``tol`` of equality at a feasible point."""
    x = as_vector(x, P.dim)
    resid = P.residuals(x)
    worst = float(np.max(resid))
    if worst > tol:
        raise InfeasibleProblem(f"point violates row {int(np.argmax(resid))} by {worst:.3e}")
    idx = np.where(resid >= -tol)[0]
    return ActiveSet(tuple(int(i) for i in idx), x, tol)


def normal_cone_at(P: Polyhedron, x, tol: float = DEFAULT_ACTIVE_TOL) -> Cone:
    """Cone generated by the active rows; ``{0}`` at interior points."""
    act = active_set(P, x, tol)
    if not act.indices:
        return Cone.trivial(P.dim)
    return Cone(P.A[list(act.indices)])


# --------------------------------------------------------------------------
# Basic-point enumeration kernel.
# --------------------------------------------------------------------------


def _basic_points_py(A, b, combos, cond_cap, feas_tol):
    n_comb = combos.shape[0]
    n = combos.shape[1]
    m = A.shape[0]
    pts = np.zeros((n_comb, n))
    ok = np.zeros(n_comb, dtype=np.bool_)
    for i in range(n_comb):
        M = np.empty((n, n))
        rhs = np.empty(n)
        for j in range(n):
            r = combos[i, j]
            for c in range(n):
                M[j, c] = A[r, c]
            rhs[j] = b[r]
        sv = np.linalg.svd(M)[1]
        if sv[n - 1] <= 0.0 or sv[0] > cond_cap * sv[n - 1]:
            continue
        x = np.linalg.solve(M, rhs)
        feas = True
        for r2 in range(m):
            s = 0.0
            for c in range(n):
                s += A[r2, c] * x[c]
            if s > b[r2] + feas_tol:
                feas = False
                break
        if feas:
            pts[i] = x
            ok[i] = True
    return pts, ok


_basic_points = maybe_jit(_basic_points_py)


def _combo_array(m: int, n: int) -> np.ndarray:
    count = math.comb(m, n)
    if count > _MAX_SUBSETS:
        raise CapsExceeded(f"{count} row subsets exceed the enumeration budget")
    if count == 0:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(list(combinations(range(m), n)), dtype=np.int64)


def _feasible_basic_points(A: np.ndarray, b: np.ndarray,
                           feas_tol: float = FEAS_TOL) -> np.ndarray:
    """All feasible basic points (vertex candidates), deduplicated."""
    m, n = A.shape
    if m < n:
        return np.zeros((0, n))
    combos = _combo_array(m, n)
    if combos.shape[0] == 0:
        return np.zeros((0, n))
    pts, ok = _basic_points(np.ascontiguousarray(A), np.ascontiguousarray(b),
                            combos, COND_CAP, feas_tol)
    pts = pts[ok]
    if pts.shape[0] == 0:
        return pts
    rounded = np.round(pts, 9)
    _, keep = np.unique(rounded, axis=0, return_index=True)
    return pts[np.sort(keep)]


def _box_rows(n: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
    eye = np.eye(n)
    A = np.vstack([eye, -eye])
    b = np.full(2 * n, float(radius))
    return A, b


def _minimize_over_vertices(A, b, c, feas_tol: float = FEAS_TOL):
    """Min of ``<c, x>`` over the feasible basic points, or ``None``.

    Ties broken by lexicographically smallest point.
    """
    verts = _feasible_basic_points(A, b, feas_tol)
    if verts.shape[0] == 0:
        return None
    vals = verts @ c
    best = float(np.min(vals))
    near = verts[vals <= best + 1e-9]
    order = np.lexsort(near.T[::-1])
    x = near[order[0]]
    return float(np.dot(c, x)), x


# --------------------------------------------------------------------------
# Feasibility / margin machinery (equality rows reduced through the
# nullspace, inequality margin maximized over a bounded box).
# --------------------------------------------------------------------------


def linear_system_margin(A_in, b_in, A_eq=None, b_eq=None,
                         box_radius: float | None = None):
    """Largest slack ``eps`` (capped at 1) with ``A_in x <= b_in - eps`` and
    ``A_eq x = b_eq``, maximized over a generous box.

    Returns ``(margin, witness)``; margin ``-inf`` when the equalities are
    inconsistent.  ``margin >= -tol`` certifies feasibility via the witness;
    strictly positive margin certifies a point with slack in every
    inequality (a relative-interior style witness).
    """
    A_in = np.zeros((0, 1)) if A_in is None else np.atleast_2d(np.asarray(A_in, dtype=float))
    b_in = np.zeros(0) if b_in is None else np.asarray(b_in, dtype=float).ravel()
    if A_eq is not None and np.size(A_eq) > 0:
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        b_eq = np.asarray(b_eq, dtype=float).ravel()
        n = A_eq.shape[1]
        x_p, *_ = np.linalg.lstsq(A_eq, b_eq, rcond=None)
        if np.max(np.abs(A_eq @ x_p - b_eq), initial=0.0) > 1e-8:
            return -np.inf, None
        Z = _nullspace(A_eq)
    else:
        if A_in.shape[0] == 0:
            raise InvalidInput("margin query needs at least one constraint")
        n = A_in.shape[1]
        x_p = np.zeros(n)
        Z = np.eye(n)

    if A_in.shape[0] == 0:
        return 1.0, x_p

    b_red = b_in - A_in @ x_p
    if Z.shape[1] == 0:
        return min(1.0, float(np.min(b_red))), x_p

    A_red = A_in @ Z
    keep = np.linalg.norm(A_red, axis=1) > 1e-12
    fixed = b_red[~keep]
    if fixed.size and np.min(fixed) < -1e-9:
        return -np.inf, None
    # rows constant on the subspace cap the achievable slack
    cap = min(1.0, float(np.min(fixed))) if fixed.size else 1.0
    A_red, b_red = A_red[keep], b_red[keep]
    if A_red.shape[0] == 0:
        return cap, x_p

    k = Z.shape[1]
    radius = box_radius if box_radius is not None else 1e4 * max(1.0, float(np.max(np.abs(b_red))))
    last = None
    for _ in range(3):
        # variables (t, eps): A_red t + eps <= b_red, |t| <= radius, -R_eps <= eps <= 1
        r_eps = max(10.0, 10 * float(np.max(np.abs(b_red))))
        rows = np.hstack([A_red, np.ones((A_red.shape[0], 1))])
        box_A, box_b = _box_rows(k + 1, radius)
        box_b[k] = 1.0          # eps <= 1
        box_b[2 * k + 1] = r_eps  # eps >= -r_eps
        A_lp = np.vstack([rows, box_A])
        b_lp = np.concatenate([b_red, box_b])
        c = np.zeros(k + 1)
        c[k] = -1.0
        sol = _minimize_over_vertices(A_lp, b_lp, c)
        if sol is None:  # numerically degenerate box; widen and retry
            radius *= 100.0
            continue
        _, xt = sol
        margin = float(xt[k])
        t = xt[:k]
        last = (min(cap, margin), x_p + Z @ t)
        at_box = float(np.max(np.abs(t))) > radius * (1 - 1e-9)
        if margin >= 1e-7 or not at_box:
            return last
        radius *= 100.0
    if last is None:
        raise ConvergenceError("margin LP found no vertex at any box radius")
    return last


def _nullspace(A: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ker(A), columns; (n, 0) when trivial."""
    A = np.atleast_2d(A)
    _, s, vt = np.linalg.svd(A)
    tol = max(A.shape) * (s[0] if s.size else 0.0) * np.finfo(float).eps
    rank = int(np.sum(s > max(tol, 1e-13)))
    return vt[rank:].T.copy()


def _farkas_infeasible(A: np.ndarray, b: np.ndarray, tol: float = 1e-7) -> bool:
    """Exact infeasibility certificate: some ``y >= 0`` with
    ``A.T y = 0`` and ``<b, y> = -1``."""
    m = A.shape[0]
    scale = max(1.0, float(np.max(np.abs(b))))
    rho = 1e4 * scale
    G = np.vstack([A.T, rho * b[None, :]])
    y_target = np.concatenate([np.zeros(A.shape[1]), [-rho]])
    try:
        y, rnorm = nnls(G, y_target)
    except ConvergenceError:
        return False
    if rnorm > tol * rho:
        return False
    # polish: verify the certificate directly
    ok = np.max(np.abs(A.T @ y)) <= 1e-6 * max(1.0, np.max(np.abs(y)) if m else 1.0)
    return bool(ok and np.dot(b, y) < -1e-9)


def feasible_point(A, b, tol: float = FEAS_TOL) -> np.ndarray | None:
    """A point of ``{A x <= b}`` (margin-maximizing), or ``None`` if empty."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if np.all(b >= 0):
        return np.zeros(A.shape[1])
    margin, witness = linear_system_margin(A, b)
    if margin >= -tol and witness is not None:
        return witness
    if _farkas_infeasible(A, b):
        return None
    if margin >= -1e-6 and witness is not None:  # borderline: accept the witness
        return witness
    return None


# --------------------------------------------------------------------------
# Enumeration LP oracle.
# --------------------------------------------------------------------------


def _check_caps(P: Polyhedron):
    if P.m > LP_MAX_ROWS or P.dim > LP_MAX_DIM:
        raise CapsExceeded(
            f"oracle is desk-scale by contract (m <= {LP_MAX_ROWS}, n <= {LP_MAX_DIM}); "
            f"got m={P.m}, n={P.dim}")


def _improving_ray(P: Polyhedron, c: np.ndarray) -> np.ndarray | None:
    """Recession direction with ``A r <= 0`` and ``<c, r> < 0``, if any.

    Found by enumerating the vertices of the recession cone boxed to
    ``[-1, 1]^n``.
    """
    box_A, box_b = _box_rows(P.dim, 1.0)
    A = np.vstack([P.A, box_A])
    b = np.concatenate([np.zeros(P.m), box_b])
    sol = _minimize_over_vertices(A, b, c)
    if sol is None:
        return None
    val, r = sol
    if val >= -1e-9:
        return None
    # certificate re-check on the candidate ray
    if np.max(P.A @ r) > 1e-9 or np.dot(c, r) >= 0:
        return None
    return r


def lp_solve_enumeration(P: Polyhedron, c) -> LpResult:
    """Exact desk-scale LP oracle for ``min <c, x>`` over ``P``.

    Enumerates invertible row subsets for vertices, certifies
    unboundedness by a recession ray, and detects infeasibility by a
    margin/Farkas phase-1.  Vertex ties break to the lexicographically
    smallest point.
    """
    _check_caps(P)
    c = as_vector(c, P.dim)

    verts = _feasible_basic_points(P.A, P.b)
    witness = None
    if verts.shape[0] == 0:
        witness = feasible_point(P.A, P.b)
        if witness is None:
            return LpResult(status="infeasible")

    # dual feasibility (-c in cone of rows) certifies boundedness cheaply;
    # only on failure is the recession-ray enumeration consulted
    cnorm = float(np.linalg.norm(c))
    if cnorm > 0:
        dual_dist, _ = distance_to_cone(-c / cnorm, Cone(P.A))
        if dual_dist > 1e-9 and _improving_ray(P, c) is not None:
            return LpResult(status="unbounded")

    if verts.shape[0] > 0:
        vals = verts @ c
        best = float(np.min(vals))
        near = verts[vals <= best + 1e-9]
        order = np.lexsort(near.T[::-1])
        x = near[order[0]]
        return LpResult(status="optimal", x_opt=x, value=float(np.dot(c, x)),
                        vertex_active_set=active_set(P, x))

    # Feasible, bounded objective, but no vertex (lineality space): box the
    # problem and certify the boxed optimum against the real rows.
    radius = 1e3 * max(1.0, float(np.max(np.abs(P.b))), float(np.linalg.norm(witness)))
    cn = c / cnorm if cnorm > 0 else None
    for _ in range(3):
        box_A, box_b = _box_rows(P.dim, radius)
        A = np.vstack([P.A, box_A])
        b = np.concatenate([P.b, box_b])
        sol = _minimize_over_vertices(A, b, c)
        if sol is not None:
            val, x = sol
            if cn is None:
                return LpResult(status="optimal", x_opt=x, value=val,
                                vertex_active_set=active_set(P, x))
            cone = normal_cone_at(P, x)
            dist, _ = distance_to_cone(-cn, cone)
            if dist <= 1e-9:
                return LpResult(status="optimal", x_opt=x, value=val,
                                vertex_active_set=active_set(P, x))
        radius *= 100.0
    raise ConvergenceError("boxed LP failed to certify an optimum without vertices")


def support_function(P: Polyhedron, v) -> float:
    """``sigma_P(v) = sup_{y in P} <v, y>``; ``+inf`` when unbounded."""
    v = as_vector(v, P.dim)
    res = lp_solve_enumeration(P, -v)
    if res.status == "infeasible":
        raise InfeasibleProblem("support function of an empty polyhedron")
    if res.status == "unbounded":
        return math.inf
    return -res.value


def face_of(P: Polyhedron, x_star) -> FaceDescription | None:
    """Exposed face arg-maximizing ``x_star`` over ``P``; ``None`` when the
    supremum is infinite (empty face)."""
    x_star = require_unit(x_star, P.dim)
    res = lp_solve_enumeration(P, -x_star)
    if res.status == "infeasible":
        raise InfeasibleProblem("face of an empty polyhedron")
    if res.status == "unbounded":
        return None
    sigma = -res.value
    A = np.vstack([P.A, x_star[None, :], -x_star[None, :]])
    b = np.concatenate([P.b, [sigma, -sigma]])
    poly = Polyhedron(A, b)
    return FaceDescription(base=P, poly=poly,
                           equalities=frozenset({P.m, P.m + 1}),
                           optimal_value=sigma, witness=res.x_opt)


# --------------------------------------------------------------------------
# Exhaustive projector oracle.
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BruteProjection:
    proj: np.ndarray
    active: ActiveSet
    multipliers: np.ndarray
    rows: tuple[int, ...]


def project_brute(P: Polyhedron, z) -> BruteProjection:
    """Projection onto ``P`` by enumerating candidate faces.

    Tries every independent row subset of size ``<= n`` as the active face,
    keeps candidates that are feasible with nonnegative multipliers, and
    returns the closest.  The result satisfies
    ``z - proj in N_P(proj)`` by construction.
    """
    _check_caps(P)
    z = as_vector(z, P.dim)
    if P.contains(z, tol=FEAS_TOL):
        return BruteProjection(z, active_set(P, z), np.zeros(0), ())

    # tolerances scale with the input: candidates are computed by
    # subtracting multiples of the rows from z, so double precision only
    # supports absolute accuracy ~ ||z|| * eps
    scale = max(1.0, float(np.linalg.norm(z)))
    tol = max(FEAS_TOL, 1e-13 * scale)
    best_d = math.inf
    best = None
    for k in range(1, P.dim + 1):
        for rows in combinations(range(P.m), k):
            As = P.A[list(rows)]
            sv = np.linalg.svd(As, compute_uv=False)
            if sv[-1] <= 1e-10 * sv[0]:
                continue
            gram = As @ As.T
            lam = np.linalg.solve(gram, As @ z - P.b[list(rows)])
            if np.min(lam) < -tol:
                continue
            x = z - As.T @ lam
            if not P.contains(x, tol=tol):
                continue
            d = float(np.linalg.norm(z - x))
            if d < best_d - 1e-12:
                best_d = d
                best = (x, np.clip(lam, 0.0, None), rows)
    if best is None:
        if feasible_point(P.A, P.b) is None:
            raise InfeasibleProblem("cannot project onto an empty polyhedron")
        raise ConvergenceError("no valid projection candidate found (degenerate instance)")
    x, lam, rows = best
    return BruteProjection(x, active_set(P, x, tol=max(DEFAULT_ACTIVE_TOL, tol)),
                           lam, rows)


# --------------------------------------------------------------------------
# Realizable active sets.
# --------------------------------------------------------------------------


def _active_set_lattice(P: Polyhedron) -> dict[frozenset, tuple[float, np.ndarray]]:
    """Margin and witness for every realizable active set.

    The family is downward closed, which prunes the 2^m lattice walk.  A
    set ``J`` maps to the largest slack available in the non-``J`` rows
    while the ``J`` rows are held at equality, plus the margin-maximizing
    witness point; ``margin > 0`` means some point has exactly ``J``
    active, and the witness then sits in the relative interior of the
    corresponding face.
    """
    if P.m > ACTIVE_SET_MAX_ROWS:
        raise CapsExceeded(f"active-set enumeration capped at m <= {ACTIVE_SET_MAX_ROWS}")
    out: dict[frozenset, tuple[float, np.ndarray]] = {}
    margin0, w0 = linear_system_margin(P.A, P.b)
    if margin0 < -FEAS_TOL:
        if feasible_point(P.A, P.b) is None:
            return out
        margin0 = -FEAS_TOL  # borderline-feasible; keep going with zero slack
    out[frozenset()] = (margin0, w0)
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for J in frontier:
            start = (max(J) + 1) if J else 0
            for i in range(start, P.m):
                cand = J | {i}
                if cand in out:
                    continue
                if any(cand - {j} not in out for j in cand):
                    continue
                rows = sorted(cand)
                comp = [r for r in range(P.m) if r not in cand]
                if comp:
                    margin, w = linear_system_margin(
                        P.A[comp], P.b[comp], P.A[rows], P.b[rows])
                else:
                    margin, w = linear_system_margin(
                        None, None, P.A[rows], P.b[rows])
                if margin >= -FEAS_TOL:
                    out[cand] = (margin, w)
                    nxt.append(cand)
        frontier = nxt
    return out


def realizable_active_sets(P: Polyhedron) -> list[frozenset]:
    """All ``J`` with some ``x in P`` keeping every row of ``J`` active.

    Decided by one margin LP per subset, with downward-closure pruning.
    Sorted by (size, indices) for deterministic output.
    """
    lattice = _active_set_lattice(P)
    return sorted(lattice, key=lambda J: (len(J), sorted(J)))


def exactly_realizable_active_sets(P: Polyhedron, strict_tol: float = 1e-7) -> list[frozenset]:
    """Active sets realized *exactly* (some ``x`` has ``I(x) == J``).

    These are the realizable sets whose margin LP leaves strictly positive
    slack in every other row; the normal cone is constant equal to
    ``cone[rows of J]`` on the corresponding relative interiors.
    """
    lattice = _active_set_lattice(P)
    return sorted((J for J, (margin, _) in lattice.items() if margin > strict_tol),
                  key=lambda J: (len(J), sorted(J)))
