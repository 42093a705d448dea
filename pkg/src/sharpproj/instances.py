"""Seeded random instance generation for benchmarks and property suites."""

from __future__ import annotations

import numpy as np

from .kernels import unit
from .polyhedron import Polyhedron, _box_rows, _feasible_basic_points
from .pwl import MaxAffine


def random_direction(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        g = rng.standard_normal(n)
        if np.linalg.norm(g) > 1e-6:
            return unit(g)


def _recession_trivial(A: np.ndarray) -> bool:
    """True when ``{r : A r <= 0}`` is the zero cone (set is bounded)."""
    n = A.shape[1]
    box_A, box_b = _box_rows(n, 1.0)
    sysA = np.vstack([A, box_A])
    sysb = np.concatenate([np.zeros(A.shape[0]), box_b])
    verts = _feasible_basic_points(sysA, sysb)
    if verts.shape[0] == 0:
        return True
    return float(np.max(np.abs(verts))) <= 1e-9


def random_polytope(rng: np.random.Generator, n: int, m: int,
                    max_tries: int = 200) -> Polyhedron:
    """Random nonempty *bounded* polyhedron with an interior point.

    Rows are unit Gaussian directions, resampled until they positively
    span the space (trivial recession cone); offsets place a random
    interior point with slack, so the set is a full-dimensional polytope.
    """
    if m < n + 1:
        raise ValueError(f"need at least n+1 = {n + 1} rows to bound R^{n}")
    for _ in range(max_tries):
        A = rng.standard_normal((m, n))
        A /= np.linalg.norm(A, axis=1)[:, None]
        if not _recession_trivial(A):
            continue
        x0 = 0.5 * rng.standard_normal(n)
        slack = rng.uniform(0.1, 1.0, size=m)
        return Polyhedron(A, A @ x0 + slack)
    raise RuntimeError(f"failed to draw a bounded polytope with m={m}, n={n}")


def random_polyhedron(rng: np.random.Generator, n: int, m: int) -> Polyhedron:
    """Random nonempty polyhedron (bounded or not) with an interior point."""
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=1)[:, None]
    x0 = 0.5 * rng.standard_normal(n)
    slack = rng.uniform(0.1, 1.0, size=m)
    return Polyhedron(A, A @ x0 + slack)


def random_max_affine(rng: np.random.Generator, n: int, pieces: int) -> MaxAffine:
    grads = rng.standard_normal((pieces, n))
    offsets = rng.uniform(-1.0, 1.0, size=pieces)
    return MaxAffine(grads, offsets)


def random_bounded_lp(rng: np.random.Generator, n: int, m: int):
    """A bounded feasible LP instance: polytope plus unit objective."""
    P = random_polytope(rng, n, m)
    return P, random_direction(rng, n)
