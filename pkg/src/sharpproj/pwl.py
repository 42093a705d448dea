"""Max-affine (piecewise-linear convex) functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidInput
from .kernels import as_vector


@dataclass(frozen=True, eq=False)
class MaxAffine:
    """``f(x) = max_i <grads[i], x> + offsets[i]`` over a finite piece list."""

    grads: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.grads, dtype=np.float64))
        c = np.asarray(self.offsets, dtype=np.float64).ravel()
        if g.shape[0] == 0:
            raise InvalidInput("max-affine function needs at least one piece")
        if c.size != g.shape[0]:
            raise DimensionMismatch(f"{g.shape[0]} gradients but {c.size} offsets")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(c))):
            raise InvalidInput("piece data has NaN/Inf entries")
        g.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "grads", g)
        object.__setattr__(self, "offsets", c)

    @classmethod
    def from_pieces(cls, pieces) -> "MaxAffine":
        """Build from an iterable of ``(gradient, offset)`` pairs."""
        grads = [np.atleast_1d(np.asarray(a, dtype=float)) for a, _ in pieces]
        offs = [float(c) for _, c in pieces]
        return cls(np.vstack(grads), np.array(offs))

    @property
    def dim(self) -> int:
        return self.grads.shape[1]

    @property
    def piece_count(self) -> int:
        return self.grads.shape[0]

    def values(self, x) -> np.ndarray:
        """Per-piece affine values at ``x``."""
        return self.grads @ as_vector(x, self.dim) + self.offsets

    def __call__(self, x) -> float:
        return float(np.max(self.values(x)))

    def active_pieces(self, x, tol: float = 1e-9) -> tuple[int, ...]:
        """Indices attaining the max at ``x`` within ``tol``."""
        vals = self.values(x)
        top = float(np.max(vals))
        return tuple(int(i) for i in np.where(vals >= top - tol)[0])

    def subdifferential_points(self, x, tol: float = 1e-9) -> np.ndarray:
        """Generators of the subdifferential at ``x`` (active gradients);
        the subdifferential is their convex hull."""
        return self.grads[list(self.active_pieces(x, tol))]
