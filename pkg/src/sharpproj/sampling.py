"""Seeded low-discrepancy sampling used by the estimators.

All estimates in this package are reproducible: identical seeds yield
identical sample sequences (scrambled Halton via scipy.stats.qmc).
"""

from __future__ import annotations

import numpy as np
from scipy.stats import norm, qmc


def box_samples(dim: int, num: int, seed: int, radius: float = 1.0,
                center=None) -> np.ndarray:
    """``num`` quasi-uniform points in the cube of half-width ``radius``."""
    sampler = qmc.Halton(d=dim, scramble=True, seed=int(seed))
    u = sampler.random(num)
    pts = (2.0 * u - 1.0) * radius
    if center is not None:
        pts = pts + np.asarray(center, dtype=float)
    return pts


def sphere_samples(dim: int, num: int, seed: int) -> np.ndarray:
    """``num`` quasi-uniform unit directions (Gaussianized Halton)."""
    sampler = qmc.Halton(d=dim, scramble=True, seed=int(seed))
    u = np.clip(sampler.random(num), 1e-12, 1 - 1e-12)
    g = norm.ppf(u)
    norms = np.linalg.norm(g, axis=1)
    norms[norms < 1e-12] = 1.0
    out = g / norms[:, None]
    # exact renormalization so downstream unit checks pass
    out /= np.linalg.norm(out, axis=1)[:, None]
    return out


def ball_samples(dim: int, num: int, seed: int, radius: float,
                 center) -> np.ndarray:
    """``num`` quasi-uniform points in an open ball."""
    sampler = qmc.Halton(d=dim + 1, scramble=True, seed=int(seed))
    u = sampler.random(num)
    g = norm.ppf(np.clip(u[:, :dim], 1e-12, 1 - 1e-12))
    norms = np.linalg.norm(g, axis=1)
    norms[norms < 1e-12] = 1.0
    dirs = g / norms[:, None]
    radii = radius * (1 - 1e-9) * u[:, dim] ** (1.0 / dim)
    return np.asarray(center, dtype=float) + dirs * radii[:, None]
