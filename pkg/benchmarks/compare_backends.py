#!/usr/bin/env python3
"""Side-by-side benchmark of the hot kernels: numba JIT vs pure numpy.

The library selects the backend at import time via SHARPPROJ_BACKEND
(default: numba when importable).  This script compiles the kernel
sources independently so both paths can be timed in one process, checks
that they agree bitwise-closely, and prints a comparison table.

Usage:  python benchmarks/compare_backends.py [--nnls 2000] [--lp 200]
"""

import argparse
import time

import numpy as np

from sharpproj.kernels import NNLS_ITER_FACTOR, _nnls_py
from sharpproj.polyhedron import COND_CAP, _basic_points_py, _combo_array

try:
    from numba import njit

    HAVE_NUMBA = True
    nnls_jit = njit(cache=True)(_nnls_py)
    basic_points_jit = njit(cache=True)(_basic_points_py)
except ImportError:
    HAVE_NUMBA = False
    print("numba not importable: timing the numpy path only")


def bench_nnls(count: int, rng):
    systems = []
    for _ in range(count):
        G = rng.standard_normal((4, 8))
        y = rng.standard_normal(4)
        systems.append((G, y))

    def run(fn):
        total = 0.0
        for G, y in systems:
            _, rnorm, status = fn(G, y, 1e-12, NNLS_ITER_FACTOR * 8)
            assert status == 0
            total += rnorm
        return total

    if HAVE_NUMBA:
        run_jit = lambda: run(nnls_jit)  # noqa: E731
        run_jit()  # warm the JIT outside the timed region
        t0 = time.perf_counter()
        ref_jit = run_jit()
        t_jit = time.perf_counter() - t0
    t0 = time.perf_counter()
    ref_py = run(_nnls_py)
    t_py = time.perf_counter() - t0
    if HAVE_NUMBA:
        assert abs(ref_py - ref_jit) <= 1e-9 * max(1.0, abs(ref_py))
        return t_py, t_jit
    return t_py, None


def bench_vertex_enum(count: int, rng):
    m, n = 12, 4
    combos = _combo_array(m, n)
    instances = []
    for _ in range(count):
        A = rng.standard_normal((m, n))
        A /= np.linalg.norm(A, axis=1)[:, None]
        b = A @ (0.3 * rng.standard_normal(n)) + rng.uniform(0.1, 1.0, m)
        instances.append((np.ascontiguousarray(A), np.ascontiguousarray(b)))

    def run(fn):
        total = 0
        for A, b in instances:
            _, ok = fn(A, b, combos, COND_CAP, 1e-9)
            total += int(np.sum(ok))
        return total

    if HAVE_NUMBA:
        run_jit = lambda: run(basic_points_jit)  # noqa: E731
        run_jit()
        t0 = time.perf_counter()
        ref_jit = run_jit()
        t_jit = time.perf_counter() - t0
    t0 = time.perf_counter()
    ref_py = run(_basic_points_py)
    t_py = time.perf_counter() - t0
    if HAVE_NUMBA:
        assert ref_py == ref_jit
        return t_py, t_jit
    return t_py, None


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--nnls", type=int, default=2000,
                        help="number of NNLS systems (default 2000)")
    parser.add_argument("--lp", type=int, default=200,
                        help="number of vertex-enumeration instances (default 200)")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<28}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}")
    print("-" * 62)
    for name, (t_py, t_jit) in (
        (f"nnls x{args.nnls} (4x8)", bench_nnls(args.nnls, rng)),
        (f"vertex enum x{args.lp} (12,4)", bench_vertex_enum(args.lp, rng)),
    ):
        if t_jit is None:
            print(f"{name:<28}{t_py:>12.3f}{'n/a':>12}{'n/a':>10}")
        else:
            print(f"{name:<28}{t_py:>12.3f}{t_jit:>12.3f}{t_py / t_jit:>9.1f}x")


if __name__ == "__main__":
    main()
