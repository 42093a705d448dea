import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sharpproj import Polyhedron, distance_to_cone, Cone, project_polyhedron
from sharpproj.sharpness import sharpness_lower_bound


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # first call compiles (or loads) the numba kernels; keep that out of
    # the timed acceptance tests
    from sharpproj import lp_solve_enumeration, solve_lp_spp

    P = Polyhedron([[1.0, -1.0], [-1.0, -1.0]], [0.0, 0.0])
    sharpness_lower_bound(P, np.array([0.0, -1.0]))
    project_polyhedron(P, np.array([-1.0, -0.5]))
    distance_to_cone(np.array([0.0, -1.0]), Cone(np.array([[1.0, 0.0]])))
    lp_solve_enumeration(P, np.array([0.0, 1.0]))
    solve_lp_spp(P, np.array([0.0, 1.0]), [-1.0, -0.5], mu=10.0)


@pytest.fixture
def cone2d():
    """{x1 - x2 <= 0, -x1 - x2 <= 0}: the 2-D wedge above the origin."""
    return Polyhedron([[1.0, -1.0], [-1.0, -1.0]], [0.0, 0.0])


@pytest.fixture
def orthant3():
    """The nonnegative orthant in R^3 encoded as -I x <= 0."""
    return Polyhedron(-np.eye(3), np.zeros(3))


@pytest.fixture
def orthant2():
    return Polyhedron(-np.eye(2), np.zeros(2))


@pytest.fixture
def unit_box2():
    return Polyhedron(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
