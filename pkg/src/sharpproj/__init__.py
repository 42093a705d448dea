"""sharpproj: one-projection solving of LPs and piecewise-linear convex
programs over polyhedra, with the sharpness-modulus machinery needed to
certify each step and brute-force oracles to validate every fast path."""

__version__ = "0.1.0"

from ._backend import backend_name
from .kernels import (
    Cone,
    distance_to_cone,
    distance_to_convex_hull,
    distance_to_ray,
    nnls,
)
from .polyhedron import (
    ActiveSet,
    FaceDescription,
    LpResult,
    Polyhedron,
    active_set,
    face_of,
    lp_solve_enumeration,
    normal_cone_at,
    project_brute,
    realizable_active_sets,
    support_function,
)
from .pwl import MaxAffine
from .projection import (
    LiftedEpigraph,
    ProjectionResult,
    lift_epigraph,
    project_epigraph,
    project_halfspace,
    project_polyhedron,
)
from .sharpness import (
    SharpnessReport,
    indicator_linear_kl,
    kl_alpha_from_beta,
    kl_beta_from_alpha,
    pwl_kl_constant,
    sharpness_dual_estimate,
    sharpness_exact,
    sharpness_lower_bound,
)
from .spp import (
    CpReport,
    SppReport,
    check_conditions,
    construct_infeasible_v,
    mu_threshold_exact,
    mu_threshold_oblivious,
    solve_cp_spp,
    solve_lp_spp,
    theta,
    verify_direct_certificate,
)
from .regularity import (
    DistBoundReport,
    SubtransReport,
    distance_upper_bound,
    estimate_subtransversality,
    error_bound_constants,
)

__all__ = [
    "backend_name",
    "Cone", "distance_to_cone", "distance_to_convex_hull", "distance_to_ray", "nnls",
    "ActiveSet", "FaceDescription", "LpResult", "Polyhedron", "active_set",
    "face_of", "lp_solve_enumeration", "normal_cone_at", "project_brute",
    "realizable_active_sets", "support_function",
    "MaxAffine",
    "LiftedEpigraph", "ProjectionResult", "lift_epigraph", "project_epigraph",
    "project_halfspace", "project_polyhedron",
    "SharpnessReport", "indicator_linear_kl", "kl_alpha_from_beta",
    "kl_beta_from_alpha", "pwl_kl_constant", "sharpness_dual_estimate",
    "sharpness_exact", "sharpness_lower_bound",
    "CpReport", "SppReport", "check_conditions", "construct_infeasible_v",
    "mu_threshold_exact", "mu_threshold_oblivious", "solve_cp_spp", "solve_lp_spp",
    "theta", "verify_direct_certificate",
    "DistBoundReport", "SubtransReport", "distance_upper_bound",
    "estimate_subtransversality", "error_bound_constants",
]
