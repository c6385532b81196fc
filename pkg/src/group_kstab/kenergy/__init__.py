"""Reduced K-energy of smooth candidates, scalar curvature and minimization."""

from group_kstab.kenergy.candidate import (
    InvalidCandidate,
    KEnergyError,
    NotConvexAtNodes,
    SmoothCandidate,
    candidate_from_dict,
    symmetric_basis,
)
from group_kstab.kenergy.chi import ChiFunction
from group_kstab.kenergy.curvature import (
    BoundarySample,
    CurvatureTerms,
    SingularHessian,
    WallTooClose,
    boundary_contract,
    curvature_terms,
    q_diagnostic,
    scalar_curvature,
    scalar_curvature_at,
)
from group_kstab.kenergy.functional import (
    ChamberViolation,
    KappaBounds,
    KEnergyValue,
    QuadratureOptions,
    chamber_nodes,
    first_variation,
    j_functional_proxy,
    kappa_bounds,
    kenergy_value,
    modified_kenergy_value,
    nonlinear_first_variation,
    nonlinear_N,
)
from group_kstab.kenergy.guillemin import GuilleminFunction
from group_kstab.kenergy.legendre import (
    NotConvexSamples,
    check_convex_samples,
    inverse_legendre_transform,
    legendre_transform,
    round_trip_error,
)
from group_kstab.kenergy.minimize import (
    BarrierBreach,
    KEnergyConvergenceError,
    MinimizeResult,
    NoDescent,
    PropernessRequired,
    minimize_kenergy,
)

__all__ = [
    "BarrierBreach",
    "BoundarySample",
    "ChamberViolation",
    "ChiFunction",
    "CurvatureTerms",
    "GuilleminFunction",
    "InvalidCandidate",
    "KEnergyConvergenceError",
    "KEnergyError",
    "KEnergyValue",
    "KappaBounds",
    "MinimizeResult",
    "NoDescent",
    "NotConvexAtNodes",
    "NotConvexSamples",
    "PropernessRequired",
    "QuadratureOptions",
    "SingularHessian",
    "SmoothCandidate",
    "WallTooClose",
    "boundary_contract",
    "candidate_from_dict",
    "chamber_nodes",
    "check_convex_samples",
    "curvature_terms",
    "first_variation",
    "inverse_legendre_transform",
    "j_functional_proxy",
    "kappa_bounds",
    "kenergy_value",
    "legendre_transform",
    "minimize_kenergy",
    "modified_kenergy_value",
    "nonlinear_N",
    "nonlinear_first_variation",
    "q_diagnostic",
    "round_trip_error",
    "scalar_curvature",
    "scalar_curvature_at",
    "symmetric_basis",
]
