"""Stability invariants and verdicts on a chamber polytope."""

from group_kstab.criteria.functional import linear_form_value, linear_functional
from group_kstab.criteria.invariants import (
    ChamberInvariants,
    NotToricDirection,
    ZeroVolume,
    barycenters,
    chamber_invariants,
    four_rho,
    futaki,
    futaki_toric_vector,
    is_fano_normalized,
    lambdas,
    sbar,
    volume,
)
from group_kstab.criteria.plfunction import (
    AffinePiece,
    CriteriaError,
    NonConvexPieces,
    PLConvexFunction,
)
from group_kstab.criteria.verdicts import (
    AnalysisReport,
    Destabilizer,
    KEVerdict,
    ProperVerdict,
    analyze,
    destabilizer,
    verdict_ke_fano,
    verdict_properness,
)

__all__ = [
    "AffinePiece",
    "AnalysisReport",
    "ChamberInvariants",
    "CriteriaError",
    "Destabilizer",
    "KEVerdict",
    "NonConvexPieces",
    "NotToricDirection",
    "PLConvexFunction",
    "ProperVerdict",
    "ZeroVolume",
    "analyze",
    "barycenters",
    "chamber_invariants",
    "destabilizer",
    "four_rho",
    "futaki",
    "futaki_toric_vector",
    "is_fano_normalized",
    "lambdas",
    "linear_form_value",
    "linear_functional",
    "sbar",
    "verdict_ke_fano",
    "verdict_properness",
    "volume",
]
