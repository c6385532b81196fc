"""W-invariant polytopes, chamber restriction and polynomial integration."""

from group_kstab.polyint.chamber import (
    ChamberPolytope,
    Cone,
    OuterFacet,
    restrict_to_chamber,
    weight_pi,
)
from group_kstab.polyint.integrate import (
    RegionEmpty,
    integrate,
    integrate_facet_sigma,
    integrate_simplex,
    integrate_y_nu,
    moments,
)
from group_kstab.polyint.polynomial import Polynomial
from group_kstab.polyint.polytope import (
    Facet,
    InvalidPolytope,
    NotWInvariant,
    OriginNotInterior,
    PolyintError,
    Polytope,
    Unbounded,
    build_polytope,
    full_triangulation,
    triangulate,
)

__all__ = [
    "ChamberPolytope",
    "Cone",
    "Facet",
    "InvalidPolytope",
    "NotWInvariant",
    "OriginNotInterior",
    "OuterFacet",
    "PolyintError",
    "Polynomial",
    "Polytope",
    "RegionEmpty",
    "Unbounded",
    "build_polytope",
    "full_triangulation",
    "integrate",
    "integrate_facet_sigma",
    "integrate_simplex",
    "integrate_y_nu",
    "moments",
    "restrict_to_chamber",
    "triangulate",
    "weight_pi",
]
