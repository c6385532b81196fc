"""Restriction of a W-invariant polytope 2P to the closed positive chamber."""

from __future__ import annotations

import logging

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from group_kstab import linalg
from group_kstab.linalg import Vector
from group_kstab.polyint.polynomial import Polynomial, product_of_linear_forms
from group_kstab.polyint.polytope import (
    Facet,
    HalfSpace,
    InvalidPolytope,
    NotWInvariant,
    Polytope,
    Simplex,
    check_w_invariance,
    enumerate_vertices,
    simplex_volume,
    tight_set,
    triangulate,
)
from group_kstab.rootdata import RootSystem

logger = logging.getLogger(__name__)


def weight_pi(rs: RootSystem) -> Polynomial:
    """π(y) = ∏_{α∈Φ₊} ⟨α, y⟩², homogeneous of degree 2|Φ₊|."""
    return product_of_linear_forms(rs.root_covectors(), rs.rank, power=2)


@dataclass(frozen=True)
class OuterFacet:
    """Piece F_A of ∂(2P₊) ∩ ∂(2P) lying on one facet of 2P."""

    index: int
    facet: Facet
    vertices: tuple[Vector, ...]
    simplices: tuple[Simplex, ...]

    @property
    def normal(self) -> Vector:
        return self.facet.covector

    @property
    def offset(self) -> Fraction:
        return self.facet.offset

    def sigma_scale(self, gram: tuple[Vector, ...]) -> float:
        """|u|_{G*} = sqrt(uᵀG⁻¹u), the ratio dσ₀ / dμ_F."""
        u = self.normal
        value = linalg.dot(u, linalg.mat_vec(linalg.inverse(gram), u))
        return float(value) ** 0.5

    def unit_normal(self, gram: tuple[Vector, ...]) -> tuple[float, ...]:
        """ν_A as a weight vector: G⁻¹u / |u|_{G*}."""
        raised = linalg.mat_vec(linalg.inverse(gram), self.normal)
        scale = self.sigma_scale(gram)
        return tuple(float(x) / scale for x in raised)


@dataclass(frozen=True)
class Cone:
    """E_A = {t y : t ∈ [0, 1], y ∈ F_A}."""

    facet: OuterFacet
    simplices: tuple[Simplex, ...]

    @property
    def volume(self) -> Fraction:
        return sum((simplex_volume(s) for s in self.simplices), Fraction(0))


@dataclass(frozen=True)
class ChamberPolytope:
    """2P₊ with its outer facets, cones and the weight π."""

    polytope: Polytope
    root_system: RootSystem
    walls: tuple[HalfSpace, ...]
    vertices: tuple[Vector, ...]
    outer_facets: tuple[OuterFacet, ...]
    cones: tuple[Cone, ...]
    pi: Polynomial = field(compare=False)

    @property
    def rank(self) -> int:
        return self.polytope.rank

    @property
    def halfspaces(self) -> list[HalfSpace]:
        return self.polytope.halfspaces + list(self.walls)

    @property
    def simplices(self) -> list[Simplex]:
        """Interior triangulation: every cone simplex, in cone order."""
        return [s for cone in self.cones for s in cone.simplices]

    @cached_property
    def volume(self) -> Fraction:
        """Coordinate volume of 2P₊."""
        return sum((cone.volume for cone in self.cones), Fraction(0))

    def contains(self, y: Vector) -> bool:
        return self.polytope.contains(y) and all(
            linalg.dot(a, y) <= b for a, b in self.walls
        )

    def edges(self) -> list[tuple[Vector, Vector]]:
        """Edges of 2P₊ as vertex pairs (rank 2 only)."""
        if self.rank != 2:
            raise ValueError("Edges are only listed for rank-2 chambers")
        result = []
        for halfspace in self.halfspaces:
            tight = tight_set(self.vertices, halfspace)
            if linalg.affine_rank(tight) == 1:
                pair = (tight[0], tight[-1])
                if pair not in result:
                    result.append(pair)
        return sorted(result)


def restrict_to_chamber(polytope: Polytope, rs: RootSystem) -> ChamberPolytope:
    """Cut 2P down to 2P₊ and build the outer-facet and cone decomposition.

    Raises:
        NotWInvariant: If 2P is not invariant under the Weyl group
        InvalidPolytope: If the cones fail to tile 2P₊
    """
    if not polytope.w_invariant:
        check_w_invariance(polytope, rs)
    rank = polytope.rank
    walls = tuple(
        (linalg.scale(-1, covector), Fraction(0)) for covector in
        (rs.lower(alpha) for alpha in rs.simple_roots)
    )
    halfspaces = polytope.halfspaces + list(walls)
    vertices = enumerate_vertices(halfspaces, rank)

    outer: list[OuterFacet] = []
    for index, facet in enumerate(polytope.facets):
        tight = tight_set(vertices, facet.halfspace)
        if linalg.affine_rank(tight) != rank - 1:
            continue
        simplices = triangulate(tight, halfspaces, "centroid")
        outer.append(
            OuterFacet(
                index=index, facet=facet, vertices=tight, simplices=tuple(simplices)
            )
        )

    origin = linalg.zeros(rank)
    cones = tuple(
        Cone(facet=f, simplices=tuple((origin, *s) for s in f.simplices)) for f in outer
    )

    reference = triangulate(vertices, halfspaces, "centroid")
    reference_volume = sum((simplex_volume(s) for s in reference), Fraction(0))
    cone_volume = sum((c.volume for c in cones), Fraction(0))
    if cone_volume != reference_volume:
        raise InvalidPolytope(
            "Cones over the outer facets do not tile the chamber polytope",
            cone_volume=cone_volume,
            chamber_volume=reference_volume,
        )
    logger.debug(
        "Chamber polytope: %d vertices, %d outer facets, %d cone simplices",
        len(vertices),
        len(outer),
        sum(len(c.simplices) for c in cones),
    )
    return ChamberPolytope(
        polytope=polytope,
        root_system=rs,
        walls=walls,
        vertices=tuple(vertices),
        outer_facets=tuple(outer),
        cones=cones,
        pi=weight_pi(rs),
    )


__all__ = [
    "ChamberPolytope",
    "Cone",
    "NotWInvariant",
    "OuterFacet",
    "restrict_to_chamber",
    "weight_pi",
]
