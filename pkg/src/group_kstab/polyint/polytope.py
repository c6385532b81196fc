"""Polytopes in half-space form: vertices, faces and exact triangulations.

A half-space is a pair ``(a, b)`` meaning ``a·y ≤ b``. A facet of 2P with
normal ``u`` and constant ``λ`` is the half-space ``(u, λ)``, i.e.
``l(y) = λ − u·y ≥ 0``.
"""

from __future__ import annotations

import itertools
import logging
import math

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Literal

from group_kstab import linalg
from group_kstab.errors import ValidationError
from group_kstab.linalg import RationalLike, Vector

if TYPE_CHECKING:
    from group_kstab.rootdata import RootSystem

logger = logging.getLogger(__name__)

HalfSpace = tuple[Vector, Fraction]
Simplex = tuple[Vector, ...]
Apex = Literal["centroid", "first_vertex"]


class PolyintError(ValidationError):
    """Base exception for polytope and integration errors."""

    module = "polyint"


class InvalidPolytope(PolyintError):
    """Raised for malformed facet data (shape, non-primitive or redundant normals)."""

    pass


class OriginNotInterior(PolyintError):
    """Raised when some facet constant λ is not strictly positive."""

    pass


class Unbounded(PolyintError):
    """Raised when the half-spaces do not cut out a bounded polytope."""

    pass


class NotWInvariant(PolyintError):
    """Raised when a Weyl element maps a facet to a non-facet."""

    pass


@dataclass(frozen=True)
class Facet:
    """Facet l(y) = λ − u·y ≥ 0 of 2P."""

    normal: tuple[int, ...]
    offset: Fraction

    @property
    def covector(self) -> Vector:
        return tuple(Fraction(x) for x in self.normal)

    @property
    def halfspace(self) -> HalfSpace:
        return self.covector, self.offset

    def value(self, y: Sequence[Fraction]) -> Fraction:
        return self.offset - linalg.dot(self.covector, y)


@dataclass(frozen=True)
class Polytope:
    """Bounded polytope 2P with the origin in its interior."""

    rank: int
    facets: tuple[Facet, ...]
    vertices: tuple[Vector, ...]
    w_invariant: bool = False

    @property
    def halfspaces(self) -> list[HalfSpace]:
        return [f.halfspace for f in self.facets]

    def contains(self, y: Sequence[Fraction]) -> bool:
        return all(f.value(y) >= 0 for f in self.facets)

    def diameter(self) -> float:
        points = [linalg.as_float_array(v) for v in self.vertices]
        return max(
            (float(sum((p - q) ** 2)) ** 0.5 for p, q in itertools.combinations(points, 2)),
            default=0.0,
        )


def enumerate_vertices(halfspaces: Sequence[HalfSpace], dim: int) -> list[Vector]:
    """All feasible intersection points of ``dim`` independent hyperplanes.

    Exhaustive over ``dim``-subsets; fine for small dimension and a few
    dozen half-spaces. Output is sorted and duplicate free.
    """
    if dim == 0:
        feasible = all(b >= 0 for _, b in halfspaces)
        return [()] if feasible else []
    found: set[Vector] = set()
    for subset in itertools.combinations(range(len(halfspaces)), dim):
        rows = [halfspaces[i][0] for i in subset]
        if linalg.rank(rows) < dim:
            continue
        point = linalg.solve(rows, [halfspaces[i][1] for i in subset])
        if all(linalg.dot(a, point) <= b for a, b in halfspaces):
            found.add(point)
    return sorted(found)


def tight_set(
    points: Sequence[Vector], halfspace: HalfSpace
) -> tuple[Vector, ...]:
    a, b = halfspace
    return tuple(p for p in points if linalg.dot(a, p) == b)


def centroid(points: Sequence[Vector]) -> Vector:
    total = linalg.zeros(len(points[0]))
    for p in points:
        total = linalg.add(total, p)
    return linalg.scale(Fraction(1, len(points)), total)


def faces(
    points: Sequence[Vector], halfspaces: Sequence[HalfSpace]
) -> list[tuple[Vector, ...]]:
    """Codimension-one faces of conv(points), each as its sorted vertex tuple."""
    dim = linalg.affine_rank(points)
    seen: dict[tuple[Vector, ...], None] = {}
    for halfspace in halfspaces:
        tight = tight_set(points, halfspace)
        if len(tight) < len(points) and linalg.affine_rank(tight) == dim - 1:
            seen[tuple(sorted(tight))] = None
    return list(seen)


def triangulate(
    points: Sequence[Vector],
    halfspaces: Sequence[HalfSpace],
    apex: Apex | Vector = "centroid",
) -> list[Simplex]:
    """Triangulate conv(points) by recursive coning over its faces.

    ``points`` must be the vertex set of a polytope cut out by ``halfspaces``.
    ``apex`` selects the cone point at the top level: the vertex centroid, the
    first vertex, or an explicit point of the polytope. Faces are always
    coned from their centroid.
    """
    points = sorted(set(points))
    dim = linalg.affine_rank(points)
    if dim <= 0:
        return [(points[0],)] if points else []
    if dim == 1:
        a, b = points[0], points[-1]
        if apex == "centroid" or apex == "first_vertex":
            return [(a, b)]
        return [s for s in ((a, tuple(apex)), (tuple(apex), b)) if s[0] != s[1]]
    if apex == "centroid":
        cone_point = centroid(points)
    elif apex == "first_vertex":
        cone_point = points[0]
    else:
        cone_point = tuple(apex)
    simplices: list[Simplex] = []
    for face in faces(points, halfspaces):
        if linalg.affine_rank(list(face) + [cone_point]) == dim - 1:
            continue
        for sub in triangulate(face, halfspaces, "centroid"):
            simplices.append((cone_point, *sub))
    return simplices


def simplex_volume(simplex: Simplex) -> Fraction:
    """Coordinate volume of a full-dimensional simplex."""
    base = simplex[0]
    edges = [linalg.sub(v, base) for v in simplex[1:]]
    return abs(linalg.determinant(edges)) / math.factorial(len(edges))


def _primitive_normal(values: Sequence[RationalLike], index: int) -> tuple[int, ...]:
    normal = linalg.vector(values)
    if any(x.denominator != 1 for x in normal):
        raise InvalidPolytope(f"Facet {index} normal must be an integer vector")
    ints = tuple(int(x) for x in normal)
    if all(x == 0 for x in ints):
        raise InvalidPolytope(f"Facet {index} normal is zero")
    if math.gcd(*ints) != 1:
        raise InvalidPolytope(
            f"Facet {index} normal {list(ints)} is not primitive", facet=index
        )
    return ints


def _check_bounded(halfspaces: Sequence[HalfSpace], rank: int) -> list[Vector]:
    vertices = enumerate_vertices(halfspaces, rank)
    if linalg.affine_rank(vertices) < rank:
        raise Unbounded("Facets do not cut out a full-dimensional bounded polytope")
    box = 1 + max(abs(x) for v in vertices for x in v)
    boxed = list(halfspaces)
    for k in range(rank):
        e = tuple(Fraction(int(j == k)) for j in range(rank))
        boxed.append((e, box))
        boxed.append((linalg.scale(-1, e), box))
    for v in enumerate_vertices(boxed, rank):
        if any(abs(x) == box for x in v):
            raise Unbounded("Facets leave the polytope unbounded", vertex=list(v))
    return vertices


def check_w_invariance(polytope: Polytope, rs: RootSystem) -> None:
    """Raise NotWInvariant unless every wᵀu is again a facet with the same λ."""
    lookup = {f.covector: f.offset for f in polytope.facets}
    for w in rs.weyl_group:
        for index, facet in enumerate(polytope.facets):
            image = rs.act_covector(w, facet.covector)
            if lookup.get(image) != facet.offset:
                raise NotWInvariant(
                    f"Weyl element maps facet {index} to a non-facet",
                    facet=index,
                    weyl_element=[list(row) for row in w],
                    image=list(image),
                )


def build_polytope(
    rank: int,
    facets: Sequence[tuple[Sequence[RationalLike], RationalLike]],
    *,
    root_system: RootSystem | None = None,
    vertices: Sequence[Sequence[RationalLike]] | None = None,
) -> Polytope:
    """Validate facet data and enumerate vertices.

    Args:
        rank: Ambient dimension r
        facets: Pairs (u, λ) with u a primitive integer covector and λ > 0
        root_system: When given, W-invariance is verified exactly
        vertices: Optional expected vertex set, checked against enumeration

    Raises:
        InvalidPolytope: Bad shapes, non-primitive normals, duplicate or
            redundant facets, or a vertex list that does not match
        OriginNotInterior: If some λ ≤ 0
        Unbounded: If the facets do not bound a full-dimensional polytope
        NotWInvariant: If root_system is given and a facet orbit is missing
    """
    parsed: list[Facet] = []
    for index, (normal, offset) in enumerate(facets):
        if len(normal) != rank:
            raise InvalidPolytope(f"Facet {index} normal must have {rank} entries")
        ints = _primitive_normal(normal, index)
        try:
            lam = linalg.parse_rational(offset)
        except ValueError as e:
            raise InvalidPolytope(str(e), facet=index) from e
        if lam <= 0:
            raise OriginNotInterior(
                f"Facet {index} has λ = {lam}; the origin must be interior",
                facet=index,
            )
        parsed.append(Facet(normal=ints, offset=lam))
    if len({f.normal for f in parsed}) != len(parsed):
        raise InvalidPolytope("Duplicate facet normals")

    halfspaces = [f.halfspace for f in parsed]
    found = _check_bounded(halfspaces, rank)
    for index, facet in enumerate(parsed):
        if linalg.affine_rank(tight_set(found, facet.halfspace)) != rank - 1:
            raise InvalidPolytope(
                f"Facet {index} does not support a face of dimension {rank - 1}",
                facet=index,
            )
    if vertices is not None:
        expected = sorted({linalg.vector(v) for v in vertices})
        if expected != found:
            raise InvalidPolytope(
                "Listed vertices do not match the facet description",
                expected=[list(v) for v in expected],
                enumerated=[list(v) for v in found],
            )

    polytope = Polytope(rank=rank, facets=tuple(parsed), vertices=tuple(found))
    logger.debug("Built polytope with %d facets, %d vertices", len(parsed), len(found))
    if root_system is None:
        return polytope
    if root_system.rank != rank:
        raise InvalidPolytope("Polytope rank does not match the root system rank")
    check_w_invariance(polytope, root_system)
    return Polytope(
        rank=rank, facets=polytope.facets, vertices=polytope.vertices, w_invariant=True
    )


def full_triangulation(polytope: Polytope, apex: Apex = "centroid") -> list[Simplex]:
    """Triangulation of all of 2P."""
    return triangulate(polytope.vertices, polytope.halfspaces, apex)
