"""Exact rational integration of polynomials over simplices and chamber regions.

Full-dimensional regions use Lebesgue measure dy. Outer facets use the
coordinate facet measure dμ_F defined by dy = dμ_F d(u·y); the gram-induced
surface measure is dσ₀ = |u|_{G*} dμ_F and ⟨y, ν⟩ dσ₀ = (u·y) dμ_F, so
every ⟨y, ν⟩-weighted facet integral stays rational.
"""

from __future__ import annotations

import logging

from collections.abc import Sequence
from fractions import Fraction
from typing import Union

from group_kstab import linalg
from group_kstab.linalg import Vector
from group_kstab.polyint.chamber import ChamberPolytope, Cone, OuterFacet
from group_kstab.polyint.polynomial import Polynomial, standard_simplex_integral
from group_kstab.polyint.polytope import PolyintError, Simplex
from group_kstab.utils import ordered_map

logger = logging.getLogger(__name__)

Region = Union[ChamberPolytope, Cone, OuterFacet]


class RegionEmpty(PolyintError):
    """Raised when a region has no simplices or zero measure."""

    pass


def simplex_factor(simplex: Simplex, normal: Sequence[Fraction] | None = None) -> Fraction:
    """Jacobian of s ↦ v0 + Σ s_j (v_j − v0) for the region's measure.

    With ``normal`` the simplex lies in a facet hyperplane and the factor is
    |det[edges, u/(u·u)]|; otherwise it is |det[edges]|.
    """
    base = simplex[0]
    edges = [linalg.sub(v, base) for v in simplex[1:]]
    if normal is not None:
        u = tuple(normal)
        edges.append(linalg.scale(1 / linalg.dot(u, u), u))
    if not edges:
        return Fraction(1)
    return abs(linalg.determinant(edges))


def integrate_simplex(
    f: Polynomial, simplex: Simplex, normal: Sequence[Fraction] | None = None
) -> Fraction:
    """∫_Δ f exactly via the barycentric monomial formula."""
    factor = simplex_factor(simplex, normal)
    if factor == 0:
        return Fraction(0)
    base = simplex[0]
    columns = [linalg.sub(v, base) for v in simplex[1:]]
    return factor * standard_simplex_integral(f.compose_affine(base, columns))


def simplex_moments(
    f: Polynomial, simplex: Simplex, normal: Sequence[Fraction] | None = None
) -> tuple[Fraction, Vector]:
    """(∫_Δ f, ∫_Δ y f) with one affine composition."""
    rank = len(simplex[0])
    factor = simplex_factor(simplex, normal)
    if factor == 0:
        return Fraction(0), linalg.zeros(rank)
    base = simplex[0]
    columns = [linalg.sub(v, base) for v in simplex[1:]]
    composed = f.compose_affine(base, columns)
    mass = factor * standard_simplex_integral(composed)
    first = []
    for i in range(rank):
        coordinate = Polynomial.linear(tuple(col[i] for col in columns), base[i])
        first.append(factor * standard_simplex_integral(coordinate * composed))
    return mass, tuple(first)


def _region_simplices(region: Region) -> tuple[list[Simplex], Vector | None]:
    if isinstance(region, ChamberPolytope):
        return region.simplices, None
    if isinstance(region, Cone):
        return list(region.simplices), None
    return list(region.simplices), region.normal


def integrate(f: Polynomial, region: Region, *, threads: int | None = None) -> Fraction:
    """Exact ∫ f over the chamber, a cone E_A, or an outer facet F_A (dμ_F).

    Raises:
        RegionEmpty: If the region carries no simplices
    """
    simplices, normal = _region_simplices(region)
    if not simplices:
        raise RegionEmpty("Cannot integrate over an empty region")
    values = ordered_map(lambda s: integrate_simplex(f, s, normal), simplices, threads)
    return sum(values, Fraction(0))


def moments(f: Polynomial, region: Region, *, threads: int | None = None) -> tuple[Fraction, Vector]:
    """(∫ f, ∫ y f) over a region, summed in triangulation order."""
    simplices, normal = _region_simplices(region)
    if not simplices:
        raise RegionEmpty("Cannot integrate over an empty region")
    rank = len(simplices[0][0])
    mass = Fraction(0)
    first = linalg.zeros(rank)
    for m, y in ordered_map(lambda s: simplex_moments(f, s, normal), simplices, threads):
        mass += m
        first = linalg.add(first, y)
    return mass, first


def integrate_y_nu(f: Polynomial, facet: OuterFacet) -> Fraction:
    """∫_{F_A} ⟨y, ν_A⟩ f dσ₀ = λ_A ∫_{F_A} f dμ_F, exact."""
    return facet.offset * integrate(f, facet)


def integrate_facet_sigma(
    f: Polynomial, facet: OuterFacet, gram: tuple[Vector, ...]
) -> float:
    """∫_{F_A} f dσ₀ in the gram-induced surface measure (float)."""
    return facet.sigma_scale(gram) * float(integrate(f, facet))

