"""Exact evaluation of the linear part ℒ of the reduced K-energy.

Three equivalent forms are implemented:

``cone``
    Σ_A ∫_{E_A} [⟨Λ_A y − 4ρ, ∇u⟩ + (Λ_A n − S̄) u] π dy
``boundary``
    2 Σ_A ∫_{F_A} u π dμ_F − S̄ ∫ u π dy + 4 ∫ u ⟨ρ, ∇π⟩ dy
``definition``
    Σ_A Λ_A ∫_{F_A} ⟨y, ν_A⟩ u π dσ₀ − S̄ ∫ u π dy − 4 ∫ ⟨ρ, ∇u⟩ π dy

plus ``fano``, ∫ ⟨y − 4ρ, ∇u⟩ π dy, valid when every Λ_A = 1. Test
functions are convex PL functions or exact polynomials.
"""

from __future__ import annotations

import logging

from collections.abc import Sequence
from fractions import Fraction
from typing import Literal, Union

from group_kstab import linalg
from group_kstab.criteria.invariants import chamber_invariants
from group_kstab.criteria.plfunction import (
    AffinePiece,
    CriteriaError,
    PLConvexFunction,
    piece_regions,
)
from group_kstab.linalg import Vector
from group_kstab.polyint.chamber import ChamberPolytope
from group_kstab.polyint.integrate import integrate, simplex_moments
from group_kstab.polyint.polynomial import Polynomial
from group_kstab.polyint.polytope import Simplex
from group_kstab.rootdata import RootSystem

logger = logging.getLogger(__name__)

Route = Literal["cone", "boundary", "definition", "fano"]
TestFunction = Union[PLConvexFunction, Polynomial]

ROUTES: tuple[Route, ...] = ("cone", "boundary", "definition", "fano")


def _pl_moments(
    u: PLConvexFunction,
    simplices: Sequence[Simplex],
    weight: Polynomial,
    normal: Vector | None = None,
) -> list[tuple[AffinePiece, Fraction, Vector]]:
    """(piece, ∫ weight, ∫ y·weight) over each max-region, in simplex order."""
    result = []
    for simplex in simplices:
        for piece, region in piece_regions(u, simplex):
            mass = Fraction(0)
            first = linalg.zeros(len(simplex[0]))
            for sub in region:
                m, y = simplex_moments(weight, sub, normal)
                mass += m
                first = linalg.add(first, y)
            result.append((piece, mass, first))
    return result


def _affine_integral(piece: AffinePiece, mass: Fraction, first: Vector) -> Fraction:
    return linalg.dot(piece.gradient, first) + piece.offset * mass


def _pl_cone(cp: ChamberPolytope, rs: RootSystem, u: PLConvexFunction) -> Fraction:
    inv = chamber_invariants(cp, rs)
    total = Fraction(0)
    for lam, cone in zip(inv.lambdas, cp.cones, strict=True):
        for piece, mass, first in _pl_moments(u, cone.simplices, cp.pi):
            total += lam * linalg.dot(piece.gradient, first)
            total -= 4 * linalg.dot(rs.rho, piece.gradient) * mass
            total += (lam * inv.n - inv.sbar) * _affine_integral(piece, mass, first)
    return total


def _pl_facet_terms(cp: ChamberPolytope, u: PLConvexFunction) -> list[Fraction]:
    """∫_{F_A} u π dμ_F per outer facet."""
    values = []
    for facet in cp.outer_facets:
        values.append(
            sum(
                (
                    _affine_integral(piece, mass, first)
                    for piece, mass, first in _pl_moments(
                        u, facet.simplices, cp.pi, facet.normal
                    )
                ),
                Fraction(0),
            )
        )
    return values


def _pl_interior(
    cp: ChamberPolytope, rs: RootSystem, u: PLConvexFunction
) -> tuple[Fraction, Fraction, Fraction]:
    """(∫ u π, ∫ ⟨ρ, ∇u⟩ π, ∫ u ⟨ρ, ∇π⟩) over 2P₊."""
    u_pi = Fraction(0)
    rho_grad = Fraction(0)
    for piece, mass, first in _pl_moments(u, cp.simplices, cp.pi):
        u_pi += _affine_integral(piece, mass, first)
        rho_grad += linalg.dot(rs.rho, piece.gradient) * mass
    rho_pi = cp.pi.directional_derivative(rs.rho)
    u_rho_pi = sum(
        (
            _affine_integral(piece, mass, first)
            for piece, mass, first in _pl_moments(u, cp.simplices, rho_pi)
        ),
        Fraction(0),
    )
    return u_pi, rho_grad, u_rho_pi


def _pl_linear(
    cp: ChamberPolytope, rs: RootSystem, u: PLConvexFunction, route: Route
) -> Fraction:
    inv = chamber_invariants(cp, rs)
    if route == "cone":
        return _pl_cone(cp, rs, u)
    if route == "fano":
        total = Fraction(0)
        for piece, mass, first in _pl_moments(u, cp.simplices, cp.pi):
            total += linalg.dot(piece.gradient, first)
            total -= 4 * linalg.dot(rs.rho, piece.gradient) * mass
        return total
    facet_terms = _pl_facet_terms(cp, u)
    u_pi, rho_grad, u_rho_pi = _pl_interior(cp, rs, u)
    if route == "boundary":
        return 2 * sum(facet_terms, Fraction(0)) - inv.sbar * u_pi + 4 * u_rho_pi
    boundary = sum(
        (
            lam * facet.offset * term
            for lam, facet, term in zip(inv.lambdas, cp.outer_facets, facet_terms, strict=True)
        ),
        Fraction(0),
    )
    return boundary - inv.sbar * u_pi - 4 * rho_grad


def _euler(u: Polynomial) -> Polynomial:
    """Σ_i y_i ∂_i u."""
    result = Polynomial(u.nvars)
    for i in range(u.nvars):
        result = result + Polynomial.variable(u.nvars, i) * u.derivative(i)
    return result


def _polynomial_linear(
    cp: ChamberPolytope, rs: RootSystem, u: Polynomial, route: Route
) -> Fraction:
    inv = chamber_invariants(cp, rs)
    pi = cp.pi
    rho_grad = u.directional_derivative(rs.rho)
    if route == "cone":
        total = Fraction(0)
        euler = _euler(u)
        for lam, cone in zip(inv.lambdas, cp.cones, strict=True):
            integrand = (euler * lam - rho_grad * 4 + u * (lam * inv.n - inv.sbar)) * pi
            total += integrate(integrand, cone)
        return total
    if route == "fano":
        return integrate((_euler(u) - rho_grad * 4) * pi, cp)
    u_pi = integrate(u * pi, cp)
    facet_terms = [integrate(u * pi, facet) for facet in cp.outer_facets]
    if route == "boundary":
        u_rho_pi = integrate(u * pi.directional_derivative(rs.rho), cp)
        return 2 * sum(facet_terms, Fraction(0)) - inv.sbar * u_pi + 4 * u_rho_pi
    boundary = sum(
        (
            lam * facet.offset * term
            for lam, facet, term in zip(inv.lambdas, cp.outer_facets, facet_terms, strict=True)
        ),
        Fraction(0),
    )
    return boundary - inv.sbar * u_pi - 4 * integrate(rho_grad * pi, cp)


def linear_functional(
    cp: ChamberPolytope, rs: RootSystem, u: TestFunction, route: Route = "cone"
) -> Fraction:
    """Exact ℒ(u) for a convex PL function or a polynomial.

    Raises:
        CriteriaError: If ``route="fano"`` is requested on a polytope that is
            not Fano-normalized, or the route is unknown
        NonConvexPieces: If PL region slicing fails to tile a simplex
    """
    if route not in ROUTES:
        raise CriteriaError(f"Unknown route {route!r}", routes=list(ROUTES))
    if route == "fano" and not chamber_invariants(cp, rs).fano_normalized:
        raise CriteriaError("The Fano form of ℒ needs a Fano-normalized polytope")
    if isinstance(u, Polynomial):
        return _polynomial_linear(cp, rs, u, route)
    value = _pl_linear(cp, rs, u, route)
    logger.debug("ℒ(%s) via %s = %s", u.label or "u", route, value)
    return value


def linear_form_value(cp: ChamberPolytope, rs: RootSystem, v: Vector) -> Fraction:
    """ℒ(l_v) for an arbitrary weight v, from the closed form.

    (n+1) Σ_A Λ_A ∫_{E_A} π ⟨b̃, v⟩ − n K ⟨bar, v⟩ − 4 V ⟨ρ, v⟩ with
    K = Σ_A Λ_A ∫_{E_A} π = S̄ V / n.
    """
    inv = chamber_invariants(cp, rs)
    k = inv.weighted_mass
    return (
        (inv.n + 1) * k * rs.inner(inv.bar_tilde, v)
        - inv.n * k * rs.inner(inv.bar, v)
        - 4 * inv.volume * rs.inner(rs.rho, v)
    )
