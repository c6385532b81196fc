"""Exact polytope invariants: V, Λ_A, S̄, barycenters and the Futaki invariant."""

from __future__ import annotations

import logging

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from group_kstab import linalg
from group_kstab.criteria.plfunction import CriteriaError
from group_kstab.linalg import Vector
from group_kstab.polyint.chamber import ChamberPolytope
from group_kstab.polyint.integrate import moments
from group_kstab.rootdata import RootSystem

logger = logging.getLogger(__name__)


class ZeroVolume(CriteriaError):
    """Raised when a π-weighted volume used as a denominator vanishes."""

    pass


class NotToricDirection(CriteriaError):
    """Raised when a Futaki direction has a nonzero semisimple component."""

    pass


@dataclass(frozen=True)
class ChamberInvariants:
    """Every exact quantity the verdicts are built from."""

    n: int
    volume: Fraction
    cone_masses: tuple[Fraction, ...]
    cone_first_moments: tuple[Vector, ...]
    lambdas: tuple[Fraction, ...]
    weighted_mass: Fraction
    sbar: Fraction
    bar: Vector
    bar_tilde: Vector
    fano_normalized: bool

    @property
    def min_lambda(self) -> Fraction:
        return min(self.lambdas)


def facet_lambda(rs: RootSystem, normal: Vector, offset: Fraction) -> Fraction:
    """Λ_A = (2/λ_A)(1 + 2ρ·u_A), coordinate pairing of ρ with u_A."""
    return 2 / offset * (1 + 2 * linalg.dot(rs.rho, normal))


def fano_offset(rs: RootSystem, normal: Vector) -> Fraction:
    """The λ_A that makes Λ_A = 1."""
    return 2 * (1 + 2 * linalg.dot(rs.rho, normal))


@lru_cache(maxsize=32)
def chamber_invariants(cp: ChamberPolytope, rs: RootSystem) -> ChamberInvariants:
    """Integrate π and yπ over every cone once and derive the invariants.

    Raises:
        ZeroVolume: If ∫π or Σ_A Λ_A ∫_{E_A} π vanishes
    """
    masses: list[Fraction] = []
    firsts: list[Vector] = []
    for cone in cp.cones:
        mass, first = moments(cp.pi, cone)
        masses.append(mass)
        firsts.append(first)
    volume = sum(masses, Fraction(0))
    if volume == 0:
        raise ZeroVolume("∫π over the chamber polytope vanishes")
    lams = tuple(facet_lambda(rs, f.normal, f.offset) for f in cp.outer_facets)
    weighted = sum((lam * m for lam, m in zip(lams, masses, strict=True)), Fraction(0))
    if weighted == 0:
        raise ZeroVolume("Σ Λ_A ∫_{E_A} π vanishes")

    first_total = linalg.zeros(cp.rank)
    weighted_first = linalg.zeros(cp.rank)
    for lam, first in zip(lams, firsts, strict=True):
        first_total = linalg.add(first_total, first)
        weighted_first = linalg.add(weighted_first, linalg.scale(lam, first))

    fano = all(
        f.offset == fano_offset(rs, f.normal) for f in cp.outer_facets
    )
    invariants = ChamberInvariants(
        n=rs.n,
        volume=volume,
        cone_masses=tuple(masses),
        cone_first_moments=tuple(firsts),
        lambdas=lams,
        weighted_mass=weighted,
        sbar=rs.n * weighted / volume,
        bar=linalg.scale(1 / volume, first_total),
        bar_tilde=linalg.scale(1 / weighted, weighted_first),
        fano_normalized=fano,
    )
    logger.debug("V = %s, S̄ = %s, bar = %s", volume, invariants.sbar, invariants.bar)
    return invariants


def volume(cp: ChamberPolytope, rs: RootSystem) -> Fraction:
    """V = ∫_{2P₊} π dy."""
    return chamber_invariants(cp, rs).volume


def lambdas(cp: ChamberPolytope, rs: RootSystem) -> tuple[Fraction, ...]:
    return chamber_invariants(cp, rs).lambdas


def sbar(cp: ChamberPolytope, rs: RootSystem) -> Fraction:
    """S̄ = n Σ_A Λ_A ∫_{E_A} π / ∫_{2P₊} π."""
    return chamber_invariants(cp, rs).sbar


def barycenters(cp: ChamberPolytope, rs: RootSystem) -> tuple[Vector, Vector]:
    invariants = chamber_invariants(cp, rs)
    return invariants.bar, invariants.bar_tilde


def four_rho(rs: RootSystem) -> Vector:
    return linalg.scale(4, rs.rho)


def is_fano_normalized(cp: ChamberPolytope, rs: RootSystem) -> bool:
    return chamber_invariants(cp, rs).fano_normalized


def futaki_vector(cp: ChamberPolytope, rs: RootSystem) -> Vector:
    """b̃ − n/(n+1)·bar, whose toric part governs the Futaki invariant."""
    invariants = chamber_invariants(cp, rs)
    n = invariants.n
    return linalg.sub(
        invariants.bar_tilde, linalg.scale(Fraction(n, n + 1), invariants.bar)
    )


def futaki_toric_vector(cp: ChamberPolytope, rs: RootSystem) -> Vector:
    return rs.split(futaki_vector(cp, rs))[0]


def futaki(cp: ChamberPolytope, rs: RootSystem, v: Vector) -> Fraction:
    """F(v) = ℒ(l_v)/V = (n+1)(Σ_A Λ_A ∫_{E_A} π)⟨b̃ − n/(n+1)·bar, v⟩ / V.

    Raises:
        NotToricDirection: If v has a nonzero component in 𝔞*_ss
    """
    v = linalg.vector(v)
    _, v_ss = rs.split(v)
    if any(x != 0 for x in v_ss):
        raise NotToricDirection(
            "Futaki directions must lie in the toric part",
            semisimple_component=list(v_ss),
        )
    invariants = chamber_invariants(cp, rs)
    pairing = rs.inner(futaki_vector(cp, rs), v)
    return (invariants.n + 1) * invariants.weighted_mass * pairing / invariants.volume


def xi_rays(rs: RootSystem) -> tuple[Vector, ...]:
    """Extreme rays of the closed cone Ξ̄ (the simple roots)."""
    return rs.simple_roots
