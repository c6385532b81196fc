"""Verdicts: Kähler–Einstein test, properness test and destabilizer search."""

from __future__ import annotations

import logging

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

from group_kstab import linalg
from group_kstab.criteria.functional import linear_functional
from group_kstab.criteria.invariants import (
    chamber_invariants,
    four_rho,
    futaki_toric_vector,
    futaki_vector,
)
from group_kstab.criteria.plfunction import PLConvexFunction
from group_kstab.linalg import Vector
from group_kstab.polyint.chamber import ChamberPolytope
from group_kstab.rootdata import ChamberCertificate, RootSystem, chamber_membership

logger = logging.getLogger(__name__)

TORUS_CONVENTION_WARNING = (
    "No roots: Ξ = {0}, so the barycenter condition reads bar = 0 and the "
    "tildebar1 condition is vacuous"
)


class KEVerdict(str, Enum):
    YES = "yes"
    NO = "no"
    NOT_APPLICABLE = "not-applicable"


class ProperVerdict(str, Enum):
    PROPER = "proper"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Destabilizer:
    """W-invariant convex PL function with ℒ(u) ≤ 0."""

    function: PLConvexFunction
    value: Fraction
    kind: str
    index: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "index": self.index,
            "function": self.function.to_dict(),
            "L": linalg.rational_record(self.value),
        }


@dataclass(frozen=True)
class KEResult:
    verdict: KEVerdict
    certificate: ChamberCertificate
    margin: Fraction | None = None
    destabilizer: Destabilizer | None = None


@dataclass(frozen=True)
class ProperResult:
    verdict: ProperVerdict
    flags: dict[str, bool]
    certificates: dict[str, ChamberCertificate] = field(default_factory=dict)


def _bar_shift(cp: ChamberPolytope, rs: RootSystem) -> Vector:
    return linalg.sub(chamber_invariants(cp, rs).bar, four_rho(rs))


def destabilizer(cp: ChamberPolytope, rs: RootSystem) -> Destabilizer | None:
    """First violated direction of bar − 4ρ ∈ Ξ, as a PL function with ℒ ≤ 0.

    A nonpositive simple-root coefficient c_i gives u = max_w ⟨w·ϖ_i, y⟩ with
    ℒ(u) = V⟨bar − 4ρ, ϖ_i⟩. Otherwise a nonzero toric part gives l_v with
    v = −(bar − 4ρ)_t and ℒ(l_v) = −V⟨bar_t, bar_t⟩. Returns None when
    bar − 4ρ ∈ Ξ or the polytope is not Fano-normalized.
    """
    if not chamber_invariants(cp, rs).fano_normalized:
        logger.debug("Destabilizer search skipped: polytope is not Fano-normalized")
        return None
    shift = _bar_shift(cp, rs)
    v_t, v_ss = rs.split(shift)
    if not rs.is_torus:
        for index, c in enumerate(rs.simple_coefficients(v_ss)):
            if c <= 0:
                u = PLConvexFunction.weyl_orbit_max(
                    rs, rs.fundamental_weights[index], label=f"weyl_orbit_max[{index + 1}]"
                )
                return Destabilizer(
                    function=u,
                    value=linear_functional(cp, rs, u),
                    kind="fundamental_weight",
                    index=index + 1,
                )
    if any(x != 0 for x in v_t):
        v = linalg.scale(-1, v_t)
        u = PLConvexFunction.toric_linear(rs, v)
        return Destabilizer(
            function=u, value=linear_functional(cp, rs, u), kind="toric"
        )
    return None


def verdict_ke_fano(cp: ChamberPolytope, rs: RootSystem) -> KEResult:
    """KE exists iff bar − 4ρ ∈ Ξ, for Fano-normalized polytopes only."""
    shift = _bar_shift(cp, rs)
    certificate = chamber_membership(rs, shift, "interior_Xi")
    if not chamber_invariants(cp, rs).fano_normalized:
        return KEResult(verdict=KEVerdict.NOT_APPLICABLE, certificate=certificate)
    if certificate.holds:
        return KEResult(
            verdict=KEVerdict.YES,
            certificate=certificate,
            margin=rs.xi_margin(shift),
        )
    return KEResult(
        verdict=KEVerdict.NO,
        certificate=certificate,
        destabilizer=destabilizer(cp, rs),
    )


def verdict_properness(cp: ChamberPolytope, rs: RootSystem) -> ProperResult:
    """Evaluate the sufficient conditions for properness of the K-energy.

    Never returns "not proper": a failed flag only makes the verdict
    inconclusive.
    """
    inv = chamber_invariants(cp, rs)
    min_lambda = inv.min_lambda
    tilde_ss = rs.split(inv.bar_tilde)[1]
    bar_ss = rs.split(inv.bar)[1]
    tilde1 = chamber_membership(
        rs, linalg.sub(linalg.scale(min_lambda, tilde_ss), four_rho(rs)), "interior_Xi"
    )
    tilde2 = chamber_membership(rs, linalg.sub(tilde_ss, bar_ss), "closure_Xi")
    flags = {
        "tildebar1": tilde1.holds,
        "tildebar2": tilde2.holds,
        "barS": (inv.n + 1) * min_lambda - inv.sbar > 0,
        "futaki_vanishes": all(x == 0 for x in futaki_toric_vector(cp, rs)),
    }
    verdict = ProperVerdict.PROPER if all(flags.values()) else ProperVerdict.INCONCLUSIVE
    return ProperResult(
        verdict=verdict,
        flags=flags,
        certificates={"tildebar1": tilde1, "tildebar2": tilde2},
    )


def _certificate_dict(certificate: ChamberCertificate) -> dict[str, Any]:
    return {
        "mode": certificate.mode,
        "holds": certificate.holds,
        "coefficients": (
            None
            if certificate.coefficients is None
            else linalg.vector_record(certificate.coefficients)
        ),
        "violated": certificate.violated,
        "violated_value": (
            None
            if certificate.violated_value is None
            else linalg.rational_record(certificate.violated_value)
        ),
        "degenerate": certificate.degenerate,
    }


@dataclass(frozen=True)
class AnalysisReport:
    """All exact invariants, flags and verdicts of one chamber polytope."""

    volume: Fraction
    n: int
    lambdas: tuple[tuple[int, Fraction], ...]
    sbar: Fraction
    bar: Vector
    bar_tilde: Vector
    four_rho: Vector
    futaki_vector: Vector
    futaki_toric_vector: Vector
    flags: dict[str, bool]
    ke: KEResult
    properness: ProperResult
    destabilizer: Destabilizer | None
    warnings: tuple[str, ...] = ()

    @property
    def verdicts(self) -> dict[str, str]:
        return {
            "KE_fano": self.ke.verdict.value,
            "proper_general": self.properness.verdict.value,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "V": linalg.rational_record(self.volume),
            "n": self.n,
            "Lambda": [
                {"facet": index, "value": linalg.rational_record(value)}
                for index, value in self.lambdas
            ],
            "Sbar": linalg.rational_record(self.sbar),
            "bar": linalg.vector_record(self.bar),
            "bar_tilde": linalg.vector_record(self.bar_tilde),
            "four_rho": linalg.vector_record(self.four_rho),
            "futaki_vector": linalg.vector_record(self.futaki_vector),
            "futaki_toric_vector": linalg.vector_record(self.futaki_toric_vector),
            "flags": dict(sorted(self.flags.items())),
            "verdicts": self.verdicts,
            "ke_certificate": _certificate_dict(self.ke.certificate),
            "ke_margin": (
                None if self.ke.margin is None else linalg.rational_record(self.ke.margin)
            ),
            "properness_certificates": {
                key: _certificate_dict(value)
                for key, value in sorted(self.properness.certificates.items())
            },
            "destabilizer": None if self.destabilizer is None else self.destabilizer.to_dict(),
        }


def analyze(cp: ChamberPolytope, rs: RootSystem) -> AnalysisReport:
    """Assemble the full exact analysis of a chamber polytope."""
    inv = chamber_invariants(cp, rs)
    ke = verdict_ke_fano(cp, rs)
    properness = verdict_properness(cp, rs)
    found = ke.destabilizer if ke.verdict is KEVerdict.NO else None
    flags = {
        "fano_normalized": inv.fano_normalized,
        "bar_condition": ke.certificate.holds,
        **properness.flags,
    }
    warnings = (TORUS_CONVENTION_WARNING,) if rs.is_torus else ()
    return AnalysisReport(
        volume=inv.volume,
        n=inv.n,
        lambdas=tuple(
            (facet.index, lam) for facet, lam in zip(cp.outer_facets, inv.lambdas, strict=True)
        ),
        sbar=inv.sbar,
        bar=inv.bar,
        bar_tilde=inv.bar_tilde,
        four_rho=four_rho(rs),
        futaki_vector=futaki_vector(cp, rs),
        futaki_toric_vector=futaki_toric_vector(cp, rs),
        flags=flags,
        ke=ke,
        properness=properness,
        destabilizer=found,
        warnings=warnings,
    )
