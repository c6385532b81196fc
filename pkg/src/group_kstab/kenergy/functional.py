"""Reduced K-energy 𝒦(u) = ℒ(u) + 𝒩(u) of smooth candidates by quadrature.

Nodes come from the graded cone rule of 2P₊. A node is dropped when it lies
within the wall margin of a Weyl wall or when ∇u leaves the open positive
chamber there; the π-weighted share of dropped nodes is reported and must
stay below the configured bound.
"""

from __future__ import annotations

import logging

from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np

from group_kstab import linalg
from group_kstab.criteria.invariants import chamber_invariants
from group_kstab.kenergy.candidate import KEnergyError, SmoothCandidate
from group_kstab.kenergy.chi import ChiFunction
from group_kstab.polyint.chamber import ChamberPolytope
from group_kstab.polyint.polynomial import Polynomial
from group_kstab.polyint.quadrature import QuadratureRule, cone_rule, facet_rule
from group_kstab.rootdata import RootSystem
from group_kstab.soliton import SolitonField

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 8
DEFAULT_GRADING = 3
DEFAULT_WALL_MARGIN = 1e-6
DEFAULT_VIOLATION_BOUND = 0.01


class ChamberViolation(KEnergyError):
    """Raised when too much π-mass sits at nodes where ∇u leaves the chamber."""

    pass


@dataclass(frozen=True)
class QuadratureOptions:
    order: int = DEFAULT_ORDER
    grading: int = DEFAULT_GRADING
    wall_margin: float = DEFAULT_WALL_MARGIN
    violation_bound: float = DEFAULT_VIOLATION_BOUND

    def refined(self) -> QuadratureOptions:
        return QuadratureOptions(
            2 * self.order, self.grading, self.wall_margin, self.violation_bound
        )


DEFAULT_OPTIONS = QuadratureOptions()


@dataclass(frozen=True)
class NodeSet:
    """Kept cone-rule nodes with π (times e^θ when modified) at each node."""

    rule: QuadratureRule
    weight: np.ndarray
    dropped_fraction: float

    @property
    def nodes(self) -> np.ndarray:
        return self.rule.nodes

    def integrate(self, values: np.ndarray) -> float:
        return self.rule.integrate(values * self.weight)


@dataclass(frozen=True)
class KEnergyValue:
    """𝒦 = ℒ + 𝒩 at the finer level, with the two-level difference as error."""

    linear: float
    nonlinear: float
    error: float
    dropped_fraction: float

    @property
    def value(self) -> float:
        return self.linear + self.nonlinear

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "linear": self.linear,
            "nonlinear": self.nonlinear,
            "quadrature_error": self.error,
            "dropped_mass_fraction": self.dropped_fraction,
        }


def _root_arrays(rs: RootSystem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = len(rs.positive_roots)
    roots = np.array(
        [linalg.as_float_array(a) for a in rs.positive_roots], dtype=float
    ).reshape(m, rs.rank)
    lowered = np.array(
        [linalg.as_float_array(a) for a in rs.root_covectors()], dtype=float
    ).reshape(m, rs.rank)
    norms = np.sqrt(np.array([float(rs.norm_squared(a)) for a in rs.positive_roots]))
    return roots, lowered, norms


def chamber_nodes(
    cp: ChamberPolytope,
    rs: RootSystem,
    u: SmoothCandidate,
    options: QuadratureOptions = DEFAULT_OPTIONS,
    field_: SolitonField | None = None,
) -> NodeSet:
    """Cone-rule nodes on which u can be evaluated, with the dropped share.

    Raises:
        ChamberViolation: If the dropped π-mass share exceeds the bound
        NotConvexAtNodes: If ∇²u is not positive definite at a kept node
    """
    rule = cone_rule(cp, options.order, options.grading)
    pi = cp.pi.evaluate_many(rule.nodes)
    keep = np.ones(len(rule), dtype=bool)
    if rs.positive_roots:
        roots, lowered, norms = _root_arrays(rs)
        distance = (rule.nodes @ lowered.T) / norms[None, :]
        keep &= np.all(distance >= options.wall_margin * cp.polytope.diameter(), axis=1)
        gradients = u.gradients(rule.nodes[keep])
        inside = np.all(gradients @ roots.T > 0, axis=1)
        keep[np.flatnonzero(keep)[~inside]] = False
    total = float(np.dot(rule.weights, pi))
    dropped = float(np.dot(rule.weights[~keep], pi[~keep])) / total if total else 0.0
    if dropped > options.violation_bound:
        raise ChamberViolation(
            "∇u leaves the positive chamber on too much of 2P₊",
            dropped_fraction=dropped,
            bound=options.violation_bound,
        )
    if dropped:
        logger.debug(
            "Dropped %d nodes carrying %.3e of the π-mass", int(np.sum(~keep)), dropped
        )
    kept = rule.masked(keep)
    u.check_convex(kept.nodes)
    weight = pi[keep]
    if field_ is not None:
        weight = weight * np.exp(field_.theta(kept.nodes))
    return NodeSet(kept, weight, dropped)


def _nonlinear_integrand(
    chi: ChiFunction, u: SmoothCandidate, nodes: np.ndarray
) -> np.ndarray:
    _, logdet = np.linalg.slogdet(u.hessians(nodes))
    return np.asarray(-logdet + chi.value_plus_four_rho(u.gradients(nodes)))


def _linear_integrand(
    cp: ChamberPolytope,
    rs: RootSystem,
    values: np.ndarray,
    gradients: np.ndarray,
    nodes: NodeSet,
) -> np.ndarray:
    """[(Λ_A y − 4ρ)·∇u + (Λ_A n − S̄)u] on each cone E_A."""
    inv = chamber_invariants(cp, rs)
    lams = np.array([float(lam) for lam in inv.lambdas])[nodes.rule.region]
    rho4 = 4 * linalg.as_float_array(rs.rho)
    directions = lams[:, None] * nodes.nodes - rho4[None, :]
    return np.asarray(
        np.sum(directions * gradients, axis=1)
        + (lams * inv.n - float(inv.sbar)) * values
    )


def _fano_integrand(rs: RootSystem, gradients: np.ndarray, nodes: NodeSet) -> np.ndarray:
    rho4 = 4 * linalg.as_float_array(rs.rho)
    return np.asarray(np.sum((nodes.nodes - rho4[None, :]) * gradients, axis=1))


def _two_level(
    compute: Callable[[QuadratureOptions], tuple[float, float, float]],
    options: QuadratureOptions,
) -> tuple[tuple[float, float, float], float]:
    coarse = compute(options)
    fine = compute(options.refined())
    error = abs((fine[0] + fine[1]) - (coarse[0] + coarse[1]))
    return fine, error


def nonlinear_N(
    cp: ChamberPolytope,
    rs: RootSystem,
    u: SmoothCandidate,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> float:
    """𝒩(u) = −∫ log det(u_ij) π + ∫ [χ(∇u) + 4ρ·∇u] π at the finer level."""
    return kenergy_value(cp, rs, u, options).nonlinear


def kenergy_value(
    cp: ChamberPolytope,
    rs: RootSystem,
    u: SmoothCandidate,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> KEnergyValue:
    """𝒦(u) = ℒ(u) + 𝒩(u) at orders q and 2q."""
    chi = ChiFunction.of(rs)

    def level(opts: QuadratureOptions) -> tuple[float, float, float]:
        nodes = chamber_nodes(cp, rs, u, opts)
        values = u.values(nodes.nodes)
        gradients = u.gradients(nodes.nodes)
        linear = nodes.integrate(_linear_integrand(cp, rs, values, gradients, nodes))
        nonlinear = nodes.integrate(_nonlinear_integrand(chi, u, nodes.nodes))
        return linear, nonlinear, nodes.dropped_fraction

    (linear, nonlinear, dropped), error = _two_level(level, options)
    logger.debug(
        "𝒦 = %.12g (ℒ = %.12g, 𝒩 = %.12g)", linear + nonlinear, linear, nonlinear
    )
    return KEnergyValue(linear, nonlinear, error, dropped)


def modified_kenergy_value(
    cp: ChamberPolytope,
    rs: RootSystem,
    field_: SolitonField,
    u: SmoothCandidate,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> KEnergyValue:
    """𝒦^X(u) = ∫(y − 4ρ)·∇u e^θ π − ∫(log det u_ij − χ − 4ρ·∇u) e^θ π.

    Raises:
        KEnergyError: If 2P is not Fano-normalized
    """
    if not chamber_invariants(cp, rs).fano_normalized:
        raise KEnergyError("The modified K-energy needs a Fano-normalized polytope")
    chi = ChiFunction.of(rs)

    def level(opts: QuadratureOptions) -> tuple[float, float, float]:
        nodes = chamber_nodes(cp, rs, u, opts, field_)
        gradients = u.gradients(nodes.nodes)
        linear = nodes.integrate(_fano_integrand(rs, gradients, nodes))
        nonlinear = nodes.integrate(_nonlinear_integrand(chi, u, nodes.nodes))
        return linear, nonlinear, nodes.dropped_fraction

    (linear, nonlinear, dropped), error = _two_level(level, options)
    return KEnergyValue(linear, nonlinear, error, dropped)


def _polynomial_derivatives(
    f: Polynomial, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    values = f.evaluate_many(points)
    gradient = np.stack([g.evaluate_many(points) for g in f.gradient()], axis=1)
    hessian = np.stack(
        [np.stack([h.evaluate_many(points) for h in row], axis=1) for row in f.hessian()],
        axis=1,
    )
    return values, gradient, hessian


def _nonlinear_variation_integrand(
    chi: ChiFunction,
    u: SmoothCandidate,
    nodes: np.ndarray,
    f_gradient: np.ndarray,
    f_hessian: np.ndarray,
) -> np.ndarray:
    inverse = np.linalg.inv(u.hessians(nodes))
    trace = np.einsum("nij,nji->n", inverse, f_hessian)
    pushed = chi.gradient_plus_four_rho(u.gradients(nodes))
    return np.asarray(-trace + np.sum(pushed * f_gradient, axis=1))


def nonlinear_first_variation(
    cp: ChamberPolytope,
    rs: RootSystem,
    u: SmoothCandidate,
    f: Polynomial,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> float:
    """d/dε 𝒩(u + εf) at ε = 0: ∫[−u^{ij}f_{,ij} + (χ_p + 4ρ_p)|_{∇u} f_{,p}]π."""
    chi = ChiFunction.of(rs)
    nodes = chamber_nodes(cp, rs, u, options.refined())
    _, gradient, hessian = _polynomial_derivatives(f, nodes.nodes)
    return nodes.integrate(
        _nonlinear_variation_integrand(chi, u, nodes.nodes, gradient, hessian)
    )


def first_variation(
    cp: ChamberPolytope,
    rs: RootSystem,
    u: SmoothCandidate,
    f: Polynomial,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> float:
    """d/dε 𝒦(u + εf) at ε = 0, on the node set of the finer level."""
    chi = ChiFunction.of(rs)
    nodes = chamber_nodes(cp, rs, u, options.refined())
    values, gradient, hessian = _polynomial_derivatives(f, nodes.nodes)
    linear = _linear_integrand(cp, rs, values, gradient, nodes)
    nonlinear = _nonlinear_variation_integrand(chi, u, nodes.nodes, gradient, hessian)
    return nodes.integrate(linear + nonlinear)


@dataclass(frozen=True)
class KappaBounds:
    """Boundary mass Σ λ_A ∫_{F_A} ũ π dμ and the interior term ∫ ũ ρ·∇π."""

    boundary: float
    interior: float

    def to_dict(self) -> dict[str, float]:
        return {"boundary": self.boundary, "interior": self.interior}


def kappa_bounds(
    cp: ChamberPolytope,
    rs: RootSystem,
    u: SmoothCandidate,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> KappaBounds:
    """Report-only bounds of a normalized candidate; u is normalized first."""
    normalized = u.normalized()
    facets = facet_rule(cp, 2 * options.order)
    lams = np.array([float(f.offset) for f in cp.outer_facets])[facets.region]
    values = normalized.values(facets.nodes)
    pi = cp.pi.evaluate_many(facets.nodes)
    boundary = facets.integrate(lams * values * pi)

    rule = cone_rule(cp, 2 * options.order, options.grading)
    gradient = np.stack([g.evaluate_many(rule.nodes) for g in cp.pi.gradient()], axis=1)
    rho = linalg.as_float_array(rs.rho)
    interior = rule.integrate(normalized.values(rule.nodes) * (gradient @ rho))
    return KappaBounds(boundary=boundary, interior=interior)


def j_functional_proxy(
    cp: ChamberPolytope,
    rs: RootSystem,
    u: SmoothCandidate,
    options: QuadratureOptions = DEFAULT_OPTIONS,
) -> float:
    """(1/V) ∫ (ũ − ũ₀) π dy with both potentials normalized at the origin."""
    reference = SmoothCandidate.guillemin(cp.polytope).normalized()
    normalized = u.normalized()
    rule = cone_rule(cp, 2 * options.order, options.grading)
    difference = normalized.values(rule.nodes) - reference.values(rule.nodes)
    pi = cp.pi.evaluate_many(rule.nodes)
    return rule.integrate(difference * pi) / float(chamber_invariants(cp, rs).volume)
