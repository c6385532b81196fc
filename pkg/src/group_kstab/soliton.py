"""Kähler–Ricci soliton coefficients, bar_X and the modified linear functional.

The soliton potential is θ_X(y) = c·y + c0 with c a covector annihilated by
every root. Writing c = Σ_k t_k b_k over the toric covector basis b_k = G v_k,
c is the minimizer of the strictly convex map

    Φ(t) = log ∫_{2P₊} exp((Σ_k t_k b_k)·y) π(y) dy,

whose gradient is the normalized toric moment of the weighted measure. Newton
steps use the covariance Hessian, damped by Armijo backtracking; c0 then
follows from ∫ θ_X π dy = 0.
"""

from __future__ import annotations

import logging

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Union

import numpy as np

from group_kstab import linalg
from group_kstab.criteria.invariants import chamber_invariants, four_rho
from group_kstab.criteria.plfunction import PLConvexFunction, piece_regions
from group_kstab.errors import ConvergenceError
from group_kstab.polyint.chamber import ChamberPolytope
from group_kstab.polyint.polynomial import Polynomial
from group_kstab.polyint.quadrature import (
    QuadResult,
    QuadratureRule,
    cone_rule,
    simplex_rule,
    two_level,
)
from group_kstab.rootdata import RootSystem

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_ORDER = 8
DEFAULT_MAX_ITER = 60


class NoConvergence(ConvergenceError):
    """Raised when Newton iteration hits its cap; carries the best iterate."""

    module = "soliton"

    def __init__(self, message: str, best: SolitonField | None = None, **details: Any):
        super().__init__(message, **details)
        self.best = best


class SolitonVerdict(str, Enum):
    YES = "yes"
    MARGINAL = "marginal"
    NO = "no"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class SolitonField:
    """θ_X(y) = c·y + c0 with residuals and the Newton trace."""

    c: np.ndarray
    c0: float
    moment_residual: float
    normalization_residual: float
    converged: bool = True
    iterations: int = 0
    trace: tuple[dict[str, float], ...] = field(default=(), repr=False)

    @property
    def residual_norm(self) -> float:
        return max(self.moment_residual, self.normalization_residual)

    @property
    def is_trivial(self) -> bool:
        return bool(np.all(self.c == 0)) and self.c0 == 0

    def theta(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(np.atleast_2d(y) @ self.c + self.c0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "c": [float(x) for x in self.c],
            "c0": float(self.c0),
            "residuals": {
                "moment": float(self.moment_residual),
                "normalization": float(self.normalization_residual),
            },
            "converged": self.converged,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class BarX:
    """Soliton-weighted barycenter with a two-level quadrature error."""

    value: np.ndarray
    error: float
    mass: float

    def to_dict(self) -> dict[str, Any]:
        return {"value": [float(x) for x in self.value], "quadrature_error": self.error}


@dataclass(frozen=True)
class SolitonVerdictResult:
    verdict: SolitonVerdict
    margin: float | None
    toric_component: np.ndarray
    tolerance: float
    note: str = ""


def _weighted_pi(cp: ChamberPolytope, rule: QuadratureRule) -> np.ndarray:
    return cp.pi.evaluate_many(rule.nodes)


def _log_objective(
    t: np.ndarray, z: np.ndarray, base: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """log Φ, its gradient (weighted mean of z) and Hessian (covariance of z)."""
    exponent = z @ t
    shift = float(np.max(exponent))
    weights = base * np.exp(exponent - shift)
    total = float(np.sum(weights))
    probabilities = weights / total
    mean = probabilities @ z
    centered = z - mean
    hessian = (centered * probabilities[:, None]).T @ centered
    return shift + float(np.log(total)), mean, hessian


def solve_soliton(
    cp: ChamberPolytope,
    rs: RootSystem,
    tol: float = DEFAULT_TOL,
    *,
    order: int = DEFAULT_ORDER,
    max_iter: int = DEFAULT_MAX_ITER,
    start: np.ndarray | None = None,
) -> SolitonField:
    """Solve the soliton coefficient equations by damped Newton.

    Convergence is declared when the toric moment residual
    max_k |∫ b_k·y e^θ π dy| is at most ``tol · max(1, V)``.

    Raises:
        NoConvergence: After ``max_iter`` iterations, with the best iterate
    """
    inv = chamber_invariants(cp, rs)
    volume = float(inv.volume)
    bar = linalg.as_float_array(inv.bar)
    basis = np.array(
        [linalg.as_float_array(b) for b in rs.toric_covectors()], dtype=float
    ).reshape(rs.toric_rank, rs.rank)
    if rs.toric_rank == 0:
        logger.debug("No toric part: soliton field is trivial")
        return SolitonField(
            c=np.zeros(rs.rank), c0=0.0, moment_residual=0.0, normalization_residual=0.0
        )

    rule = cone_rule(cp, 2 * order)
    base = rule.weights * _weighted_pi(cp, rule)
    z = rule.nodes @ basis.T
    threshold = tol * max(1.0, volume)

    t = np.zeros(rs.toric_rank) if start is None else np.asarray(start, dtype=float)
    trace: list[dict[str, float]] = []
    best: tuple[float, np.ndarray] | None = None
    value, gradient, hessian = _log_objective(t, z, base)
    for iteration in range(max_iter + 1):
        c = basis.T @ t
        c0 = -float(c @ bar)
        mass = float(np.exp(value + c0))
        residual = float(np.max(np.abs(gradient))) * mass
        min_eig = float(np.linalg.eigvalsh(hessian)[0])
        trace.append(
            {
                "iteration": iteration,
                "objective": value,
                "residual": residual,
                "min_eig": min_eig,
            }
        )
        logger.debug(
            "Newton %d: log Φ = %.15g, residual = %.3e, λ_min = %.3e",
            iteration,
            value,
            residual,
            min_eig,
        )
        if best is None or residual < best[0]:
            best = (residual, t.copy())
        if residual <= threshold:
            return _field(cp, rule, t, basis, bar, residual, iteration, trace, True)
        if min_eig <= 0:
            raise NoConvergence(
                "Soliton objective Hessian is not positive definite",
                best=_field(cp, rule, best[1], basis, bar, best[0], iteration, trace, False),
                min_eig=min_eig,
            )
        if iteration == max_iter:
            break
        step = np.linalg.solve(hessian, -gradient)
        decrement = float(gradient @ step)
        alpha = 1.0
        while True:
            candidate = t + alpha * step
            new_value, new_gradient, new_hessian = _log_objective(candidate, z, base)
            if new_value <= value + 1e-4 * alpha * decrement:
                break
            alpha /= 2
            if alpha < 1e-10:
                raise NoConvergence(
                    "Soliton line search found no decrease of log Φ",
                    best=_field(
                        cp, rule, best[1], basis, bar, best[0], iteration, trace, False
                    ),
                    residual=best[0],
                )
        trace[-1]["step"] = alpha
        t, value, gradient, hessian = candidate, new_value, new_gradient, new_hessian

    assert best is not None
    raise NoConvergence(
        f"Soliton Newton iteration did not converge in {max_iter} steps",
        best=_field(cp, rule, best[1], basis, bar, best[0], max_iter, trace, False),
        residual=best[0],
    )


def _field(
    cp: ChamberPolytope,
    rule: QuadratureRule,
    t: np.ndarray,
    basis: np.ndarray,
    bar: np.ndarray,
    residual: float,
    iterations: int,
    trace: list[dict[str, float]],
    converged: bool,
) -> SolitonField:
    c = basis.T @ t
    c0 = -float(c @ bar)
    pi_values = _weighted_pi(cp, rule)
    normalization = abs(rule.integrate((rule.nodes @ c + c0) * pi_values))
    return SolitonField(
        c=c,
        c0=c0,
        moment_residual=residual,
        normalization_residual=normalization,
        converged=converged,
        iterations=iterations,
        trace=tuple(trace),
    )


def bar_x(
    cp: ChamberPolytope, rs: RootSystem, field_: SolitonField, *, order: int = DEFAULT_ORDER
) -> BarX:
    """bar_X = ∫ y e^θ π / ∫ e^θ π, finer of two levels plus their difference."""
    if field_.is_trivial:
        bar = linalg.as_float_array(chamber_invariants(cp, rs).bar)
        return BarX(value=bar, error=0.0, mass=float(chamber_invariants(cp, rs).volume))

    def level(q: int) -> tuple[np.ndarray, float]:
        rule = cone_rule(cp, q)
        weights = rule.weights * _weighted_pi(cp, rule) * np.exp(field_.theta(rule.nodes))
        mass = float(np.sum(weights))
        return (weights @ rule.nodes) / mass, mass

    coarse, _ = level(order)
    fine, mass = level(2 * order)
    return BarX(value=fine, error=float(np.max(np.abs(fine - coarse))), mass=mass)


def verdict_soliton(
    cp: ChamberPolytope,
    rs: RootSystem,
    field_: SolitonField,
    *,
    barycenter: BarX | None = None,
    order: int = DEFAULT_ORDER,
) -> SolitonVerdictResult:
    """Test bar_X − 4ρ ∈ Ξ against the quadrature error estimate."""
    bx = barycenter if barycenter is not None else bar_x(cp, rs, field_, order=order)
    shift = bx.value - linalg.as_float_array(four_rho(rs))
    tolerance = bx.error + field_.moment_residual / max(bx.mass, 1e-300) + 1e-12
    if rs.is_torus:
        coefficients = np.zeros(0)
        toric = shift
    else:
        gram = linalg.as_float_array(rs.gram)
        roots = linalg.as_float_array(rs.simple_roots)
        pairings = roots @ gram @ shift
        coefficients = np.linalg.solve(linalg.as_float_array(rs.simple_gram), pairings)
        toric = shift - coefficients @ roots
    if not chamber_invariants(cp, rs).fano_normalized:
        return SolitonVerdictResult(
            SolitonVerdict.NOT_APPLICABLE, None, toric, tolerance
        )
    toric_size = float(np.max(np.abs(toric))) if toric.size else 0.0
    margin = None
    if coefficients.size:
        lengths = np.diag(linalg.as_float_array(rs.simple_gram))
        margin = float(np.min(coefficients * lengths))
    note = "bar_X ∈ 4ρ + Ξ is also necessary for a soliton"
    if toric_size > tolerance or (margin is not None and margin < -tolerance):
        return SolitonVerdictResult(SolitonVerdict.NO, margin, toric, tolerance, note)
    if margin is not None and margin <= tolerance:
        return SolitonVerdictResult(SolitonVerdict.MARGINAL, margin, toric, tolerance)
    return SolitonVerdictResult(SolitonVerdict.YES, margin, toric, tolerance)


ModifiedTest = Union[PLConvexFunction, Polynomial]


def modified_linear(
    cp: ChamberPolytope,
    rs: RootSystem,
    field_: SolitonField,
    u: ModifiedTest,
    *,
    order: int = DEFAULT_ORDER,
) -> QuadResult:
    """ℒ^X(u) = ∫ ⟨y − 4ρ, ∇u⟩ e^θ π dy by two-level quadrature.

    PL functions are integrated region by region, so ∇u is constant on
    every quadrature cell.
    """
    rho4 = linalg.as_float_array(four_rho(rs))

    def weight(points: np.ndarray) -> np.ndarray:
        return np.asarray(cp.pi.evaluate_many(points) * np.exp(field_.theta(points)))

    if isinstance(u, Polynomial):
        gradient = u.gradient()

        def smooth_level(q: int) -> float:
            rule = cone_rule(cp, q)
            grad = np.stack([g.evaluate_many(rule.nodes) for g in gradient], axis=1)
            pairing = np.sum((rule.nodes - rho4) * grad, axis=1)
            return rule.integrate(pairing * weight(rule.nodes))

        return two_level(smooth_level, order)

    regions = [
        (linalg.as_float_array(piece.gradient), sub)
        for simplex in cp.simplices
        for piece, subs in piece_regions(u, simplex)
        for sub in subs
    ]

    def pl_level(q: int) -> float:
        nodes_ref, weights_ref = simplex_rule(cp.rank, q)
        total = 0.0
        for g, simplex in regions:
            base = linalg.as_float_array(simplex[0])
            edges = np.array(
                [linalg.as_float_array(linalg.sub(v, simplex[0])) for v in simplex[1:]]
            )
            jacobian = abs(float(np.linalg.det(edges)))
            points = base[None, :] + nodes_ref @ edges
            values = ((points - rho4) @ g) * weight(points)
            total += jacobian * float(weights_ref @ values)
        return total

    return two_level(pl_level, order)


def modified_futaki(
    cp: ChamberPolytope, rs: RootSystem, field_: SolitonField, *, order: int = DEFAULT_ORDER
) -> list[QuadResult]:
    """ℒ^X(l_v) for each toric basis vector v; vanishes at the solution."""
    return [
        modified_linear(cp, rs, field_, PLConvexFunction.toric_linear(rs, v), order=order)
        for v in rs.t_basis
    ]
