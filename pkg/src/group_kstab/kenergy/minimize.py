"""Desk-scale minimization of 𝒦 over u = u₀ + Σ_k a_k B_k.

The B_k are W-averaged monomials, so every iterate stays W-invariant. The
node set is fixed at the start; each iterate is scored on it by the same
integrands as ``kenergy_value``, plus a barrier on the smallest Hessian
eigenvalue at every node.
"""

from __future__ import annotations

import logging

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from group_kstab import linalg
from group_kstab.criteria.invariants import chamber_invariants
from group_kstab.criteria.verdicts import ProperVerdict, verdict_properness
from group_kstab.errors import ConvergenceError
from group_kstab.kenergy.candidate import KEnergyError, SmoothCandidate, symmetric_basis
from group_kstab.kenergy.chi import ChiFunction
from group_kstab.kenergy.functional import (
    DEFAULT_OPTIONS,
    KEnergyValue,
    NodeSet,
    QuadratureOptions,
    chamber_nodes,
    kenergy_value,
)
from group_kstab.polyint.chamber import ChamberPolytope
from group_kstab.polyint.polynomial import Polynomial
from group_kstab.rootdata import RootSystem

logger = logging.getLogger(__name__)

HEURISTIC_LABEL = (
    "desk-scale heuristic: local minimizer of the K-energy within a "
    "finite-dimensional W-invariant family, not a minimizer over all "
    "normalized convex potentials"
)
ARMIJO = 1e-4
MIN_STEP = 1e-12
ROUNDING = 1e-6
BARRIER_FLOOR = 1e-3


class KEnergyConvergenceError(ConvergenceError):
    """Base for minimizer failures; carries the descent trace."""

    module = "kenergy"

    def __init__(
        self, message: str, trace: Sequence[dict[str, float]] = (), **details: Any
    ):
        super().__init__(message, **details)
        self.trace = list(trace)


class NoDescent(KEnergyConvergenceError):
    """Raised when no step from the starting point lowers the objective."""

    pass


class BarrierBreach(KEnergyConvergenceError):
    """Raised when the starting point is not convex at the fixed nodes."""

    pass


class PropernessRequired(KEnergyError):
    """Raised when minimizing without a properness verdict or an override."""

    pass


@dataclass(frozen=True)
class _Evaluation:
    kenergy: float
    gradient: np.ndarray
    min_eigs: np.ndarray
    min_eig_gradients: np.ndarray


class _NodeModel:
    """Precomputed basis derivatives at the fixed nodes."""

    def __init__(
        self,
        cp: ChamberPolytope,
        rs: RootSystem,
        basis: Sequence[Polynomial],
        nodes: NodeSet,
    ):
        points = nodes.nodes
        base = SmoothCandidate.guillemin(cp.polytope)
        self.weights = nodes.rule.weights * nodes.weight
        self.base_values = base.values(points)
        self.base_gradients = base.gradients(points)
        self.base_hessians = base.hessians(points)
        r, k = cp.rank, len(basis)
        self.values = np.zeros((k, len(points)))
        self.gradients = np.zeros((k, len(points), r))
        self.hessians = np.zeros((k, len(points), r, r))
        for index, p in enumerate(basis):
            self.values[index] = p.evaluate_many(points)
            for i, g in enumerate(p.gradient()):
                self.gradients[index, :, i] = g.evaluate_many(points)
            for i, row in enumerate(p.hessian()):
                for j, h in enumerate(row):
                    self.hessians[index, :, i, j] = h.evaluate_many(points)

        inv = chamber_invariants(cp, rs)
        lams = np.array([float(lam) for lam in inv.lambdas])[nodes.rule.region]
        rho4 = 4 * linalg.as_float_array(rs.rho)
        self.directions = lams[:, None] * points - rho4[None, :]
        self.value_factor = lams * inv.n - float(inv.sbar)
        # Basis terms vanish to second order at O, so normalization only removes
        # the affine part of the Guillemin base and shifts 𝒦 by a constant.
        origin = np.zeros((1, r))
        slope = base.gradients(origin)[0]
        affine = points @ slope + float(base.values(origin)[0])
        self.normalization = float(
            self.weights @ (self.directions @ slope + self.value_factor * affine)
        )
        self.chi = ChiFunction.of(rs)

    def evaluate(self, a: np.ndarray) -> _Evaluation | None:
        """𝒦 of the normalized candidate on the nodes and its coefficient gradient.

        None when the candidate is infeasible at some node.
        """
        values = self.base_values + a @ self.values
        gradients = self.base_gradients + np.einsum("k,knr->nr", a, self.gradients)
        hessians = self.base_hessians + np.einsum("k,knij->nij", a, self.hessians)
        if self.chi.roots.size and np.any(self.chi.pairings(gradients) <= 0):
            return None
        eigenvalues, vectors = np.linalg.eigh(hessians)
        if np.any(eigenvalues[:, 0] <= 0):
            return None
        linear = np.sum(self.directions * gradients, axis=1) + self.value_factor * values
        nonlinear = -np.sum(np.log(eigenvalues), axis=1) + self.chi.value_plus_four_rho(
            gradients
        )
        kenergy = float(self.weights @ (linear + nonlinear)) - self.normalization

        inverse = np.einsum("nia,na,nja->nij", vectors, 1 / eigenvalues, vectors)
        pushed = self.chi.gradient_plus_four_rho(gradients)
        linear_k = (
            np.einsum("nr,knr->kn", self.directions, self.gradients)
            + self.value_factor[None, :] * self.values
        )
        nonlinear_k = -np.einsum("nij,knji->kn", inverse, self.hessians) + np.einsum(
            "nr,knr->kn", pushed, self.gradients
        )
        gradient = (linear_k + nonlinear_k) @ self.weights

        lowest = vectors[:, :, 0]
        eig_gradients = np.einsum("ni,knij,nj->kn", lowest, self.hessians, lowest)
        return _Evaluation(kenergy, gradient, eigenvalues[:, 0], eig_gradients)


def _barrier(
    evaluation: _Evaluation, kappa: float, weight: float
) -> tuple[float, np.ndarray]:
    """Σ φ(λ_n) with φ(λ) = −log(λ/κ) + λ/κ − 1 below κ and 0 above."""
    lam = evaluation.min_eigs
    active = lam < kappa
    if not np.any(active):
        return 0.0, np.zeros_like(evaluation.gradient)
    ratio = lam[active] / kappa
    value = float(np.sum(-np.log(ratio) + ratio - 1))
    slopes = -1 / lam[active] + 1 / kappa
    gradient = evaluation.min_eig_gradients[:, active] @ slopes
    return weight * value, weight * gradient


@dataclass(frozen=True)
class MinimizeResult:
    candidate: SmoothCandidate
    value: KEnergyValue
    coefficients: np.ndarray
    converged: bool
    stop_reason: str
    trace: tuple[dict[str, float], ...] = field(repr=False)
    label: str = HEURISTIC_LABEL

    @property
    def initial_value(self) -> float:
        return self.trace[0]["kenergy"]

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "value": self.value.to_dict(),
            "coefficients": [float(x) for x in self.coefficients],
            "converged": self.converged,
            "stop_reason": self.stop_reason,
            "iterations": len(self.trace) - 1,
            "candidate": self.candidate.to_dict(),
        }


def minimize_kenergy(
    cp: ChamberPolytope,
    rs: RootSystem,
    *,
    degree: int = 2,
    tol: float = 1e-6,
    max_iter: int = 40,
    barrier_weight: float = 1e-3,
    options: QuadratureOptions = DEFAULT_OPTIONS,
    start: Sequence[float] | None = None,
    allow_improper: bool = False,
) -> MinimizeResult:
    """BFGS descent of 𝒦 over the coefficients of a symmetric polynomial basis.

    Every accepted step satisfies the Armijo condition on the penalized
    objective and does not raise 𝒦 itself. The returned candidate is
    normalized so that ũ(O) = 0 and ∇ũ(O) = 0, and the trace reports 𝒦 of the
    normalized iterates.

    Raises:
        PropernessRequired: Without a "proper" verdict unless ``allow_improper``
        BarrierBreach: If the start is not convex at the fixed nodes
        NoDescent: If the first line search fails away from a critical point
    """
    if not allow_improper:
        verdict = verdict_properness(cp, rs).verdict
        if verdict is not ProperVerdict.PROPER:
            raise PropernessRequired(
                "Minimization needs a proper K-energy; pass the override to force it",
                verdict=verdict.value,
            )
    basis = symmetric_basis(rs, degree)
    nodes = chamber_nodes(cp, rs, SmoothCandidate.guillemin(cp.polytope), options)
    model = _NodeModel(cp, rs, basis, nodes)
    a = np.zeros(len(basis)) if start is None else np.asarray(start, dtype=float)
    current = model.evaluate(a)
    if current is None:
        raise BarrierBreach("Starting candidate leaves the convex chamber at the nodes")
    kappa = BARRIER_FLOOR * float(np.min(current.min_eigs))
    penalty, penalty_gradient = _barrier(current, kappa, barrier_weight)
    value = current.kenergy + penalty
    gradient = current.gradient + penalty_gradient
    inverse_hessian = np.eye(len(basis))

    def row(iteration: int, step: float) -> dict[str, float]:
        assert current is not None
        return {
            "iteration": iteration,
            "value": value,
            "kenergy": current.kenergy,
            "grad_norm": float(np.linalg.norm(gradient)),
            "step": step,
            "min_eig": float(np.min(current.min_eigs)),
        }

    trace = [row(0, 0.0)]
    converged = False
    stop_reason = "iteration-cap"
    for iteration in range(max_iter):
        if np.linalg.norm(gradient) < tol:
            converged, stop_reason = True, "gradient-tolerance"
            break
        direction = -inverse_hessian @ gradient
        slope = float(gradient @ direction)
        if slope >= 0:
            inverse_hessian = np.eye(len(basis))
            direction = -gradient
            slope = -float(gradient @ gradient)
        step = 1.0
        accepted = None
        while step >= MIN_STEP:
            trial = a + step * direction
            evaluation = model.evaluate(trial)
            if evaluation is not None and evaluation.kenergy <= current.kenergy:
                trial_penalty, trial_penalty_gradient = _barrier(
                    evaluation, kappa, barrier_weight
                )
                trial_value = evaluation.kenergy + trial_penalty
                if trial_value <= value + ARMIJO * step * slope:
                    accepted = (
                        trial,
                        evaluation,
                        trial_value,
                        evaluation.gradient + trial_penalty_gradient,
                    )
                    break
            step /= 2
        if accepted is None:
            if np.linalg.norm(gradient) < ROUNDING * max(1.0, abs(value)):
                converged, stop_reason = True, "rounding"
                break
            if iteration == 0:
                raise NoDescent(
                    "No descent step from the starting candidate",
                    trace=trace,
                    grad_norm=float(np.linalg.norm(gradient)),
                )
            stop_reason = "line-search"
            break
        trial, evaluation, trial_value, trial_gradient = accepted
        s = trial - a
        y = trial_gradient - gradient
        curvature = float(s @ y)
        if curvature > 1e-12:
            rho = 1 / curvature
            identity = np.eye(len(basis))
            inverse_hessian = (identity - rho * np.outer(s, y)) @ inverse_hessian @ (
                identity - rho * np.outer(y, s)
            ) + rho * np.outer(s, s)
        a, current, value, gradient = trial, evaluation, trial_value, trial_gradient
        trace.append(row(iteration + 1, step))
        logger.debug(
            "Minimize %d: 𝒦 = %.12g, |∇| = %.3e, step = %.3e",
            iteration + 1,
            current.kenergy,
            trace[-1]["grad_norm"],
            step,
        )
    else:
        if np.linalg.norm(gradient) < tol:
            converged, stop_reason = True, "gradient-tolerance"

    candidate = SmoothCandidate.guillemin(cp.polytope, basis, a).normalized()
    final = kenergy_value(cp, rs, candidate, options)
    logger.info(
        "K-energy minimization stopped (%s) after %d steps", stop_reason, len(trace) - 1
    )
    return MinimizeResult(
        candidate=candidate,
        value=final,
        coefficients=a,
        converged=converged,
        stop_reason=stop_reason,
        trace=tuple(trace),
    )
