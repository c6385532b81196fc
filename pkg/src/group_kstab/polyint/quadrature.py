"""Float quadrature on the chamber cones and outer facets.

Simplex rules are conical products of Gauss–Jacobi rules. Cone rules map a
facet rule radially towards the origin; the radial variable can be graded
towards the outer facet, where the logarithmic terms of Guillemin-type
integrands concentrate.
"""

from __future__ import annotations

import logging

from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from scipy.special import roots_jacobi, roots_legendre

from group_kstab import linalg
from group_kstab.polyint.chamber import ChamberPolytope
from group_kstab.polyint.integrate import simplex_factor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes (N, r), positive weights (N,), and the region index of each node."""

    nodes: np.ndarray
    weights: np.ndarray
    region: np.ndarray

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def integrate_by_region(self, values: np.ndarray, n_regions: int) -> np.ndarray:
        return np.bincount(self.region, weights=self.weights * values, minlength=n_regions)

    def masked(self, keep: np.ndarray) -> QuadratureRule:
        return QuadratureRule(self.nodes[keep], self.weights[keep], self.region[keep])

    def __len__(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class QuadResult:
    """Quadrature value with the difference between two refinement levels."""

    value: float
    error: float


def _points_for_order(order: int) -> int:
    return max(1, order // 2 + 1)


@lru_cache(maxsize=64)
def simplex_rule(dim: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed-coordinate Gauss–Jacobi rule on {s ≥ 0, Σ s ≤ 1} ⊂ R^dim.

    Exact for total degree ≤ 2·(order // 2 + 1) − 1. Weights sum to 1/dim!.
    """
    if dim == 0:
        return np.zeros((1, 0)), np.ones(1)
    m = _points_for_order(order)
    axes = []
    for k in range(1, dim + 1):
        a = dim - k
        x, w = roots_jacobi(m, a, 0)
        axes.append(((x + 1) / 2, w / 2 ** (a + 1)))
    grids = np.meshgrid(*[t for t, _ in axes], indexing="ij")
    weight_grids = np.meshgrid(*[w for _, w in axes], indexing="ij")
    t = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in weight_grids], axis=1), axis=1)
    nodes = np.empty_like(t)
    remaining = np.ones(t.shape[0])
    for k in range(dim):
        nodes[:, k] = t[:, k] * remaining
        remaining = remaining * (1 - t[:, k])
    return nodes, weights


@lru_cache(maxsize=64)
def radial_rule(points: int, grading: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre in σ on [0, 1] mapped by s = 1 − (1 − σ)^grading."""
    x, w = roots_legendre(points)
    sigma = (x + 1) / 2
    weights = w / 2
    s = 1 - (1 - sigma) ** grading
    jacobian = grading * (1 - sigma) ** (grading - 1)
    return s, weights * jacobian


def cone_rule(cp: ChamberPolytope, order: int, grading: int = 1) -> QuadratureRule:
    """Rule on 2P₊ assembled cone by cone; ``region`` holds the cone index."""
    r = cp.rank
    tau, tau_w = simplex_rule(r - 1, order)
    s, s_w = radial_rule(_points_for_order(grading * (order + r)), grading)
    nodes, weights, region = [], [], []
    for index, cone in enumerate(cp.cones):
        for simplex in cone.facet.simplices:
            base = linalg.as_float_array(simplex[0])
            edges = np.array(
                [linalg.as_float_array(linalg.sub(v, simplex[0])) for v in simplex[1:]]
            ).reshape(r - 1, r)
            jacobian = abs(
                float(linalg.determinant([simplex[0], *[linalg.sub(v, simplex[0]) for v in simplex[1:]]]))
            )
            z = base[None, :] + tau @ edges
            points = s[:, None, None] * z[None, :, :]
            w = (s_w * s ** (r - 1))[:, None] * tau_w[None, :] * jacobian
            nodes.append(points.reshape(-1, r))
            weights.append(w.ravel())
            region.append(np.full(w.size, index, dtype=int))
    rule = QuadratureRule(
        np.concatenate(nodes), np.concatenate(weights), np.concatenate(region)
    )
    logger.debug("Cone rule of order %d: %d nodes", order, len(rule))
    return rule


def facet_rule(cp: ChamberPolytope, order: int) -> QuadratureRule:
    """Rule on the outer facets in the coordinate measure dμ_F."""
    r = cp.rank
    tau, tau_w = simplex_rule(r - 1, order)
    nodes, weights, region = [], [], []
    for index, facet in enumerate(cp.outer_facets):
        for simplex in facet.simplices:
            base = linalg.as_float_array(simplex[0])
            edges = np.array(
                [linalg.as_float_array(linalg.sub(v, simplex[0])) for v in simplex[1:]]
            ).reshape(r - 1, r)
            factor = float(simplex_factor(simplex, facet.normal))
            nodes.append(base[None, :] + tau @ edges)
            weights.append(tau_w * factor)
            region.append(np.full(tau_w.size, index, dtype=int))
    return QuadratureRule(
        np.concatenate(nodes), np.concatenate(weights), np.concatenate(region)
    )


def two_level(
    evaluate: Callable[[int], float], order: int
) -> QuadResult:
    """Evaluate at ``order`` and ``2·order``; report the finer value."""
    coarse = evaluate(order)
    fine = evaluate(2 * order)
    return QuadResult(value=fine, error=abs(fine - coarse))

