"""Pointwise scalar curvature, the Q diagnostic and Guillemin boundary limits.

Derivatives of the inverse Hessian U = (u_ij)⁻¹ come from the identities
∂_k U = −U T_k U and ∂_l ∂_k U = −(∂_l U) T_k U − U T_kl U − U T_k (∂_l U),
with T_k = ∂_k(u_ij) and T_kl = ∂_k ∂_l(u_ij) from the candidate.
"""

from __future__ import annotations

import logging

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np

from group_kstab import linalg
from group_kstab.kenergy.candidate import KEnergyError, SmoothCandidate
from group_kstab.kenergy.chi import ChiFunction
from group_kstab.polyint.chamber import ChamberPolytope
from group_kstab.rootdata import RootSystem

logger = logging.getLogger(__name__)

WeightRoute = Literal["pi", "roots"]
QRoute = Literal["expanded", "direct"]


class WallTooClose(KEnergyError):
    """Raised for sample points outside 2P₊ or within the wall margin."""

    pass


class SingularHessian(KEnergyError):
    """Raised when ∇²u is singular or indefinite at a sample point."""

    pass


@dataclass(frozen=True)
class CurvatureTerms:
    """The five summands of S, each of shape (N,)."""

    abreu: np.ndarray
    mixed: np.ndarray
    weight: np.ndarray
    chi_hessian: np.ndarray
    chi_gradient: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return np.asarray(
            self.abreu + self.mixed + self.weight + self.chi_hessian + self.chi_gradient
        )


def _check_points(
    cp: ChamberPolytope, rs: RootSystem, points: np.ndarray, wall_margin: float
) -> None:
    normals = np.array([linalg.as_float_array(f.covector) for f in cp.polytope.facets])
    offsets = np.array([float(f.offset) for f in cp.polytope.facets])
    if np.any(offsets[None, :] - points @ normals.T <= 0):
        raise WallTooClose("Sample point is not interior to 2P")
    if not rs.positive_roots:
        return
    lowered = np.array([linalg.as_float_array(a) for a in rs.root_covectors()])
    norms = np.sqrt([float(rs.norm_squared(a)) for a in rs.positive_roots])
    distance = np.min((points @ lowered.T) / norms[None, :], axis=1)
    threshold = wall_margin * cp.polytope.diameter()
    if np.any(distance < threshold):
        worst = int(np.argmin(distance))
        raise WallTooClose(
            "Sample point lies within the wall margin",
            point=[float(x) for x in points[worst]],
            distance=float(distance[worst]),
            margin=threshold,
        )


def _inverse_hessians(u: SmoothCandidate, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    hessians = u.hessians(points)
    eigenvalues = np.linalg.eigvalsh(hessians)
    scale = np.maximum(np.abs(eigenvalues[:, -1]), 1.0)
    if np.any(eigenvalues[:, 0] <= 1e-14 * scale):
        worst = int(np.argmin(eigenvalues[:, 0]))
        raise SingularHessian(
            "∇²u is not positive definite",
            point=[float(x) for x in points[worst]],
            min_eigenvalue=float(eigenvalues[worst, 0]),
        )
    return hessians, np.linalg.inv(hessians)


def _pi_ratios(
    cp: ChamberPolytope, rs: RootSystem, points: np.ndarray, route: WeightRoute
) -> tuple[np.ndarray, np.ndarray]:
    """π_i/π and π_ij/π at each point."""
    if route == "pi":
        pi = cp.pi.evaluate_many(points)
        gradient = np.stack([g.evaluate_many(points) for g in cp.pi.gradient()], axis=1)
        hessian = np.stack(
            [
                np.stack([h.evaluate_many(points) for h in row], axis=1)
                for row in cp.pi.hessian()
            ],
            axis=1,
        )
        return gradient / pi[:, None], hessian / pi[:, None, None]
    if route != "roots":
        raise KEnergyError(f"Unknown weight route {route!r}")
    r = rs.rank
    lowered = np.array(
        [linalg.as_float_array(a) for a in rs.root_covectors()], dtype=float
    ).reshape(len(rs.positive_roots), r)
    scaled = lowered[None, :, :] / (points @ lowered.T)[:, :, None]
    first = 2 * np.sum(scaled, axis=1)
    summed = np.sum(scaled, axis=1)
    second = 4 * np.einsum("ni,nj->nij", summed, summed) - 2 * np.einsum(
        "nai,naj->nij", scaled, scaled
    )
    return first, second


def curvature_terms(
    cp: ChamberPolytope,
    rs: RootSystem,
    u: SmoothCandidate,
    points: np.ndarray,
    *,
    route: WeightRoute = "pi",
    wall_margin: float = 1e-6,
) -> CurvatureTerms:
    """Summands of S = −u^{ij}_{,ij} − 2u^{ij}_{,j}π_i/π − u^{ij}π_ij/π
    − u_ij χ_ij(∇u) − χ_i(∇u)π_i/π.

    Raises:
        WallTooClose: For points outside 2P₊ or near a wall
        SingularHessian: If ∇²u is not positive definite at a point
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    _check_points(cp, rs, points, wall_margin)
    hessian, inverse = _inverse_hessians(u, points)
    third = u.third(points)
    fourth = u.fourth(points)

    # dU[n, k] = ∂_k U
    d_inverse = -np.einsum("nia,nabk,nbj->nkij", inverse, third, inverse)
    divergence = np.einsum("njij->ni", d_inverse)
    second = -(
        np.einsum("niia,nabj,nbj->n", d_inverse, third, inverse)
        + np.einsum("nia,nabji,nbj->n", inverse, fourth, inverse)
        + np.einsum("nia,nabj,nibj->n", inverse, third, d_inverse)
    )

    pi_first, pi_second = _pi_ratios(cp, rs, points, route)
    chi = ChiFunction.of(rs)
    gradients = u.gradients(points)
    if rs.positive_roots and np.any(chi.pairings(gradients) <= 0):
        raise WallTooClose("∇u leaves the positive chamber at a sample point")

    return CurvatureTerms(
        abreu=-second,
        mixed=-2 * np.sum(divergence * pi_first, axis=1),
        weight=-np.einsum("nij,nij->n", inverse, pi_second),
        chi_hessian=-np.einsum("nij,nij->n", hessian, chi.hessian(gradients)),
        chi_gradient=-np.sum(chi.gradient(gradients) * pi_first, axis=1),
    )


def scalar_curvature(
    cp: ChamberPolytope,
    rs: RootSystem,
    u: SmoothCandidate,
    points: np.ndarray,
    *,
    route: WeightRoute = "pi",
    wall_margin: float = 1e-6,
) -> np.ndarray:
    return curvature_terms(cp, rs, u, points, route=route, wall_margin=wall_margin).total


def scalar_curvature_at(
    cp: ChamberPolytope,
    rs: RootSystem,
    u: SmoothCandidate,
    y: Sequence[float],
    *,
    route: WeightRoute = "pi",
    wall_margin: float = 1e-6,
) -> float:
    """S(y) at a single interior point of 2P₊."""
    point = np.asarray(y, dtype=float).reshape(1, cp.rank)
    return float(scalar_curvature(cp, rs, u, point, route=route, wall_margin=wall_margin)[0])


def q_diagnostic(
    cp: ChamberPolytope,
    rs: RootSystem,
    y: Sequence[float],
    *,
    route: QRoute = "expanded",
    wall_margin: float = 1e-6,
) -> float:
    """Q(y) for Guillemin's potential u₀ of 2P.

    The direct route evaluates −χ_iπ_i/π − χ_ik u₀_ik − u₀^{ij}π_ij/π; the
    expanded route sums the per-root terms I_α and the pair terms I_{α,β}.
    """
    point = np.asarray(y, dtype=float).reshape(1, cp.rank)
    _check_points(cp, rs, point, wall_margin)
    u0 = SmoothCandidate.guillemin(cp.polytope)
    hessian, inverse = _inverse_hessians(u0, point)
    x = u0.gradients(point)
    chi = ChiFunction.of(rs)
    if not rs.positive_roots:
        return 0.0
    if np.any(chi.pairings(x) <= 0):
        raise WallTooClose("∇u₀ leaves the positive chamber at the sample point")

    if route == "direct":
        pi_first, pi_second = _pi_ratios(cp, rs, point, "roots")
        value = (
            -np.sum(chi.gradient(x) * pi_first, axis=1)
            - np.einsum("nij,nij->n", chi.hessian(x), hessian)
            - np.einsum("nij,nij->n", inverse, pi_second)
        )
        return float(value[0])
    if route != "expanded":
        raise KEnergyError(f"Unknown Q route {route!r}")

    roots = chi.roots
    lowered = np.array([linalg.as_float_array(a) for a in rs.root_covectors()])
    gram = linalg.as_float_array(rs.gram)
    pairings_x = chi.pairings(x)[0]
    pairings_y = (point @ lowered.T)[0]
    coth = 1 / np.tanh(pairings_x)
    inner = roots @ gram @ roots.T
    quadratic = lowered @ inverse[0] @ lowered.T
    total = 0.0
    for a in range(len(roots)):
        total += (
            4 * coth[a] * inner[a, a] / pairings_y[a]
            - 2 * float(roots[a] @ hessian[0] @ roots[a]) / np.sinh(pairings_x[a]) ** 2
            - 2 * quadratic[a, a] / pairings_y[a] ** 2
        )
        for b in range(len(roots)):
            if a == b:
                continue
            total += 4 * coth[b] * inner[b, a] / pairings_y[a] - 4 * quadratic[
                a, b
            ] / (pairings_y[a] * pairings_y[b])
    return float(total)


@dataclass(frozen=True)
class BoundarySample:
    facet: int
    point: tuple[float, ...]
    eps: float
    normal_residual: float
    divergence: float

    @property
    def divergence_error(self) -> float:
        return abs(self.divergence - 2.0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "facet": self.facet,
            "point": list(self.point),
            "eps": self.eps,
            "normal_residual": self.normal_residual,
            "divergence": self.divergence,
        }


def _facet_samples(vertices: Sequence[Sequence[Any]]) -> list[np.ndarray]:
    points = np.array([linalg.as_float_array(v) for v in vertices], dtype=float)
    center = points.mean(axis=0)
    samples = [center]
    for vertex in points[:2]:
        samples.append((center + vertex) / 2)
    return samples


def boundary_contract(
    cp: ChamberPolytope, rs: RootSystem, eps: float
) -> list[BoundarySample]:
    """|u₀^{ij}u_{A,i}| and −u₀^{ij}_{,j}u_{A,i} at distance eps inside each outer facet.

    As eps → 0 the first tends to 0 and the second to 2.
    """
    u0 = SmoothCandidate.guillemin(cp.polytope)
    gram_inverse = linalg.as_float_array(linalg.inverse(rs.gram))
    samples: list[BoundarySample] = []
    for facet in cp.outer_facets:
        normal = linalg.as_float_array(facet.normal)
        step = gram_inverse @ normal / facet.sigma_scale(rs.gram)
        for base in _facet_samples(facet.vertices):
            point = (base - eps * step).reshape(1, cp.rank)
            _, inverse = _inverse_hessians(u0, point)
            third = u0.third(point)
            d_inverse = -np.einsum("nia,nabk,nbj->nkij", inverse, third, inverse)
            divergence = np.einsum("njij->ni", d_inverse)[0]
            samples.append(
                BoundarySample(
                    facet=facet.index,
                    point=tuple(float(v) for v in point[0]),
                    eps=eps,
                    normal_residual=float(np.linalg.norm(inverse[0] @ normal)),
                    divergence=float(-divergence @ normal),
                )
            )
    logger.debug("Boundary contract at eps=%g: %d samples", eps, len(samples))
    return samples
