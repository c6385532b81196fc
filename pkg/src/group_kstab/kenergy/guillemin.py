"""Guillemin's symplectic potential of 2P and its derivatives up to order four."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scipy.special import xlogy

from group_kstab import linalg
from group_kstab.polyint.polytope import Polytope


@dataclass(frozen=True, eq=False)
class GuilleminFunction:
    """u₀(y) = ½ Σ_Ã l_Ã(y) log l_Ã(y) over every facet of 2P.

    All methods take an (N, r) array of points and return arrays with the
    point axis first.
    """

    polytope: Polytope
    normals: np.ndarray
    offsets: np.ndarray

    @classmethod
    def of(cls, polytope: Polytope) -> GuilleminFunction:
        normals = np.array([linalg.as_float_array(f.covector) for f in polytope.facets])
        offsets = np.array([float(f.offset) for f in polytope.facets])
        return cls(polytope=polytope, normals=normals, offsets=offsets)

    def distances(self, points: np.ndarray) -> np.ndarray:
        """l_Ã(y) for every point and facet, shape (N, F)."""
        return self.offsets[None, :] - np.atleast_2d(points) @ self.normals.T

    def value(self, points: np.ndarray) -> np.ndarray:
        """Continuous up to ∂(2P); round-off below zero is clipped."""
        distances = np.clip(self.distances(points), 0.0, None)
        return 0.5 * np.sum(xlogy(distances, distances), axis=1)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """u₀,i = −½ Σ (log l + 1) u^i."""
        return -0.5 * (np.log(self.distances(points)) + 1) @ self.normals

    def hessian(self, points: np.ndarray) -> np.ndarray:
        """u₀,ij = ½ Σ u^i u^j / l."""
        inv = 1 / self.distances(points)
        return 0.5 * np.einsum("nf,fi,fj->nij", inv, self.normals, self.normals)

    def third(self, points: np.ndarray) -> np.ndarray:
        inv2 = self.distances(points) ** -2
        return 0.5 * np.einsum(
            "nf,fi,fj,fk->nijk", inv2, self.normals, self.normals, self.normals
        )

    def fourth(self, points: np.ndarray) -> np.ndarray:
        inv3 = self.distances(points) ** -3
        return np.einsum(
            "nf,fi,fj,fk,fl->nijkl",
            inv3,
            self.normals,
            self.normals,
            self.normals,
            self.normals,
        )
