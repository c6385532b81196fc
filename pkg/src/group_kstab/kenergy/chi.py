"""χ(x) = −2 Σ_{α∈Φ₊} log sinh α(x) on the positive chamber of 𝔞."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from group_kstab import linalg
from group_kstab.rootdata import RootSystem

LOG2 = float(np.log(2.0))


@dataclass(frozen=True, eq=False)
class ChiFunction:
    """χ with closed-form derivatives; every root acts on x by α·x."""

    roots: np.ndarray
    rho: np.ndarray

    @classmethod
    def of(cls, rs: RootSystem) -> ChiFunction:
        roots = np.array(
            [linalg.as_float_array(alpha) for alpha in rs.positive_roots], dtype=float
        ).reshape(len(rs.positive_roots), rs.rank)
        return cls(roots=roots, rho=linalg.as_float_array(rs.rho))

    def pairings(self, x: np.ndarray) -> np.ndarray:
        """α(x) for every point and positive root, shape (N, m)."""
        return np.atleast_2d(x) @ self.roots.T

    def value(self, x: np.ndarray) -> np.ndarray:
        return -2 * np.sum(np.log(np.sinh(self.pairings(x))), axis=1)

    def value_plus_four_rho(self, x: np.ndarray) -> np.ndarray:
        """χ(x) + 4ρ·x = Σ [2 log 2 − 2 log(1 − e^{−2α(x)})], bounded at infinity."""
        a = self.pairings(x)
        return np.sum(2 * LOG2 - 2 * np.log(-np.expm1(-2 * a)), axis=1)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """χ_p = −2 Σ α_p coth α(x)."""
        return -2 * (1 / np.tanh(self.pairings(x))) @ self.roots

    def gradient_plus_four_rho(self, x: np.ndarray) -> np.ndarray:
        """χ_p + 4ρ_p = −2 Σ α_p (coth α(x) − 1) = −4 Σ α_p / (e^{2α(x)} − 1)."""
        return -4 * (1 / np.expm1(2 * self.pairings(x))) @ self.roots

    def hessian(self, x: np.ndarray) -> np.ndarray:
        """χ_pq = 2 Σ α_p α_q / sinh² α(x)."""
        weights = 2 / np.sinh(self.pairings(x)) ** 2
        return np.einsum("nm,mp,mq->npq", weights, self.roots, self.roots)
