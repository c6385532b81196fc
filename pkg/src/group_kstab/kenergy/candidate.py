"""Smooth candidates u = u₀ + f with f a combination of exact polynomials."""

from __future__ import annotations

import itertools
import logging

from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any

import numpy as np

from group_kstab import linalg
from group_kstab.errors import ValidationError
from group_kstab.kenergy.guillemin import GuilleminFunction
from group_kstab.polyint.polynomial import Polynomial
from group_kstab.polyint.polytope import Polytope
from group_kstab.rootdata import RootSystem

logger = logging.getLogger(__name__)


class KEnergyError(ValidationError):
    """Base exception for K-energy evaluation errors."""

    module = "kenergy"


class NotConvexAtNodes(KEnergyError):
    """Raised when ∇²u fails to be positive definite at a quadrature node."""

    pass


class InvalidCandidate(KEnergyError):
    """Raised for malformed candidate files."""

    pass


def _derivative(p: Polynomial, indices: tuple[int, ...]) -> Polynomial:
    for i in indices:
        p = p.derivative(i)
    return p


@dataclass(frozen=True, eq=False)
class SmoothCandidate:
    """u = base + Σ_k a_k B_k + g·y + c with float coefficients.

    ``base`` is Guillemin's function of 2P or absent. Derivatives of the
    polynomial part come from exact derivative polynomials evaluated in
    floating point.
    """

    rank: int
    base: GuilleminFunction | None
    basis: tuple[Polynomial, ...]
    coefficients: np.ndarray
    affine: np.ndarray = field(default_factory=lambda: np.zeros(0))
    _cache: dict[tuple[int, tuple[int, ...]], Polynomial] = field(
        default_factory=dict, repr=False
    )

    @classmethod
    def guillemin(
        cls,
        polytope: Polytope,
        basis: Sequence[Polynomial] = (),
        coefficients: Sequence[float] | None = None,
    ) -> SmoothCandidate:
        return cls(
            rank=polytope.rank,
            base=GuilleminFunction.of(polytope),
            basis=tuple(basis),
            coefficients=np.asarray(
                coefficients if coefficients is not None else np.zeros(len(basis)),
                dtype=float,
            ),
            affine=np.zeros(polytope.rank + 1),
        )

    @classmethod
    def polynomial(
        cls, rank: int, basis: Sequence[Polynomial], coefficients: Sequence[float]
    ) -> SmoothCandidate:
        return cls(
            rank=rank,
            base=None,
            basis=tuple(basis),
            coefficients=np.asarray(coefficients, dtype=float),
            affine=np.zeros(rank + 1),
        )

    @classmethod
    def flat(cls, rank: int, scale: float = 1.0) -> SmoothCandidate:
        """u = scale·|y|²/2 (coordinate norm)."""
        half = Polynomial(rank)
        for k in range(rank):
            half = half + Polynomial.variable(rank, k) ** 2 * Fraction(1, 2)
        return cls.polynomial(rank, [half], [scale])

    def _poly(self, k: int, indices: tuple[int, ...]) -> Polynomial:
        key = (k, tuple(sorted(indices)))
        if key not in self._cache:
            self._cache[key] = _derivative(self.basis[k], key[1])
        return self._cache[key]

    def _combine(self, points: np.ndarray, order: int) -> np.ndarray:
        n = points.shape[0]
        shape = (n,) + (self.rank,) * order
        out = np.zeros(shape)
        for k, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for indices in itertools.product(range(self.rank), repeat=order):
                derivative = self._poly(k, indices)
                out[(slice(None), *indices)] += a * derivative.evaluate_many(points)
        return out

    def _affine_parts(self) -> tuple[np.ndarray, float]:
        if self.affine.size == 0:
            return np.zeros(self.rank), 0.0
        return self.affine[: self.rank], float(self.affine[self.rank])

    def values(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        g, c = self._affine_parts()
        out = self._combine(points, 0) + points @ g + c
        if self.base is not None:
            out = out + self.base.value(points)
        return out

    def gradients(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        g, _ = self._affine_parts()
        out = self._combine(points, 1) + g[None, :]
        if self.base is not None:
            out = out + self.base.gradient(points)
        return out

    def hessians(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        out = self._combine(points, 2)
        if self.base is not None:
            out = out + self.base.hessian(points)
        return out

    def third(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        out = self._combine(points, 3)
        if self.base is not None:
            out = out + self.base.third(points)
        return out

    def fourth(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        out = self._combine(points, 4)
        if self.base is not None:
            out = out + self.base.fourth(points)
        return out

    def with_coefficients(self, coefficients: Sequence[float]) -> SmoothCandidate:
        return replace(self, coefficients=np.asarray(coefficients, dtype=float))

    def plus(self, f: Polynomial, scale: float = 1.0) -> SmoothCandidate:
        """u + scale·f as a new candidate (f appended to the basis)."""
        return replace(
            self,
            basis=self.basis + (f,),
            coefficients=np.append(self.coefficients, scale),
            _cache={},
        )

    def plus_constant(self, c0: float) -> SmoothCandidate:
        g, c = self._affine_parts()
        return replace(self, affine=np.append(g, c + c0))

    def normalized(self) -> SmoothCandidate:
        """ũ = u − ∇u(O)·y − u(O), so ũ(O) = 0 and ∇ũ(O) = 0."""
        origin = np.zeros((1, self.rank))
        g, c = self._affine_parts()
        gradient = self.gradients(origin)[0]
        value = float(self.values(origin)[0])
        return replace(self, affine=np.append(g - gradient, c - value))

    def min_hessian_eigenvalues(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(np.linalg.eigvalsh(self.hessians(points))[:, 0])

    def check_convex(self, points: np.ndarray) -> None:
        """Raise NotConvexAtNodes unless ∇²u is positive definite at every point."""
        eigenvalues = self.min_hessian_eigenvalues(points)
        if eigenvalues.size and float(np.min(eigenvalues)) <= 0:
            worst = int(np.argmin(eigenvalues))
            raise NotConvexAtNodes(
                "Candidate Hessian is not positive definite",
                node=[float(x) for x in np.atleast_2d(points)[worst]],
                min_eigenvalue=float(eigenvalues[worst]),
            )

    def to_dict(self) -> dict[str, Any]:
        terms = []
        for p, a in zip(self.basis, self.coefficients, strict=True):
            for exponent, c in p.items():
                terms.append({"exponent": list(exponent), "coefficient": float(a * c)})
        g, c = self._affine_parts()
        return {
            "base": "guillemin" if self.base is not None else "none",
            "terms": terms,
            "affine": {"gradient": [float(x) for x in g], "constant": c},
        }


def symmetric_basis(rs: RootSystem, degree: int) -> list[Polynomial]:
    """W-averaged monomials of total degree 2..degree, linearly independent."""
    rank = rs.rank
    operators = [linalg.transpose(w) for w in rs.weyl_group]
    basis: list[Polynomial] = []
    rows: list[dict[tuple[int, ...], Fraction]] = []
    for total in range(2, degree + 1):
        for exponent in _exponents(rank, total):
            monomial = Polynomial(rank, {exponent: 1})
            averaged = Polynomial(rank)
            for w_t in operators:
                averaged = averaged + monomial.compose_affine(linalg.zeros(rank), w_t)
            averaged = averaged * Fraction(1, len(operators))
            if averaged.is_zero():
                continue
            candidate_rows = rows + [dict(averaged.items())]
            if _rank_of(candidate_rows) == len(candidate_rows):
                rows = candidate_rows
                basis.append(averaged)
    logger.debug("Symmetric basis up to degree %d: %d functions", degree, len(basis))
    return basis


def _exponents(rank: int, total: int) -> list[tuple[int, ...]]:
    result = [
        e for e in itertools.product(range(total + 1), repeat=rank) if sum(e) == total
    ]
    return sorted(result, reverse=True)


def _rank_of(rows: list[dict[tuple[int, ...], Fraction]]) -> int:
    keys = sorted({k for row in rows for k in row})
    matrix = [[row.get(k, Fraction(0)) for k in keys] for row in rows]
    return linalg.rank(matrix)


def candidate_from_dict(data: dict[str, Any], polytope: Polytope) -> SmoothCandidate:
    """Build a candidate from ``{"base": ..., "terms": [{exponent, coefficient}]}``.

    Raises:
        InvalidCandidate: For unknown bases or malformed terms
    """
    base = data.get("base", "guillemin")
    if base not in ("guillemin", "none"):
        raise InvalidCandidate(f"Unknown candidate base {base!r}")
    basis: list[Polynomial] = []
    coefficients: list[float] = []
    for index, term in enumerate(data.get("terms", [])):
        exponent = tuple(term.get("exponent", ()))
        if len(exponent) != polytope.rank or any(
            not isinstance(a, int) or a < 0 for a in exponent
        ):
            raise InvalidCandidate(f"Term {index} has an invalid exponent", term=index)
        coefficient = term.get("coefficient")
        if not isinstance(coefficient, (int, float)) or isinstance(coefficient, bool):
            raise InvalidCandidate(f"Term {index} needs a numeric coefficient", term=index)
        basis.append(Polynomial(polytope.rank, {exponent: 1}))
        coefficients.append(float(coefficient))
    if base == "guillemin":
        return SmoothCandidate.guillemin(polytope, basis, coefficients)
    return SmoothCandidate.polynomial(polytope.rank, basis, coefficients)
