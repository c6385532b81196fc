"""Convex piecewise-linear test functions and their gradient regions."""

from __future__ import annotations

import logging

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Any

from group_kstab import linalg
from group_kstab.errors import ValidationError
from group_kstab.linalg import RationalLike, Vector
from group_kstab.polyint.polytope import (
    HalfSpace,
    Simplex,
    enumerate_vertices,
    simplex_volume,
    triangulate,
)
from group_kstab.rootdata import RootSystem

logger = logging.getLogger(__name__)


class CriteriaError(ValidationError):
    """Base exception for stability-criteria errors."""

    module = "criteria"


class NonConvexPieces(CriteriaError):
    """Raised when the max-regions of a PL function fail to tile a simplex."""

    pass


@dataclass(frozen=True, order=True)
class AffinePiece:
    """y ↦ gradient·y + offset, gradient a covector."""

    gradient: Vector
    offset: Fraction

    def value(self, y: Sequence[Fraction]) -> Fraction:
        return linalg.dot(self.gradient, y) + self.offset


@dataclass(frozen=True)
class PLConvexFunction:
    """u(y) = max_k (w_k·y + b_k); pieces are deduplicated and sorted."""

    pieces: tuple[AffinePiece, ...]
    w_invariant: bool = False
    label: str = ""

    @classmethod
    def from_pieces(
        cls,
        pieces: Iterable[tuple[Sequence[RationalLike], RationalLike]],
        *,
        w_invariant: bool = False,
        label: str = "",
    ) -> PLConvexFunction:
        parsed = {
            AffinePiece(linalg.vector(g), linalg.parse_rational(b)) for g, b in pieces
        }
        if not parsed:
            raise NonConvexPieces("A PL function needs at least one affine piece")
        if len({len(p.gradient) for p in parsed}) != 1:
            raise NonConvexPieces("Affine pieces disagree on the dimension")
        return cls(pieces=tuple(sorted(parsed)), w_invariant=w_invariant, label=label)

    @classmethod
    def affine(
        cls, gradient: Sequence[RationalLike], offset: RationalLike = 0, label: str = ""
    ) -> PLConvexFunction:
        return cls.from_pieces([(gradient, offset)], label=label)

    @classmethod
    def constant(cls, rank: int, value: RationalLike) -> PLConvexFunction:
        return cls.from_pieces([(linalg.zeros(rank), value)], w_invariant=True)

    @classmethod
    def toric_linear(cls, rs: RootSystem, v: Vector) -> PLConvexFunction:
        """l_v(y) = ⟨v, y⟩ for a weight v; W-invariant when v ∈ 𝔞*_t."""
        _, v_ss = rs.split(v)
        return cls.from_pieces(
            [(rs.lower(v), 0)],
            w_invariant=all(x == 0 for x in v_ss),
            label="toric_linear",
        )

    @classmethod
    def weyl_orbit_max(
        cls, rs: RootSystem, weight: Vector, offset: RationalLike = 0, label: str = ""
    ) -> PLConvexFunction:
        """max_{w∈W} ⟨w·weight, y⟩ + offset."""
        pieces = [(rs.lower(rs.act(w, weight)), offset) for w in rs.weyl_group]
        return cls.from_pieces(pieces, w_invariant=True, label=label or "weyl_orbit_max")

    @property
    def rank(self) -> int:
        return len(self.pieces[0].gradient)

    def evaluate(self, y: Sequence[RationalLike]) -> Fraction:
        point = linalg.vector(y)
        return max(p.value(point) for p in self.pieces)

    __call__ = evaluate

    def symmetrized(self, rs: RootSystem) -> PLConvexFunction:
        """max over the W-orbit of every piece, which is W-invariant."""
        pieces = [
            (rs.act_covector(w, p.gradient), p.offset)
            for p in self.pieces
            for w in rs.weyl_group
        ]
        return PLConvexFunction.from_pieces(pieces, w_invariant=True, label=self.label)

    def plus_affine(
        self, gradient: Sequence[RationalLike], offset: RationalLike = 0
    ) -> PLConvexFunction:
        g = linalg.vector(gradient)
        c = linalg.parse_rational(offset)
        return PLConvexFunction(
            pieces=tuple(
                sorted(
                    AffinePiece(linalg.add(p.gradient, g), p.offset + c)
                    for p in self.pieces
                )
            ),
            w_invariant=False,
            label=self.label,
        )

    def shifted(self, c0: RationalLike) -> PLConvexFunction:
        c = linalg.parse_rational(c0)
        return PLConvexFunction(
            pieces=tuple(AffinePiece(p.gradient, p.offset + c) for p in self.pieces),
            w_invariant=self.w_invariant,
            label=self.label,
        )

    def is_w_invariant_on(self, rs: RootSystem, points: Iterable[Vector]) -> bool:
        for y in points:
            value = self.evaluate(y)
            for w in rs.weyl_group:
                if self.evaluate(rs.act(w, y)) != value:
                    return False
        return True

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "w_invariant": self.w_invariant,
            "pieces": [
                {
                    "gradient": [str(x) for x in p.gradient],
                    "offset": str(p.offset),
                }
                for p in self.pieces
            ],
        }


def _local_constraints(
    u: PLConvexFunction, k: int, base: Vector, columns: list[Vector]
) -> list[HalfSpace]:
    d = len(columns)
    halfspaces: list[HalfSpace] = []
    for j in range(d):
        row = tuple(Fraction(-1) if i == j else Fraction(0) for i in range(d))
        halfspaces.append((row, Fraction(0)))
    halfspaces.append((tuple(Fraction(1) for _ in range(d)), Fraction(1)))
    mine = u.pieces[k]
    for j, other in enumerate(u.pieces):
        if j == k:
            continue
        diff = linalg.sub(mine.gradient, other.gradient)
        row = tuple(-linalg.dot(diff, col) for col in columns)
        bound = linalg.dot(diff, base) + mine.offset - other.offset
        halfspaces.append((row, bound))
    return halfspaces


def piece_regions(
    u: PLConvexFunction, simplex: Simplex
) -> list[tuple[AffinePiece, list[Simplex]]]:
    """Split a simplex into the regions where each piece attains the max.

    Works for full-dimensional and lower-dimensional (facet) simplices alike;
    measure-zero ties are dropped.

    Raises:
        NonConvexPieces: If the regions do not tile the simplex exactly
    """
    base = simplex[0]
    columns = [linalg.sub(v, base) for v in simplex[1:]]
    d = len(columns)
    if d == 0:
        best = max(u.pieces, key=lambda p: p.value(base))
        return [(best, [simplex])]

    regions: list[tuple[AffinePiece, list[Simplex]]] = []
    covered = Fraction(0)
    for k, piece in enumerate(u.pieces):
        halfspaces = _local_constraints(u, k, base, columns)
        local_vertices = enumerate_vertices(halfspaces, d)
        if linalg.affine_rank(local_vertices) < d:
            continue
        local = triangulate(local_vertices, halfspaces, "centroid")
        covered += sum((simplex_volume(s) for s in local), Fraction(0))
        mapped = [
            tuple(
                linalg.add(
                    base,
                    tuple(
                        sum((s[j] * col[i] for j, col in enumerate(columns)), Fraction(0))
                        for i in range(len(base))
                    ),
                )
                for s in local_simplex
            )
            for local_simplex in local
        ]
        regions.append((piece, mapped))
    if covered != Fraction(1, factorial(d)):
        raise NonConvexPieces(
            "Gradient regions do not tile the simplex",
            covered=covered * factorial(d),
            pieces=len(u.pieces),
        )
    return regions
