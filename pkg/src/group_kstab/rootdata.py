"""Root data and Weyl group algebra.

Weights (y, roots, rho, fundamental weights, barycenters) live in one
rational chart of 𝔞* with scalar product ``<a, b> = aᵀ G b``. A root acts on a
weight through that scalar product, ``α(y) = (Gα)·y``. Covectors (facet
normals, gradients, points of 𝔞) pair canonically with weights, and a Weyl
element ``w`` acts on them by its transpose.
"""

from __future__ import annotations

import logging
import math
import re

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from group_kstab import linalg
from group_kstab.errors import ValidationError
from group_kstab.linalg import Matrix, RationalLike, Vector

logger = logging.getLogger(__name__)

DEFAULT_WEYL_GROUP_CAP = 10**6

MembershipMode = Literal["interior_Xi", "closure_Xi", "dominant"]


class RootDataError(ValidationError):
    """Base exception for invalid root data."""

    module = "rootdata"


class DegenerateGram(RootDataError):
    """Raised when the Gram matrix is not symmetric positive definite."""

    pass


class NonCrystallographic(RootDataError):
    """Raised when simple roots fail the Cartan integrality check."""

    pass


class WeylGroupTooLarge(RootDataError):
    """Raised when Weyl group generation exceeds the configured cap."""

    pass


class InvalidRootData(RootDataError):
    """Raised for shape errors or linearly dependent simple roots."""

    pass


@dataclass(frozen=True)
class RootSystem:
    """Reduced crystallographic root system with an explicit torus block.

    Build instances with :func:`build_root_system` or
    :func:`cartan_root_system`; every derived field is filled there.
    """

    rank: int
    gram: Matrix
    simple_roots: tuple[Vector, ...]
    positive_roots: tuple[Vector, ...]
    rho: Vector
    weyl_group: tuple[Matrix, ...]
    ss_basis: tuple[Vector, ...]
    t_basis: tuple[Vector, ...]
    simple_gram: Matrix
    fundamental_weights: tuple[Vector, ...]
    cartan_type: str | None = None
    _simple_gram_inverse: Matrix = field(default=(), repr=False, compare=False)

    @property
    def n(self) -> int:
        """Complex dimension r + 2|Φ₊| of the compactification."""
        return self.rank + 2 * len(self.positive_roots)

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple_roots)

    @property
    def toric_rank(self) -> int:
        return len(self.t_basis)

    @property
    def is_torus(self) -> bool:
        return not self.simple_roots

    def inner(self, a: Vector, b: Vector) -> Fraction:
        return linalg.dot(a, linalg.mat_vec(self.gram, b))

    def lower(self, v: Vector) -> Vector:
        """Covector Gv paired canonically: (Gv)·y = <v, y>."""
        return linalg.mat_vec(self.gram, v)

    def root_covectors(self) -> tuple[Vector, ...]:
        return tuple(self.lower(alpha) for alpha in self.positive_roots)

    def toric_covectors(self) -> tuple[Vector, ...]:
        """Basis of 𝔞_t as covectors; every root vanishes on them."""
        return tuple(self.lower(v) for v in self.t_basis)

    def norm_squared(self, v: Vector) -> Fraction:
        return self.inner(v, v)

    def act(self, w: Matrix, v: Vector) -> Vector:
        return linalg.mat_vec(w, v)

    def act_covector(self, w: Matrix, u: Vector) -> Vector:
        return linalg.mat_vec(linalg.transpose(w), u)

    def coroot(self, alpha: Vector) -> Vector:
        """α^∨ = 2α/|α|²."""
        return linalg.scale(2 / self.norm_squared(alpha), alpha)

    def reflection(self, index: int) -> Matrix:
        return _reflection_matrix(self.simple_roots[index], self.gram)

    def simple_coefficients(self, v: Vector) -> Vector:
        """Coefficients c of the semisimple part of v in the simple roots."""
        pairings = tuple(self.inner(v, alpha) for alpha in self.simple_roots)
        return linalg.mat_vec(self._simple_gram_inverse, pairings)

    def split(self, v: Vector) -> tuple[Vector, Vector]:
        """Decompose v = v_t + v_ss with v_ss in span(Φ₊) and v_t orthogonal to it."""
        if self.is_torus:
            return tuple(v), linalg.zeros(self.rank)
        coefficients = self.simple_coefficients(v)
        v_ss = linalg.zeros(self.rank)
        for c, alpha in zip(coefficients, self.simple_roots, strict=True):
            v_ss = linalg.add(v_ss, linalg.scale(c, alpha))
        return linalg.sub(v, v_ss), v_ss

    def xi_margin(self, v: Vector) -> Fraction | None:
        """min_i c_i|α_i|² for v = Σ c_i α_i, None when there are no roots."""
        if self.is_torus:
            return None
        coefficients = self.simple_coefficients(v)
        return min(
            c * self.simple_gram[i][i] for i, c in enumerate(coefficients)
        )


@dataclass(frozen=True)
class ChamberCertificate:
    """Outcome of a cone-membership test with its witness."""

    mode: MembershipMode
    holds: bool
    coefficients: Vector | None = None
    toric_component: Vector | None = None
    violated: str | None = None
    violated_value: Fraction | None = None
    degenerate: bool = False


def _reflection_matrix(alpha: Vector, gram: Matrix) -> Matrix:
    g_alpha = linalg.mat_vec(gram, alpha)
    norm = linalg.dot(alpha, g_alpha)
    r = len(alpha)
    return tuple(
        tuple(
            (Fraction(1) if p == q else Fraction(0)) - 2 * alpha[p] * g_alpha[q] / norm
            for q in range(r)
        )
        for p in range(r)
    )


def _validate_gram(rank: int, gram: Matrix) -> None:
    if len(gram) != rank or any(len(row) != rank for row in gram):
        raise InvalidRootData(f"gram must be a {rank}x{rank} matrix")
    if not linalg.is_positive_definite(gram):
        raise DegenerateGram(
            "gram must be symmetric positive definite", gram=[list(r) for r in gram]
        )


def _validate_crystallographic(simple_gram: Matrix) -> None:
    for i, row in enumerate(simple_gram):
        for j, value in enumerate(row):
            if i == j:
                continue
            cartan = 2 * value / simple_gram[j][j]
            if cartan.denominator != 1 or cartan > 0:
                raise NonCrystallographic(
                    f"2<α_{i + 1},α_{j + 1}>/<α_{j + 1},α_{j + 1}> = {cartan} "
                    "is not a non-positive integer",
                    pair=[i + 1, j + 1],
                    value=cartan,
                )


def _generate_weyl_group(
    generators: list[Matrix], rank: int, cap: int
) -> tuple[Matrix, ...]:
    ident = linalg.identity(rank)
    seen: dict[Matrix, None] = {ident: None}
    queue: deque[Matrix] = deque([ident])
    while queue:
        element = queue.popleft()
        for s in generators:
            product = linalg.mat_mul(s, element)
            if product in seen:
                continue
            seen[product] = None
            if len(seen) > cap:
                raise WeylGroupTooLarge(
                    f"Weyl group generation exceeded the cap of {cap} elements",
                    cap=cap,
                )
            queue.append(product)
    return tuple(seen)


def _root_sort_key(coefficients: Vector) -> tuple[Fraction, Vector]:
    return (sum(coefficients, Fraction(0)), coefficients)


def build_root_system(
    rank: int,
    gram: list[list[RationalLike]] | Matrix,
    simple_roots: list[list[RationalLike]] | tuple[Vector, ...],
    *,
    weyl_group_cap: int = DEFAULT_WEYL_GROUP_CAP,
    cartan_type: str | None = None,
) -> RootSystem:
    """Build a root system from a Gram matrix and simple roots.

    Args:
        rank: Dimension r of 𝔞*
        gram: r×r symmetric positive-definite rational matrix
        simple_roots: Simple roots in weight coordinates (may be empty)
        weyl_group_cap: Maximum number of Weyl group elements to generate
        cartan_type: Optional label carried into reports

    Returns:
        Fully populated RootSystem

    Raises:
        DegenerateGram: If gram is not symmetric positive definite
        NonCrystallographic: If a Cartan integer is not a non-positive integer
        WeylGroupTooLarge: If the group exceeds weyl_group_cap
        InvalidRootData: For shape errors or dependent simple roots
    """
    if rank < 1:
        raise InvalidRootData("rank must be a positive integer")
    try:
        gram_m = linalg.matrix(gram)
        roots = tuple(linalg.vector(alpha) for alpha in simple_roots)
    except ValueError as e:
        raise InvalidRootData(str(e)) from e
    _validate_gram(rank, gram_m)
    if any(len(alpha) != rank for alpha in roots):
        raise InvalidRootData(f"every simple root must have {rank} coordinates")
    if roots and linalg.rank(roots) != len(roots):
        raise InvalidRootData("simple roots must be linearly independent")

    simple_gram = tuple(
        tuple(linalg.dot(a, linalg.mat_vec(gram_m, b)) for b in roots) for a in roots
    )
    _validate_crystallographic(simple_gram)

    generators = [_reflection_matrix(alpha, gram_m) for alpha in roots]
    weyl_group = _generate_weyl_group(generators, rank, weyl_group_cap)
    logger.debug("Generated Weyl group of order %d", len(weyl_group))

    simple_gram_inverse = linalg.inverse(simple_gram) if roots else ()

    all_roots: set[Vector] = set()
    for w in weyl_group:
        for alpha in roots:
            all_roots.add(linalg.mat_vec(w, alpha))

    positive: list[tuple[Vector, Vector]] = []
    for beta in all_roots:
        pairings = tuple(linalg.dot(beta, linalg.mat_vec(gram_m, a)) for a in roots)
        coefficients = linalg.mat_vec(simple_gram_inverse, pairings)
        if all(c >= 0 for c in coefficients):
            positive.append((coefficients, beta))
    positive.sort(key=lambda item: _root_sort_key(item[0]))
    positive_roots = tuple(beta for _, beta in positive)

    rho = linalg.zeros(rank)
    for beta in positive_roots:
        rho = linalg.add(rho, beta)
    rho = linalg.scale(Fraction(1, 2), rho)

    root_covectors = [linalg.mat_vec(gram_m, alpha) for alpha in roots]
    t_basis = tuple(linalg.nullspace(root_covectors, rank))

    fundamental: list[Vector] = []
    for i in range(len(roots)):
        d_i = simple_gram[i][i] / 2
        weight = linalg.zeros(rank)
        for k, alpha in enumerate(roots):
            weight = linalg.add(
                weight, linalg.scale(d_i * simple_gram_inverse[i][k], alpha)
            )
        fundamental.append(weight)

    return RootSystem(
        rank=rank,
        gram=gram_m,
        simple_roots=roots,
        positive_roots=positive_roots,
        rho=rho,
        weyl_group=weyl_group,
        ss_basis=roots,
        t_basis=t_basis,
        simple_gram=simple_gram,
        fundamental_weights=tuple(fundamental),
        cartan_type=cartan_type,
        _simple_gram_inverse=simple_gram_inverse,
    )


def chamber_membership(
    rs: RootSystem, v: Vector, mode: MembershipMode
) -> ChamberCertificate:
    """Test v against Ξ, its closure, or the dominant chamber.

    Total function: a failed test returns a negative certificate naming the
    first violated constraint.
    """
    v = linalg.vector(v)
    if mode == "dominant":
        for index, alpha in enumerate(rs.positive_roots):
            value = rs.inner(v, alpha)
            if value < 0:
                return ChamberCertificate(
                    mode=mode,
                    holds=False,
                    violated=f"positive_root[{index}]",
                    violated_value=value,
                )
        return ChamberCertificate(mode=mode, holds=True)

    v_t, v_ss = rs.split(v)
    coefficients = rs.simple_coefficients(v_ss) if not rs.is_torus else ()
    degenerate = rs.is_torus
    if any(x != 0 for x in v_t):
        nonzero = next(x for x in v_t if x != 0)
        return ChamberCertificate(
            mode=mode,
            holds=False,
            coefficients=coefficients,
            toric_component=v_t,
            violated="toric_component",
            violated_value=nonzero,
            degenerate=degenerate,
        )
    for index, c in enumerate(coefficients):
        if (mode == "interior_Xi" and c <= 0) or (mode == "closure_Xi" and c < 0):
            return ChamberCertificate(
                mode=mode,
                holds=False,
                coefficients=coefficients,
                toric_component=v_t,
                violated=f"c_{index + 1}",
                violated_value=c,
                degenerate=degenerate,
            )
    return ChamberCertificate(
        mode=mode,
        holds=True,
        coefficients=coefficients,
        toric_component=v_t,
        degenerate=degenerate,
    )


def dominant_representative(rs: RootSystem, v: Vector) -> tuple[Matrix, Vector]:
    """Return (w, w·v) with w·v dominant, by repeated simple reflections."""
    current = linalg.vector(v)
    w = linalg.identity(rs.rank)
    reflections = [rs.reflection(i) for i in range(rs.semisimple_rank)]
    changed = True
    while changed:
        changed = False
        for s, alpha in zip(reflections, rs.simple_roots, strict=True):
            if rs.inner(current, alpha) < 0:
                current = linalg.mat_vec(s, current)
                w = linalg.mat_mul(s, w)
                changed = True
    return w, current


def check_lattice_pairings(rs: RootSystem, covectors: list[Vector]) -> list[str]:
    """Warn where a root pairs non-integrally with a facet normal."""
    warnings: list[str] = []
    for alpha in rs.positive_roots:
        for u in covectors:
            value = linalg.dot(alpha, u)
            if value.denominator != 1:
                warnings.append(
                    f"root {[str(x) for x in alpha]} pairs to {value} with "
                    f"facet normal {[str(x) for x in u]} (expected an integer)"
                )
    return warnings


_CARTAN_PATTERN = re.compile(r"^\s*([ABCDG])\s*_?\s*(\d+)\s*$")


def _parse_cartan_type(cartan_type: str) -> tuple[str, int]:
    match = _CARTAN_PATTERN.match(cartan_type.upper())
    if match is None:
        raise InvalidRootData(f"Unrecognized Cartan type {cartan_type!r}")
    family, n = match.group(1), int(match.group(2))
    minimum = {"A": 1, "B": 2, "C": 2, "D": 4, "G": 2}[family]
    if n < minimum or (family == "G" and n != 2):
        raise InvalidRootData(f"Unsupported Cartan type {cartan_type!r}")
    return family, n


def _simple_root_gram(family: str, n: int) -> list[list[Fraction]]:
    b = [[Fraction(0)] * n for _ in range(n)]
    if family == "G":
        b[0][0], b[1][1] = Fraction(2, 3), Fraction(2)
        b[0][1] = b[1][0] = Fraction(-1)
        return b
    lengths = [Fraction(2)] * n
    if family == "B":
        lengths[n - 1] = Fraction(1)
    elif family == "C":
        lengths = [Fraction(1)] * (n - 1) + [Fraction(2)]
    edges = [(i, i + 1) for i in range(n - 1)]
    if family == "D":
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    for i in range(n):
        b[i][i] = lengths[i]
    for i, j in edges:
        value = -min(lengths[i], lengths[j]) / 2 if lengths[i] == lengths[j] else Fraction(-1)
        b[i][j] = b[j][i] = value
    return b


def weyl_group_order(cartan_type: str) -> int:
    family, n = _parse_cartan_type(cartan_type)
    if family == "A":
        return math.factorial(n + 1)
    if family in ("B", "C"):
        return 2**n * math.factorial(n)
    if family == "D":
        return 2 ** (n - 1) * math.factorial(n)
    return 12


def cartan_root_system(
    cartan_type: str,
    toric_rank: int = 0,
    *,
    weyl_group_cap: int = DEFAULT_WEYL_GROUP_CAP,
) -> RootSystem:
    """Root system of a Cartan type in fundamental-weight coordinates.

    Long roots have length² 2. A toric block of the given rank is appended
    with identity Gram.
    """
    family, n = _parse_cartan_type(cartan_type)
    b = linalg.matrix(_simple_root_gram(family, n))
    cartan = tuple(tuple(2 * b[i][j] / b[j][j] for j in range(n)) for i in range(n))
    a_inv = linalg.inverse(cartan)
    g_ss = linalg.mat_mul(linalg.mat_mul(a_inv, b), linalg.transpose(a_inv))
    rank = n + toric_rank
    gram = [
        [
            g_ss[i][j] if i < n and j < n else Fraction(int(i == j))
            for j in range(rank)
        ]
        for i in range(rank)
    ]
    simple_roots = [list(cartan[i]) + [Fraction(0)] * toric_rank for i in range(n)]
    label = f"{family}{n}" + (f"+T{toric_rank}" if toric_rank else "")
    return build_root_system(
        rank, gram, simple_roots, weyl_group_cap=weyl_group_cap, cartan_type=label
    )
