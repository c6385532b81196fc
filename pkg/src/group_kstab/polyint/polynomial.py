"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from math import factorial
from typing import Union

import numpy as np

from group_kstab import linalg
from group_kstab.linalg import RationalLike

Monomial = tuple[int, ...]
Scalar = Union[Fraction, int]


class Polynomial:
    """Polynomial in ``nvars`` variables as a map exponent → Fraction.

    Instances are immutable; zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_float_cache", "nvars")

    def __init__(self, nvars: int, terms: Mapping[Monomial, RationalLike] | None = None):
        self.nvars = nvars
        cleaned: dict[Monomial, Fraction] = {}
        for exponent, coefficient in (terms or {}).items():
            if len(exponent) != nvars:
                raise ValueError(
                    f"Exponent {exponent} does not match {nvars} variables"
                )
            value = linalg.parse_rational(coefficient)
            if value != 0:
                cleaned[tuple(exponent)] = value
        self._terms = cleaned
        self._float_cache: tuple[np.ndarray, np.ndarray] | None = None

    @classmethod
    def constant(cls, nvars: int, value: RationalLike) -> Polynomial:
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> Polynomial:
        exponent = tuple(1 if k == index else 0 for k in range(nvars))
        return cls(nvars, {exponent: 1})

    @classmethod
    def linear(
        cls, covector: Sequence[Fraction], constant: RationalLike = 0
    ) -> Polynomial:
        """The affine function y ↦ covector·y + constant."""
        nvars = len(covector)
        terms: dict[Monomial, RationalLike] = {(0,) * nvars: constant}
        for k, c in enumerate(covector):
            exponent = tuple(1 if j == k else 0 for j in range(nvars))
            terms[exponent] = c
        return cls(nvars, terms)

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterable[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items())

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degrees = {sum(e) for e in self._terms}
        if not degrees:
            return True
        if len(degrees) != 1:
            return False
        return degree is None or degrees == {degree}

    def coefficient(self, exponent: Monomial) -> Fraction:
        return self._terms.get(tuple(exponent), Fraction(0))

    def _check(self, other: Polynomial) -> None:
        if other.nvars != self.nvars:
            raise ValueError(
                f"Variable count mismatch: {self.nvars} vs {other.nvars}"
            )

    def __add__(self, other: Polynomial | Scalar) -> Polynomial:
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        self._check(other)
        terms = dict(self._terms)
        for exponent, c in other._terms.items():
            terms[exponent] = terms.get(exponent, Fraction(0)) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: Polynomial | Scalar) -> Polynomial:
        return self + (-other)

    def __rsub__(self, other: Scalar) -> Polynomial:
        return (-self) + other

    def __mul__(self, other: Polynomial | Scalar) -> Polynomial:
        if not isinstance(other, Polynomial):
            factor = Fraction(other)
            return Polynomial(self.nvars, {e: c * factor for e, c in self._terms.items()})
        self._check(other)
        terms: dict[Monomial, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exponent = tuple(a + b for a, b in zip(e1, e2, strict=True))
                terms[exponent] = terms.get(exponent, Fraction(0)) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> Polynomial:
        if power < 0:
            raise ValueError("Negative powers are not polynomials")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return "Polynomial(0)"
        parts = []
        for exponent, c in self.items():
            monomial = "*".join(
                f"y{k}" + (f"^{a}" if a > 1 else "") for k, a in enumerate(exponent) if a
            )
            parts.append(f"{c}" + (f"*{monomial}" if monomial else ""))
        return "Polynomial(" + " + ".join(parts) + ")"

    def derivative(self, index: int) -> Polynomial:
        terms: dict[Monomial, Fraction] = {}
        for exponent, c in self._terms.items():
            a = exponent[index]
            if a == 0:
                continue
            lowered = exponent[:index] + (a - 1,) + exponent[index + 1 :]
            terms[lowered] = c * a
        return Polynomial(self.nvars, terms)

    def gradient(self) -> tuple[Polynomial, ...]:
        return tuple(self.derivative(k) for k in range(self.nvars))

    def hessian(self) -> tuple[tuple[Polynomial, ...], ...]:
        gradient = self.gradient()
        return tuple(tuple(g.derivative(k) for k in range(self.nvars)) for g in gradient)

    def directional_derivative(self, direction: Sequence[Fraction]) -> Polynomial:
        """Σ_k direction_k ∂_k of this polynomial."""
        result = Polynomial(self.nvars)
        for k, d in enumerate(direction):
            if d != 0:
                result = result + self.derivative(k) * d
        return result

    def evaluate(self, point: Sequence[RationalLike]) -> Fraction:
        values = linalg.vector(point)
        total = Fraction(0)
        for exponent, c in self._terms.items():
            term = c
            for x, a in zip(values, exponent, strict=True):
                if a:
                    term *= x**a
            total += term
        return total

    __call__ = evaluate

    def _float_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if self._float_cache is None:
            items = self.items()
            exponents = np.array(
                [e for e, _ in items], dtype=float
            ).reshape(len(items), self.nvars)
            coefficients = np.array([float(c) for _, c in items], dtype=float)
            self._float_cache = (exponents, coefficients)
        return self._float_cache

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Float evaluation at an (N, nvars) array of points."""
        exponents, coefficients = self._float_arrays()
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if not len(coefficients):
            return np.zeros(points.shape[0])
        powers = np.prod(points[:, None, :] ** exponents[None, :, :], axis=2)
        return np.asarray(powers @ coefficients)

    def compose_affine(
        self, origin: Sequence[Fraction], columns: Sequence[Sequence[Fraction]]
    ) -> Polynomial:
        """Substitute y = origin + Σ_j s_j columns[j]; result is a polynomial in s."""
        k = len(columns)
        images = []
        for i in range(self.nvars):
            images.append(
                Polynomial.linear(tuple(col[i] for col in columns), origin[i])
                if k
                else Polynomial.constant(0, origin[i])
            )
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, a: int) -> Polynomial:
            key = (i, a)
            if key not in powers:
                powers[key] = images[i] ** a
            return powers[key]

        result = Polynomial(k)
        for exponent, c in self._terms.items():
            term = Polynomial.constant(k, c)
            for i, a in enumerate(exponent):
                if a:
                    term = term * power(i, a)
            result = result + term
        return result


def standard_simplex_integral(p: Polynomial) -> Fraction:
    """∫ p over {s ≥ 0, Σs ≤ 1} via ∫ s^a = ∏a_i! / (d + |a|)!."""
    d = p.nvars
    total = Fraction(0)
    for exponent, c in p.items():
        numerator = 1
        for a in exponent:
            numerator *= factorial(a)
        total += c * Fraction(numerator, factorial(d + sum(exponent)))
    return total


def product_of_linear_forms(
    covectors: Iterable[Sequence[Fraction]], nvars: int, power: int = 1
) -> Polynomial:
    result = Polynomial.constant(nvars, 1)
    for covector in covectors:
        result = result * Polynomial.linear(tuple(covector)) ** power
    return result
