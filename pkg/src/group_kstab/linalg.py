"""Exact rational linear algebra on tuples of Fractions.

Vectors are ``tuple[Fraction, ...]`` and matrices are tuples of row vectors.
Everything here is exact; callers convert to numpy only at the float
boundary (``as_float_array``).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from fractions import Fraction
from typing import Union

import numpy as np

__all__ = [
    "Matrix",
    "RationalLike",
    "Vector",
    "add",
    "affine_rank",
    "as_float_array",
    "determinant",
    "dot",
    "identity",
    "inverse",
    "is_positive_definite",
    "mat_mul",
    "mat_vec",
    "matrix",
    "nullspace",
    "parse_rational",
    "rank",
    "rational_record",
    "rref",
    "scale",
    "solve",
    "sub",
    "transpose",
    "vector",
    "vector_record",
    "zeros",
]

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]
RationalLike = Union[Fraction, int, str]


def parse_rational(value: RationalLike) -> Fraction:
    """Parse an exact rational from ``"p/q"`` strings, ints or Fractions.

    Floats are refused: exact fields must never carry binary rounding.

    Raises:
        ValueError: If the value is a float, a bool, or an unparsable string
    """
    if isinstance(value, bool):
        raise ValueError(f"Expected a rational, got boolean {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Invalid rational literal {value!r}") from e
    raise ValueError(
        f"Expected a rational as int or 'p/q' string, got {type(value).__name__}"
    )


def vector(values: Iterable[RationalLike]) -> Vector:
    return tuple(parse_rational(v) for v in values)


def matrix(rows: Iterable[Iterable[RationalLike]]) -> Matrix:
    return tuple(vector(row) for row in rows)


def zeros(n: int) -> Vector:
    return tuple(Fraction(0) for _ in range(n))


def identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))


def add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def scale(c: Fraction | int, a: Sequence[Fraction]) -> Vector:
    return tuple(c * x for x in a)


def transpose(m: Sequence[Sequence[Fraction]]) -> Matrix:
    if not m:
        return ()
    return tuple(tuple(row[j] for row in m) for j in range(len(m[0])))


def mat_vec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form by Gauss-Jordan elimination.

    Returns:
        The reduced rows (zero rows dropped) and the pivot column indices
    """
    work = [list(row) for row in rows]
    if not work:
        return [], []
    n_cols = len(work[0])
    pivots: list[int] = []
    pivot_row = 0
    for col in range(n_cols):
        found = next(
            (r for r in range(pivot_row, len(work)) if work[r][col] != 0), None
        )
        if found is None:
            continue
        work[pivot_row], work[found] = work[found], work[pivot_row]
        pivot = work[pivot_row][col]
        work[pivot_row] = [x / pivot for x in work[pivot_row]]
        for r in range(len(work)):
            if r != pivot_row and work[r][col] != 0:
                factor = work[r][col]
                work[r] = [
                    x - factor * y for x, y in zip(work[r], work[pivot_row], strict=True)
                ]
        pivots.append(col)
        pivot_row += 1
        if pivot_row == len(work):
            break
    return work[:pivot_row], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    """Dimension of the affine hull of a point set (-1 for the empty set)."""
    if not points:
        return -1
    base = points[0]
    return rank([sub(p, base) for p in points[1:]]) if len(points) > 1 else 0


def nullspace(rows: Sequence[Sequence[Fraction]], n_cols: int) -> list[Vector]:
    """Basis of {x : rows·x = 0}, one vector per free column."""
    if not rows:
        return list(identity(n_cols))
    reduced, pivots = rref(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    basis: list[Vector] = []
    for f in free:
        x = [Fraction(0)] * n_cols
        x[f] = Fraction(1)
        for row, p in zip(reduced, pivots, strict=True):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vector:
    """Solve the square system a·x = b exactly.

    Raises:
        ValueError: If the matrix is singular
    """
    n = len(a)
    augmented = [list(row) + [b[i]] for i, row in enumerate(a)]
    reduced, pivots = rref(augmented)
    if pivots != list(range(n)):
        raise ValueError("Singular linear system")
    return tuple(row[n] for row in reduced)


def inverse(a: Sequence[Sequence[Fraction]]) -> Matrix:
    """Exact inverse of a square matrix.

    Raises:
        ValueError: If the matrix is singular
    """
    n = len(a)
    ident = identity(n)
    augmented = [list(row) + list(ident[i]) for i, row in enumerate(a)]
    reduced, pivots = rref(augmented)
    if pivots[:n] != list(range(n)) or len(reduced) < n:
        raise ValueError("Singular matrix")
    return tuple(tuple(row[n:]) for row in reduced)


def determinant(a: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    work = [list(row) for row in a]
    det = Fraction(1)
    for col in range(n):
        found = next((r for r in range(col, n) if work[r][col] != 0), None)
        if found is None:
            return Fraction(0)
        if found != col:
            work[col], work[found] = work[found], work[col]
            det = -det
        pivot = work[col][col]
        det *= pivot
        for r in range(col + 1, n):
            if work[r][col] != 0:
                factor = work[r][col] / pivot
                work[r] = [x - factor * y for x, y in zip(work[r], work[col], strict=True)]
    return det


def is_positive_definite(a: Sequence[Sequence[Fraction]]) -> bool:
    """Symmetric with every leading principal minor strictly positive."""
    n = len(a)
    if any(a[i][j] != a[j][i] for i in range(n) for j in range(n)):
        return False
    return all(determinant([row[:k] for row in a[:k]]) > 0 for k in range(1, n + 1))


def as_float_array(values: Sequence[Fraction] | Sequence[Sequence[Fraction]]) -> np.ndarray:
    return np.array(values, dtype=float)


def rational_record(value: Fraction) -> dict[str, str | float]:
    """Report form of an exact rational: ``{"exact": "p/q", "float": x}``."""
    return {"exact": str(value), "float": float(value)}


def vector_record(values: Sequence[Fraction]) -> dict[str, list[str] | list[float]]:
    return {"exact": [str(v) for v in values], "float": [float(v) for v in values]}
