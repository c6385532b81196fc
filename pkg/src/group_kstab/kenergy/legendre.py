"""Discrete Legendre transform between tensor-product sample grids.

u(y) = max_x (x·y − ψ(x)) over the sample set. On a product grid the
maximum splits into one-dimensional maxima taken axis by axis, which keeps
memory at one axis-sized block per chunk of target points.
"""

from __future__ import annotations

import logging

from collections.abc import Sequence

import numpy as np

from group_kstab.kenergy.candidate import KEnergyError

logger = logging.getLogger(__name__)

DEFAULT_CHUNK = 64


class NotConvexSamples(KEnergyError):
    """Raised when sampled values fail the strict convexity check."""

    pass


def _validate(axes: Sequence[np.ndarray], values: np.ndarray) -> list[np.ndarray]:
    grids = [np.asarray(a, dtype=float) for a in axes]
    if values.shape != tuple(len(a) for a in grids):
        raise KEnergyError(
            "Sample values do not match the grid",
            shape=list(values.shape),
            grid=[len(a) for a in grids],
        )
    for a in grids:
        if a.ndim != 1 or np.any(np.diff(a) <= 0):
            raise KEnergyError("Grid axes must be strictly increasing")
    return grids


def check_convex_samples(axes: Sequence[np.ndarray], values: np.ndarray) -> None:
    """Second divided differences along every axis must be positive.

    Raises:
        NotConvexSamples: At the first axis with a non-positive difference
    """
    values = np.asarray(values, dtype=float)
    grids = _validate(axes, values)
    for axis, x in enumerate(grids):
        if len(x) < 3:
            continue
        slopes = np.diff(values, axis=axis) / np.diff(x).reshape(
            [len(x) - 1 if k == axis else 1 for k in range(values.ndim)]
        )
        spans = ((x[2:] - x[:-2]) / 2).reshape(
            [len(x) - 2 if k == axis else 1 for k in range(values.ndim)]
        )
        second = np.diff(slopes, axis=axis) / spans
        if np.any(second <= 0):
            raise NotConvexSamples(
                "Samples are not strictly convex",
                axis=axis,
                min_second_difference=float(np.min(second)),
            )


def _axis_transform(
    values: np.ndarray, x: np.ndarray, y: np.ndarray, axis: int, chunk: int
) -> np.ndarray:
    """max over x along ``axis`` of x·y − values, for every y."""
    moved = np.moveaxis(values, axis, 0)
    out = np.empty((len(y),) + moved.shape[1:])
    for start in range(0, len(y), chunk):
        block = y[start : start + chunk]
        candidates = (
            x[(slice(None), None) + (None,) * (moved.ndim - 1)]
            * block[(None, slice(None)) + (None,) * (moved.ndim - 1)]
            - moved[:, None, ...]
        )
        out[start : start + len(block)] = np.max(candidates, axis=0)
    return np.moveaxis(out, 0, axis)


def legendre_transform(
    x_axes: Sequence[np.ndarray],
    psi: np.ndarray,
    y_axes: Sequence[np.ndarray],
    *,
    check: bool = True,
    chunk: int = DEFAULT_CHUNK,
) -> np.ndarray:
    """Samples of u(y) = max_x (x·y − ψ(x)) on the y grid.

    Raises:
        NotConvexSamples: If ``check`` and ψ is not strictly convex
    """
    psi = np.asarray(psi, dtype=float)
    grids = _validate(x_axes, psi)
    targets = [np.asarray(a, dtype=float) for a in y_axes]
    if len(targets) != len(grids):
        raise KEnergyError("Source and target grids differ in dimension")
    if check:
        check_convex_samples(grids, psi)
    current = psi
    for axis in reversed(range(len(grids))):
        current = -_axis_transform(current, grids[axis], targets[axis], axis, chunk)
    return np.asarray(-current)


def inverse_legendre_transform(
    y_axes: Sequence[np.ndarray],
    u: np.ndarray,
    x_axes: Sequence[np.ndarray],
    *,
    check: bool = True,
    chunk: int = DEFAULT_CHUNK,
) -> np.ndarray:
    """ψ(x) = max_y (x·y − u(y)); the transform is its own inverse on convex data."""
    return legendre_transform(y_axes, u, x_axes, check=check, chunk=chunk)


def round_trip_error(
    x_axes: Sequence[np.ndarray],
    psi: np.ndarray,
    y_axes: Sequence[np.ndarray],
    *,
    chunk: int = DEFAULT_CHUNK,
) -> float:
    """sup |ψ − (ψ*)*| over the x grid."""
    u = legendre_transform(x_axes, psi, y_axes, chunk=chunk)
    back = inverse_legendre_transform(y_axes, u, x_axes, check=False, chunk=chunk)
    error = float(np.max(np.abs(back - np.asarray(psi, dtype=float))))
    logger.debug("Legendre round trip error %.3e on %d samples", error, u.size)
    return error
