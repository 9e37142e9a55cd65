"""Raster-scan indices, centred Cartesian coordinates and Chebyshev rings of a token grid."""

from typing import Dict

import numpy as np

from pyrope.core.types import GridShape


def raster_index(grid: GridShape) -> np.ndarray:
    """
    1-based raster-scan positions of a grid's tokens.

    Entry ``[i-1, j-1]`` (row ``i``, column ``j``, both 1-based) equals
    ``(i - 1) * cols + j``.
    """
    return np.arange(1, grid.size + 1, dtype=np.int64).reshape(grid.rows, grid.cols)


def axis_coords(length: int, flip: bool = False) -> np.ndarray:
    """
    Centred integer coordinates along one axis of ``length`` tokens, in 1-based order.

    Even lengths give the two central tokens coordinate 0 (``-1, 0, 0, 1`` for
    four tokens); odd lengths give the single central token 0. ``flip``
    reverses the sign so coordinates decrease along the axis (rows, whose
    positive direction points up).
    """
    j = np.arange(1, length + 1, dtype=np.int64)
    if length % 2:
        coords = j - (length + 1) // 2
    else:
        half = length // 2
        coords = np.where(j <= half, j - half, j - half - 1)
    return -coords if flip else coords


def cartesian_coords(grid: GridShape) -> np.ndarray:
    """
    Centred ``(x, y)`` coordinates of every token, shape ``(rows, cols, 2)``.

    ``x`` grows to the right and ``y`` grows upward, so the top-left token of a
    4x4 grid sits at ``(-1, 1)`` and the bottom-right at ``(1, -1)``.
    """
    xs = axis_coords(grid.cols)
    ys = axis_coords(grid.rows, flip=True)
    coords = np.empty((grid.rows, grid.cols, 2), dtype=np.int64)
    coords[..., 0] = xs[np.newaxis, :]
    coords[..., 1] = ys[:, np.newaxis]
    return coords


def chebyshev_ring(x: int, y: int) -> int:
    """Chebyshev distance ``max(|x|, |y|)`` of a coordinate from the grid centre."""
    return max(abs(int(x)), abs(int(y)))


def ring_map(grid: GridShape) -> np.ndarray:
    """Ring of every token, shape ``(rows, cols)``."""
    coords = cartesian_coords(grid)
    return np.abs(coords).max(axis=-1)


def ring_counts(grid: GridShape) -> Dict[int, int]:
    """Number of tokens on each ring, innermost first."""
    rings, counts = np.unique(ring_map(grid), return_counts=True)
    return {int(r): int(c) for r, c in zip(rings, counts)}
