"""Rotary application, relative scores and the rotary adjoint."""

from typing import Sequence, Union

import numpy as np

from pyrope.core.exceptions import ShapeError
from pyrope.core.types import TripletIndex
from pyrope.rotary.frequencies import FrequencyAllocation
from pyrope.utils.validation import validate_length

RotatedVector = np.ndarray
IndexLike = Union[TripletIndex, Sequence[int], np.ndarray]


def _angles(positions: np.ndarray, alloc: FrequencyAllocation) -> np.ndarray:
    # positions (..., 3) -> per-pair angle (..., d/2)
    return positions[..., alloc.component_ids] * alloc.theta_array


def _rotate(values: np.ndarray, positions: np.ndarray, alloc: FrequencyAllocation) -> np.ndarray:
    angles = _angles(np.asarray(positions, dtype=np.float64), alloc)
    cos = np.cos(angles)
    sin = np.sin(angles)
    even = values[..., 0::2]
    odd = values[..., 1::2]
    out = np.empty_like(values, dtype=np.float64)
    out[..., 0::2] = even * cos - odd * sin
    out[..., 1::2] = even * sin + odd * cos
    return out


def _as_index(idx: IndexLike) -> np.ndarray:
    array = np.asarray(idx, dtype=np.float64)
    if array.shape != (3,):
        raise ShapeError(f"index must be an (m, x, y) triple, got shape {array.shape}")
    return array


def apply_rotary(vec, idx: IndexLike, alloc: FrequencyAllocation) -> RotatedVector:
    """
    Rotate each pair of ``vec`` by ``theta_i`` times the index component it is allocated to.

    Raises:
        ShapeError: If ``len(vec) != alloc.head_dim``
    """
    vec = validate_length(vec, alloc.head_dim, "vec")
    return _rotate(vec, _as_index(idx), alloc)


def rotary_adjoint(cotangent, idx: IndexLike, alloc: FrequencyAllocation) -> np.ndarray:
    """Transpose of :func:`apply_rotary` at ``idx``: the rotation by the negated index."""
    cotangent = validate_length(cotangent, alloc.head_dim, "cotangent")
    return _rotate(cotangent, -_as_index(idx), alloc)


def rotate_rows(
    matrix: np.ndarray,
    triplets: np.ndarray,
    alloc: FrequencyAllocation,
    inverse: bool = False,
) -> np.ndarray:
    """
    Rotate every row of an ``(n, d)`` matrix by its own ``(m, x, y)`` triplet.

    Raises:
        ShapeError: If the matrix width differs from ``alloc.head_dim`` or the
            triplet count differs from the row count
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    triplets = np.asarray(triplets)
    if matrix.ndim != 2 or matrix.shape[1] != alloc.head_dim:
        raise ShapeError(f"expected (n, {alloc.head_dim}) rows, got shape {matrix.shape}")
    if triplets.shape != (matrix.shape[0], 3):
        raise ShapeError(f"expected ({matrix.shape[0]}, 3) triplets, got {triplets.shape}")
    positions = -triplets if inverse else triplets
    return _rotate(matrix, positions, alloc)


def relative_score(q, k, idx_q: IndexLike, idx_k: IndexLike, alloc: FrequencyAllocation) -> float:
    """Attention logit numerator ``<R(idx_q) q, R(idx_k) k>`` (both sides rotated)."""
    return float(np.dot(apply_rotary(q, idx_q, alloc), apply_rotary(k, idx_k, alloc)))


def relative_rotation_score(
    q, k, idx_q: IndexLike, idx_k: IndexLike, alloc: FrequencyAllocation
) -> float:
    """
    Single-rotation form of :func:`relative_score`: rotate ``q`` by ``idx_q - idx_k``.

    Equal to the two-sided form because pair rotations compose additively.
    """
    q = validate_length(q, alloc.head_dim, "q")
    k = validate_length(k, alloc.head_dim, "k")
    delta = _as_index(idx_q) - _as_index(idx_k)
    return float(np.dot(_rotate(q, delta, alloc), k))


def rotation_matrix(idx: IndexLike, alloc: FrequencyAllocation) -> np.ndarray:
    """Explicit block-diagonal ``d x d`` rotation; for inspection and small-d checks only."""
    angles = _angles(_as_index(idx), alloc)
    matrix = np.zeros((alloc.head_dim, alloc.head_dim))
    for i, angle in enumerate(angles):
        c, s = np.cos(angle), np.sin(angle)
        matrix[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = [[c, -s], [s, c]]
    return matrix
