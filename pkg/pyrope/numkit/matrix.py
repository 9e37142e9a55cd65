"""Dense float64 matrix kernels."""

import numpy as np

from pyrope.core.exceptions import DegenerateRowError, ShapeError
from pyrope.core.types import AttentionMask, Matrix


def as_matrix(values) -> Matrix:
    """Coerce ``values`` to a finite 2-D float64 array."""
    array = np.asarray(values, dtype=np.float64)
    if array.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ShapeError("matrix contains non-finite values")
    return array


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """
    Matrix product ``a @ b``.

    Raises:
        ShapeError: If ``a.cols != b.rows``
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def masked_softmax_rows(logits: Matrix, mask) -> Matrix:
    """
    Row-wise softmax over the visible entries of ``mask``.

    Masked entries are excluded before the row maximum is taken and come out
    as exact zeros. ``mask`` may be an :class:`AttentionMask` or a boolean array
    of the same shape as ``logits`` (rectangular masks are allowed here).

    Raises:
        ShapeError: If shapes differ
        DegenerateRowError: If a row has no visible entry
    """
    logits = np.asarray(logits, dtype=np.float64)
    visible = mask.visible if isinstance(mask, AttentionMask) else np.asarray(mask, dtype=bool)
    if logits.ndim != 2 or logits.shape != visible.shape:
        raise ShapeError(f"logits {logits.shape} and mask {visible.shape} differ")

    counts = visible.sum(axis=1)
    if np.any(counts == 0):
        row = int(np.argmin(counts))
        raise DegenerateRowError(f"row {row} has no visible entry")

    shifted = np.where(visible, logits, -np.inf)
    shifted = shifted - shifted.max(axis=1, keepdims=True)
    weights = np.where(visible, np.exp(shifted), 0.0)
    return weights / weights.sum(axis=1, keepdims=True)
