"""Deterministic float64 numeric kernel."""

from pyrope.numkit.gradcheck import GradCheckReport, finite_diff_check
from pyrope.numkit.matrix import as_matrix, masked_softmax_rows, matmul
from pyrope.numkit.rng import SeededRng, gaussian, gaussian_matrix

__all__ = [
    "GradCheckReport",
    "finite_diff_check",
    "as_matrix",
    "masked_softmax_rows",
    "matmul",
    "SeededRng",
    "gaussian",
    "gaussian_matrix",
]
