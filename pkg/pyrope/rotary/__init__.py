"""Rotary position encoding: frequency allocation and pairwise rotation."""

from pyrope.rotary.frequencies import (
    DEFAULT_BASE,
    VARIANTS,
    FrequencyAllocation,
    base_frequencies,
    make_allocation,
)
from pyrope.rotary.rotate import (
    apply_rotary,
    relative_rotation_score,
    relative_score,
    rotary_adjoint,
    rotate_rows,
    rotation_matrix,
)

__all__ = [
    "DEFAULT_BASE",
    "VARIANTS",
    "FrequencyAllocation",
    "base_frequencies",
    "make_allocation",
    "apply_rotary",
    "relative_rotation_score",
    "relative_score",
    "rotary_adjoint",
    "rotate_rows",
    "rotation_matrix",
]
