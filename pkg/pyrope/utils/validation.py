"""Validation utilities for numeric inputs."""

from typing import Any

import numpy as np

from pyrope.core.exceptions import ConfigurationError, ShapeError


def validate_even_dim(d: int, name: str = "head_dim") -> None:
    """
    Validate a rotary head dimension.

    Args:
        d: The dimension to validate
        name: Name used in the error message

    Raises:
        ShapeError: If the dimension is not an even integer >= 2
    """
    if d < 2 or d % 2:
        raise ShapeError(f"{name} must be an even integer >= 2, got {d}")


def validate_length(values: Any, expected: int, name: str = "vector") -> np.ndarray:
    """
    Coerce ``values`` to a 1-D float64 array of length ``expected``.

    Raises:
        ShapeError: If the array is not one-dimensional or has the wrong length
    """
    array = np.asarray(values, dtype=np.float64)
    if array.ndim != 1 or array.shape[0] != expected:
        raise ShapeError(f"{name} must have length {expected}, got shape {array.shape}")
    return array


def validate_positive(value: float, name: str) -> None:
    """
    Validate a strictly positive count or scale.

    Raises:
        ConfigurationError: If the value is not positive
    """
    if value <= 0:
        raise ConfigurationError(f"{name} must be positive, got {value}")
