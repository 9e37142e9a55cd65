"""Utility functions and helpers."""

from pyrope.utils.io import atomic_write_all, atomic_write_bytes, atomic_write_text
from pyrope.utils.logging import setup_logging
from pyrope.utils.validation import validate_even_dim, validate_length, validate_positive

__all__ = [
    "atomic_write_all",
    "atomic_write_bytes",
    "atomic_write_text",
    "setup_logging",
    "validate_even_dim",
    "validate_length",
    "validate_positive",
]
