"""Core types, configuration and exceptions."""

from pyrope.core.config import ModelConfig, RunConfig
from pyrope.core.exceptions import (
    ConfigurationError,
    DegenerateRowError,
    InputError,
    RopeError,
    ShapeError,
)
from pyrope.core.types import (
    COMPONENTS,
    AttentionMask,
    Component,
    GridShape,
    MultiViewLayout,
    TripletIndex,
)

__all__ = [
    "ModelConfig",
    "RunConfig",
    "RopeError",
    "ShapeError",
    "ConfigurationError",
    "DegenerateRowError",
    "InputError",
    "COMPONENTS",
    "AttentionMask",
    "Component",
    "GridShape",
    "MultiViewLayout",
    "TripletIndex",
]
