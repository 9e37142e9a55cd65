"""
pyrope - Triplet rotary position encodings for multimodal token sequences.

This library provides triplet (m, x, y) positional indices for multi-view
image grids, rotary frequency allocations that split pairs between temporal
and spatial components, Chebyshev causal masks, a seeded toy decoder that
records attention traces, and decay / information-flow analyses.
"""

__version__ = "0.1.0"

from pyrope.core.config import ModelConfig, RunConfig
from pyrope.core.types import GridShape, MultiViewLayout
from pyrope.maskgen import build_mask
from pyrope.posindex import triplet_indices
from pyrope.rotary import apply_rotary, make_allocation
from pyrope.toynet import TokenSequence, ToyDecoder

__all__ = [
    "GridShape",
    "ModelConfig",
    "MultiViewLayout",
    "RunConfig",
    "TokenSequence",
    "ToyDecoder",
    "apply_rotary",
    "build_mask",
    "make_allocation",
    "triplet_indices",
    "__version__",
]
