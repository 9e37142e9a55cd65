"""Attention mask construction."""

from pyrope.maskgen.masks import MASK_KINDS, build_mask, causal_mask, chebyshev_causal_mask

__all__ = [
    "MASK_KINDS",
    "build_mask",
    "causal_mask",
    "chebyshev_causal_mask",
]
