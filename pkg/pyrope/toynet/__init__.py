"""Toy decoder-only transformer with attention-trace capture."""

from pyrope.toynet.model import (
    ForwardResult,
    GenerationResult,
    LayerWeights,
    ModelWeights,
    ToyDecoder,
    forward,
    generate,
)
from pyrope.toynet.sequence import TokenSequence
from pyrope.toynet.trace import AttentionTrace

__all__ = [
    "ForwardResult",
    "GenerationResult",
    "LayerWeights",
    "ModelWeights",
    "ToyDecoder",
    "forward",
    "generate",
    "TokenSequence",
    "AttentionTrace",
]
