"""Attention weights captured from a decoder forward pass."""

from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

import numpy as np

from pyrope.core.exceptions import ShapeError
from pyrope.core.types import AttentionMask

ROW_SUM_TOL = 1e-6


@dataclass(frozen=True)
class AttentionTrace:
    """Post-softmax attention of every layer and head, shape ``(layers, heads, n, n)``."""

    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=np.float64)
        if weights.ndim != 4 or weights.shape[2] != weights.shape[3]:
            raise ShapeError(f"trace must have shape (layers, heads, n, n), got {weights.shape}")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def layers(self) -> int:
        return self.weights.shape[0]

    @property
    def heads(self) -> int:
        return self.weights.shape[1]

    @property
    def length(self) -> int:
        return self.weights.shape[2]

    def matrix(self, layer: int, head: int) -> np.ndarray:
        return self.weights[layer, head]

    def items(self) -> Iterator[Tuple[int, int, np.ndarray]]:
        """Iterate ``(layer, head, matrix)`` in layer-major order."""
        for layer in range(self.layers):
            for head in range(self.heads):
                yield layer, head, self.weights[layer, head]

    def mean(self) -> np.ndarray:
        """Attention averaged over layers and heads, shape ``(n, n)``."""
        return self.weights.mean(axis=(0, 1))

    def max_row_error(self) -> float:
        return float(np.max(np.abs(self.weights.sum(axis=-1) - 1.0)))

    def masked_mass(self, mask: AttentionMask) -> float:
        """Largest absolute attention weight on a hidden entry (0.0 when the mask holds)."""
        if mask.shape != (self.length, self.length):
            raise ShapeError(f"mask {mask.shape} does not match trace length {self.length}")
        hidden = ~mask.visible
        if not hidden.any():
            return 0.0
        return float(np.max(np.abs(self.weights[..., hidden])))

    def is_consistent(self, mask: Optional[AttentionMask] = None, tol: float = ROW_SUM_TOL) -> bool:
        """Rows sum to one within ``tol`` and, given ``mask``, hidden entries are exactly zero."""
        if self.max_row_error() > tol:
            return False
        return mask is None or self.masked_mass(mask) == 0.0
