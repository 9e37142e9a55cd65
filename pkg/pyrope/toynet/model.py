"""
Randomly initialised decoder-only transformer used as a desk-scale testbed.

Block topology (pre-norm, one MLP per block)::

    h = x + Attention(RMSNorm(x))
    x = h + W_out GELU(W_in RMSNorm(h))

Rotary encoding is applied to every head's queries and keys using the
layout's triplet indices; the attention mask comes from ``maskgen``.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from pyrope.core.config import ModelConfig
from pyrope.core.exceptions import ShapeError
from pyrope.core.types import AttentionMask
from pyrope.maskgen.masks import build_mask
from pyrope.numkit.matrix import masked_softmax_rows, matmul
from pyrope.numkit.rng import SeededRng, gaussian_matrix
from pyrope.posindex.triplet import triplet_array
from pyrope.rotary.rotate import rotate_rows
from pyrope.toynet.sequence import TokenSequence
from pyrope.toynet.trace import AttentionTrace

logger = logging.getLogger(__name__)

_NORM_EPS = 1e-6


@dataclass(frozen=True)
class LayerWeights:
    """Weights of one decoder block."""

    wq: np.ndarray = field(repr=False)
    wk: np.ndarray = field(repr=False)
    wv: np.ndarray = field(repr=False)
    wo: np.ndarray = field(repr=False)
    w_in: np.ndarray = field(repr=False)
    w_out: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ModelWeights:
    """All decoder weights."""

    embed: np.ndarray = field(repr=False)
    layers: Tuple[LayerWeights, ...] = field(repr=False)
    lm_head: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ForwardResult:
    logits: np.ndarray
    trace: AttentionTrace
    mask: AttentionMask


@dataclass(frozen=True)
class GenerationResult:
    tokens: List[int]
    traces: List[AttentionTrace]
    sequence: TokenSequence


def _init_weights(cfg: ModelConfig) -> ModelWeights:
    rng = SeededRng(cfg.seed).child(0)
    dim = cfg.model_dim
    hidden = cfg.mlp_ratio * dim

    def dense(stream: SeededRng, fan_in: int, fan_out: int) -> np.ndarray:
        weight = gaussian_matrix(stream, fan_in, fan_out) / math.sqrt(fan_in)
        weight.setflags(write=False)
        return weight

    layers = []
    for index in range(cfg.layers):
        stream = rng.child(index + 2)
        layers.append(
            LayerWeights(
                wq=dense(stream.child(0), dim, dim),
                wk=dense(stream.child(1), dim, dim),
                wv=dense(stream.child(2), dim, dim),
                wo=dense(stream.child(3), dim, dim),
                w_in=dense(stream.child(4), dim, hidden),
                w_out=dense(stream.child(5), hidden, dim),
            )
        )
    embed = gaussian_matrix(rng.child(0), cfg.vocab, dim)
    embed.setflags(write=False)
    return ModelWeights(embed=embed, layers=tuple(layers), lm_head=dense(rng.child(1), dim, cfg.vocab))


def _rms_norm(x: np.ndarray) -> np.ndarray:
    return x / np.sqrt(np.mean(x * x, axis=-1, keepdims=True) + _NORM_EPS)


def _gelu(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + np.tanh(math.sqrt(2.0 / math.pi) * (x + 0.044715 * x**3)))


class ToyDecoder:
    """
    Decoder-only transformer with seeded Gaussian weights and pluggable positional encoding.

    Instances are immutable after construction; every call allocates its own
    buffers, so one instance may serve concurrent callers.
    """

    def __init__(self, cfg: ModelConfig, weights: Optional[ModelWeights] = None):
        self.cfg = cfg
        self.allocation = cfg.allocation()
        self.weights = weights or _init_weights(cfg)

    def with_weights(self, **replacements: np.ndarray) -> "ToyDecoder":
        """Copy of this decoder with some top-level weights replaced (``embed``, ``lm_head``)."""
        return ToyDecoder(self.cfg, replace(self.weights, **replacements))

    def embed(self, seq: TokenSequence) -> np.ndarray:
        if seq.model_dim != self.cfg.model_dim:
            raise ShapeError(
                f"image embeddings have width {seq.model_dim}, model expects {self.cfg.model_dim}"
            )
        if np.any(seq.text_ids >= self.cfg.vocab):
            raise ShapeError(f"text ids must be below vocab size {self.cfg.vocab}")
        text = self.weights.embed[seq.text_ids]
        return np.concatenate([seq.image_embeddings, text], axis=0)

    def forward(self, seq: TokenSequence, triplets: Optional[np.ndarray] = None) -> ForwardResult:
        """
        Run the decoder over ``seq``.

        Args:
            seq: Input sequence
            triplets: Positional indices overriding ``triplet_array(seq.layout)``

        Returns:
            ForwardResult with ``(n, vocab)`` logits, the attention trace and the mask used
        """
        cfg = self.cfg
        n = seq.layout.length
        if triplets is None:
            triplets = triplet_array(seq.layout)
        triplets = np.asarray(triplets)
        if triplets.shape != (n, 3):
            raise ShapeError(f"expected ({n}, 3) triplets, got {triplets.shape}")
        mask = build_mask(seq.layout, cfg.mask_kind)

        x = self.embed(seq)
        trace = np.empty((cfg.layers, cfg.heads, n, n))
        scale = 1.0 / math.sqrt(cfg.head_dim)
        for index, layer in enumerate(self.weights.layers):
            normed = _rms_norm(x)
            q = matmul(normed, layer.wq)
            k = matmul(normed, layer.wk)
            v = matmul(normed, layer.wv)
            heads_out = []
            for head in range(cfg.heads):
                cols = slice(head * cfg.head_dim, (head + 1) * cfg.head_dim)
                qh, kh = q[:, cols], k[:, cols]
                if self.allocation is not None:
                    qh = rotate_rows(qh, triplets, self.allocation)
                    kh = rotate_rows(kh, triplets, self.allocation)
                weights = masked_softmax_rows(matmul(qh, kh.T) * scale, mask)
                trace[index, head] = weights
                heads_out.append(matmul(weights, v[:, cols]))
            x = x + matmul(np.concatenate(heads_out, axis=1), layer.wo)
            x = x + matmul(_gelu(matmul(_rms_norm(x), layer.w_in)), layer.w_out)

        logits = matmul(_rms_norm(x), self.weights.lm_head)
        logger.debug(
            "forward n=%d encoding=%s mask=%s visible=%d", n, cfg.encoding, mask.kind, mask.count()
        )
        return ForwardResult(logits=logits, trace=AttentionTrace(trace), mask=mask)

    def generate(self, seq: TokenSequence, steps: int) -> GenerationResult:
        """
        Greedy decoding for ``steps`` tokens.

        Each new token is appended as a text token with triplet ``(m, m, m)``.
        The trace recorded for step ``s`` comes from the forward pass over the
        sequence that already contains the ``s``-th generated token, so its
        last row is that token's attention over all earlier keys.
        """
        if steps < 1:
            raise ShapeError(f"steps must be at least 1, got {steps}")
        tokens: List[int] = []
        traces: List[AttentionTrace] = []
        result = self.forward(seq)
        for _ in range(steps):
            # argmax returns the lowest id on ties
            token = int(np.argmax(result.logits[-1]))
            tokens.append(token)
            seq = seq.appended(token)
            result = self.forward(seq)
            traces.append(result.trace)
        return GenerationResult(tokens=tokens, traces=traces, sequence=seq)


def forward(cfg: ModelConfig, seq: TokenSequence) -> ForwardResult:
    """Forward pass of a freshly initialised decoder for ``cfg``."""
    return ToyDecoder(cfg).forward(seq)


def generate(cfg: ModelConfig, seq: TokenSequence, steps: int) -> GenerationResult:
    """Greedy generation with a freshly initialised decoder for ``cfg``."""
    return ToyDecoder(cfg).generate(seq, steps)
