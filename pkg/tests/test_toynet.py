"""Unit tests for the toy decoder, token sequences and attention traces."""

from dataclasses import replace

import numpy as np
import pytest

from pyrope.core.config import ModelConfig
from pyrope.core.exceptions import ConfigurationError, ShapeError
from pyrope.core.types import GridShape, MultiViewLayout
from pyrope.maskgen import build_mask
from pyrope.posindex import triplet_array
from pyrope.toynet import AttentionTrace, TokenSequence, ToyDecoder, forward, generate


def _sequence(cfg, layout, seed=3):
    return TokenSequence.synthetic(layout, cfg.model_dim, cfg.vocab, seed)


def test_model_config_validation():
    """Variant/head_dim incompatibilities and unknown masks are rejected."""
    with pytest.raises(ConfigurationError):
        ModelConfig(head_dim=12, encoding="c2rope")
    with pytest.raises(ConfigurationError):
        ModelConfig(head_dim=8, encoding="c2rope")
    with pytest.raises(ConfigurationError):
        ModelConfig(mask_kind="banded")
    with pytest.raises(ConfigurationError):
        ModelConfig(encoding="nope", head_dim=7)
    assert ModelConfig(encoding="nope", head_dim=6).allocation() is None
    assert ModelConfig(encoding="vanilla", head_dim=6).allocation().variant == "vanilla"


def test_forward_shapes(small_cfg, layout_4x4):
    """Logits are (v + t) x vocab and the trace covers every layer and head."""
    result = forward(small_cfg, _sequence(small_cfg, layout_4x4))
    assert result.logits.shape == (18, small_cfg.vocab)
    assert result.trace.weights.shape == (2, 2, 18, 18)


def test_forward_deterministic(small_cfg, layout_4x4):
    """Same config and sequence give bit-identical logits and traces."""
    seq = _sequence(small_cfg, layout_4x4)
    a, b = forward(small_cfg, seq), ToyDecoder(small_cfg).forward(seq)
    assert np.array_equal(a.logits, b.logits)
    assert np.array_equal(a.trace.weights, b.trace.weights)


def test_text_only_c2rope_matches_vanilla(small_cfg):
    """Text-only sequences give the same logits under c2rope and vanilla."""
    layout = MultiViewLayout.text_only(9)
    c2rope = replace(small_cfg, encoding="c2rope")
    vanilla = replace(small_cfg, encoding="vanilla")
    seq = _sequence(c2rope, layout)
    assert np.max(np.abs(forward(c2rope, seq).logits - forward(vanilla, seq).logits)) <= 1e-9


def test_mask_kind_changes_image_block(small_cfg, layout_4x4):
    """Causal and Chebyshev traces differ somewhere in the image block."""
    seq = _sequence(small_cfg, layout_4x4)
    causal = forward(replace(small_cfg, mask_kind="causal"), seq).trace.weights
    ring = forward(replace(small_cfg, mask_kind="chebyshev"), seq).trace.weights
    assert not np.allclose(causal[..., :16, :16], ring[..., :16, :16])


@pytest.mark.parametrize("mask_kind", ["causal", "chebyshev"])
def test_trace_rows_sum_to_one_and_respect_mask(mask_kind):
    """2 views of 8x8 plus 16 text tokens: rows sum to one and hidden entries are exactly zero."""
    cfg = ModelConfig(seed=11, mask_kind=mask_kind)
    layout = MultiViewLayout(2, GridShape(8, 8), 16)
    result = forward(cfg, _sequence(cfg, layout))
    assert result.trace.max_row_error() <= 1e-6
    assert np.all(result.trace.weights[..., ~result.mask.visible] == 0.0)
    assert result.trace.is_consistent(result.mask)


def test_zero_indices_reproduce_nope(small_cfg, layout_4x4):
    """Zeroing every positional index gives the rotation-free forward pass."""
    seq = _sequence(small_cfg, layout_4x4)
    zeroed = ToyDecoder(small_cfg).forward(seq, triplets=np.zeros((18, 3), dtype=np.int64))
    nope = forward(replace(small_cfg, encoding="nope"), seq)
    assert np.max(np.abs(zeroed.logits - nope.logits)) <= 1e-9


def test_swapping_tokens_and_indices_permutes_text_attention(small_cfg, grid_4x4):
    """Encoding follows indices, not slots: swapping two same-ring tokens permutes text attention."""
    cfg = replace(small_cfg, mask_kind="chebyshev")
    layout = MultiViewLayout(1, grid_4x4, 3)
    seq = _sequence(cfg, layout)
    perm = np.arange(layout.length)
    perm[[0, 15]] = perm[[15, 0]]

    swapped = TokenSequence(layout, seq.image_embeddings[perm[:16]], seq.text_ids)
    decoder = ToyDecoder(cfg)
    base = decoder.forward(seq).trace.weights
    moved = decoder.forward(swapped, triplets=triplet_array(layout)[perm]).trace.weights
    assert np.allclose(moved[..., 16:, :], base[..., 16:, :][..., perm], rtol=0, atol=1e-12)


def test_long_sequence_stays_finite():
    """Two 16x16 views plus 32 text tokens run without overflow."""
    cfg = ModelConfig(layers=1, heads=2, head_dim=16, seed=2)
    layout = MultiViewLayout(2, GridShape(16, 16), 32)
    result = forward(cfg, _sequence(cfg, layout))
    assert result.logits.shape[0] == 544
    assert np.all(np.isfinite(result.logits))


def test_generate_one_step(small_cfg, layout_4x4):
    """One step yields one token and a trace one row longer whose new row is a distribution."""
    seq = _sequence(small_cfg, layout_4x4)
    prompt_length = forward(small_cfg, seq).trace.length
    result = generate(small_cfg, seq, steps=1)
    assert len(result.tokens) == 1 and len(result.traces) == 1
    trace = result.traces[0]
    assert trace.length == prompt_length + 1 == 19
    new_rows = trace.weights[:, :, -1, :]
    assert np.allclose(new_rows.sum(axis=-1), 1.0, atol=1e-12)
    assert np.all(new_rows > 0.0)
    assert result.sequence.layout.text_len == 3


def test_generate_deterministic(small_cfg, layout_4x4):
    """Greedy decoding is reproducible token for token."""
    seq = _sequence(small_cfg, layout_4x4)
    assert generate(small_cfg, seq, 5).tokens == generate(small_cfg, seq, 5).tokens


@pytest.mark.parametrize("encoding", ["vanilla", "c2rope", "mrope_like", "nope"])
def test_rigged_head_generates_zeros(small_cfg, layout_4x4, encoding):
    """Constant logits tie-break to the lowest token id."""
    cfg = replace(small_cfg, encoding=encoding)
    decoder = ToyDecoder(cfg).with_weights(lm_head=np.zeros((cfg.model_dim, cfg.vocab)))
    assert decoder.generate(_sequence(cfg, layout_4x4), 4).tokens == [0, 0, 0, 0]


def test_generate_requires_steps(small_cfg, layout_4x4):
    """steps must be at least one."""
    with pytest.raises(ShapeError):
        generate(small_cfg, _sequence(small_cfg, layout_4x4), 0)


def test_embedding_checks(small_cfg, layout_4x4):
    """Width and vocabulary mismatches are shape errors."""
    wide = TokenSequence.synthetic(layout_4x4, small_cfg.model_dim + 2, small_cfg.vocab, 0)
    with pytest.raises(ShapeError):
        forward(small_cfg, wide)
    too_large = TokenSequence.synthetic(
        layout_4x4, small_cfg.model_dim, small_cfg.vocab, 0, text_ids=[0, small_cfg.vocab]
    )
    with pytest.raises(ShapeError):
        forward(small_cfg, too_large)


def test_triplet_override_shape(small_cfg, layout_4x4):
    """Overriding triplets requires one per token."""
    with pytest.raises(ShapeError):
        ToyDecoder(small_cfg).forward(_sequence(small_cfg, layout_4x4), triplets=np.zeros((3, 3)))


def test_token_sequence_validation(layout_4x4):
    """Embedding count and text length must match the layout."""
    with pytest.raises(ShapeError):
        TokenSequence(layout_4x4, np.zeros((15, 8)), np.zeros(2, dtype=np.int64))
    with pytest.raises(ShapeError):
        TokenSequence(layout_4x4, np.zeros((16, 8)), np.zeros(3, dtype=np.int64))
    with pytest.raises(ShapeError):
        TokenSequence(layout_4x4, np.zeros((16, 8)), np.array([0, -1]))


def test_token_sequence_appended(layout_4x4):
    """Appending a token extends the text by one."""
    seq = TokenSequence.synthetic(layout_4x4, 8, 10, 1)
    longer = seq.appended(4)
    assert longer.layout.text_len == 3
    assert longer.text_ids.tolist() == seq.text_ids.tolist() + [4]


def test_token_sequence_from_csv(tmp_path, layout_4x4):
    """Embeddings load from a headerless CSV with comment lines."""
    values = np.arange(16 * 4, dtype=np.float64).reshape(16, 4) / 8
    path = tmp_path / "emb.csv"
    lines = ["# seed=0 variant=- normalization=-"] + [",".join(repr(float(v)) for v in row) for row in values]
    path.write_text("\n".join(lines) + "\n")
    seq = TokenSequence.from_csv(path, layout_4x4, 4, [1, 2])
    assert np.array_equal(seq.image_embeddings, values)
    with pytest.raises(ShapeError):
        TokenSequence.from_csv(path, layout_4x4, 5, [1, 2])
    with pytest.raises(ConfigurationError):
        TokenSequence.from_csv(tmp_path / "missing.csv", layout_4x4, 4, [1, 2])


def test_attention_trace_helpers():
    """Trace accessors and consistency checks."""
    mask = build_mask(MultiViewLayout.text_only(3), "causal")
    weights = np.broadcast_to(
        np.array([[1.0, 0, 0], [0.5, 0.5, 0], [0.2, 0.3, 0.5]]), (1, 2, 3, 3)
    ).copy()
    trace = AttentionTrace(weights.copy())
    assert (trace.layers, trace.heads, trace.length) == (1, 2, 3)
    assert [(layer, head) for layer, head, _ in trace.items()] == [(0, 0), (0, 1)]
    assert trace.is_consistent(mask)
    weights[0, 1, 0, 2] = 0.1
    assert not AttentionTrace(weights).is_consistent(mask)
    with pytest.raises(ShapeError):
        AttentionTrace(np.zeros((2, 3, 3)))
