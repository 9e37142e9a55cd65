"""Causal and Chebyshev causal attention masks over multi-view image + text sequences."""

import logging
from typing import Tuple

import numpy as np

from pyrope.core.exceptions import ConfigurationError
from pyrope.core.types import AttentionMask, MultiViewLayout
from pyrope.posindex.triplet import image_rings, image_views

logger = logging.getLogger(__name__)

MASK_KINDS: Tuple[str, ...] = ("causal", "chebyshev")


def causal_mask(n: int) -> AttentionMask:
    """Standard lower-triangular mask: query ``i`` sees keys ``j <= i``."""
    if n < 1:
        raise ConfigurationError(f"mask length must be at least 1, got {n}")
    return AttentionMask(np.tril(np.ones((n, n), dtype=bool)), kind="causal")


def chebyshev_causal_mask(layout: MultiViewLayout) -> AttentionMask:
    """
    Ring-ordered causal mask for image tokens, strictly causal for text.

    Within one view an image query sees the image keys on its own ring and
    on every inner ring. Queries see all image tokens of earlier views and
    no text. Text queries see every image token and the text up to
    themselves.
    """
    n = layout.length
    v = layout.image_tokens
    visible = np.zeros((n, n), dtype=bool)

    if v:
        rings = image_rings(layout)
        views = image_views(layout)
        same_view = views[:, np.newaxis] == views[np.newaxis, :]
        earlier_view = views[np.newaxis, :] < views[:, np.newaxis]
        inward = rings[np.newaxis, :] <= rings[:, np.newaxis]
        visible[:v, :v] = earlier_view | (same_view & inward)

    visible[v:, :v] = True
    visible[v:, v:] = np.tril(np.ones((layout.text_len, layout.text_len), dtype=bool))

    mask = AttentionMask(visible, kind="chebyshev")
    logger.debug("chebyshev mask over %d tokens: %d visible entries", n, mask.count())
    return mask


def build_mask(layout: MultiViewLayout, kind: str) -> AttentionMask:
    """
    Build the mask of ``kind`` for ``layout``.

    Raises:
        ConfigurationError: If ``kind`` is not one of :data:`MASK_KINDS`
    """
    kind = kind.lower()
    if kind == "causal":
        return causal_mask(layout.length)
    elif kind == "chebyshev":
        return chebyshev_causal_mask(layout)
    else:
        raise ConfigurationError(f"Unknown mask kind: {kind}")
