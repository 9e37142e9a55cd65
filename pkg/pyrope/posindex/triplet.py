"""Triplet hybrid positional indices for multi-view image tokens followed by text."""

import logging
from typing import List

import numpy as np

from pyrope.core.types import MultiViewLayout, TripletIndex
from pyrope.posindex.grid import cartesian_coords, ring_map

logger = logging.getLogger(__name__)


def triplet_array(layout: MultiViewLayout) -> np.ndarray:
    """
    Triplet indices as an ``(v + t, 3)`` integer array with columns ``m, x, y``.

    ``m`` runs 1..v+t over the whole sequence without resetting between views.
    Image tokens take the per-view Cartesian ``(x, y)`` (identical for every
    view); text tokens take ``x = y = m``.
    """
    n = layout.length
    triplets = np.empty((n, 3), dtype=np.int64)
    triplets[:, 0] = np.arange(1, n + 1)

    v = layout.image_tokens
    if v:
        per_view = cartesian_coords(layout.grid).reshape(-1, 2)
        triplets[:v, 1:] = np.tile(per_view, (layout.views, 1))
    triplets[v:, 1] = triplets[v:, 0]
    triplets[v:, 2] = triplets[v:, 0]

    logger.debug("built %d triplets for %d views of %s", n, layout.views, layout.grid)
    return triplets


def triplet_indices(layout: MultiViewLayout) -> List[TripletIndex]:
    """Triplet index of every token in sequence order."""
    return [TripletIndex(int(m), int(x), int(y)) for m, x, y in triplet_array(layout)]


def raster_triplets(layout: MultiViewLayout) -> np.ndarray:
    """Vanilla raster-scan index ``(m, m, m)`` for every token, same shape as :func:`triplet_array`."""
    m = np.arange(1, layout.length + 1, dtype=np.int64)
    return np.stack([m, m, m], axis=1)


def image_rings(layout: MultiViewLayout) -> np.ndarray:
    """Chebyshev ring of each image token in sequence order (length ``v``)."""
    if not layout.views:
        return np.zeros(0, dtype=np.int64)
    return np.tile(ring_map(layout.grid).reshape(-1), layout.views)


def image_views(layout: MultiViewLayout) -> np.ndarray:
    """0-based view of each image token in sequence order (length ``v``)."""
    return np.repeat(np.arange(layout.views, dtype=np.int64), layout.grid.size)
