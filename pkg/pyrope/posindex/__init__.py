"""Raster, Cartesian and triplet hybrid positional indices."""

from pyrope.posindex.grid import (
    axis_coords,
    cartesian_coords,
    chebyshev_ring,
    raster_index,
    ring_counts,
    ring_map,
)
from pyrope.posindex.triplet import (
    image_rings,
    image_views,
    raster_triplets,
    triplet_array,
    triplet_indices,
)

__all__ = [
    "axis_coords",
    "cartesian_coords",
    "chebyshev_ring",
    "raster_index",
    "ring_counts",
    "ring_map",
    "image_rings",
    "image_views",
    "raster_triplets",
    "triplet_array",
    "triplet_indices",
]
