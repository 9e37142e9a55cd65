"""Counter-based seeded random streams."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from pyrope.core.exceptions import ConfigurationError

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SeededRng:
    """
    Reproducible random stream identified by ``(seed, stream)``.

    Backed by the Philox counter-based bit generator keyed through
    ``numpy.random.SeedSequence``; the same pair yields the same samples on
    every run and platform. Instances are values: every draw starts from the
    beginning of the stream, and independent streams are derived with
    :meth:`child`, which extends the ``stream`` path.
    """

    seed: int
    stream: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= _UINT64_MAX:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if any(s < 0 for s in self.stream):
            raise ConfigurationError(f"stream ids must be non-negative, got {self.stream}")

    def child(self, stream: int) -> "SeededRng":
        return SeededRng(self.seed, self.stream + (stream,))

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.Philox(sequence))


def gaussian(rng: SeededRng, n: int) -> np.ndarray:
    """Draw ``n`` standard-normal samples from the start of ``rng``'s stream."""
    if n < 1:
        raise ConfigurationError(f"n must be at least 1, got {n}")
    return rng.generator().standard_normal(n)


def gaussian_matrix(rng: SeededRng, rows: int, cols: int) -> np.ndarray:
    """Draw a ``rows x cols`` standard-normal matrix from the start of ``rng``'s stream."""
    return gaussian(rng, rows * cols).reshape(rows, cols)
