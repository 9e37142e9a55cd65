"""Token sequences fed to the toy decoder."""

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from pyrope.core.exceptions import ConfigurationError, ShapeError
from pyrope.core.types import MultiViewLayout
from pyrope.numkit.rng import SeededRng, gaussian_matrix


@dataclass(frozen=True)
class TokenSequence:
    """
    Image embeddings followed by text token ids, laid out by ``layout``.

    ``image_embeddings`` has one row per image token (``v x model_dim``) and
    stands in for projected visual features; ``text_ids`` has ``text_len``
    vocabulary ids.
    """

    layout: MultiViewLayout
    image_embeddings: np.ndarray = field(repr=False)
    text_ids: np.ndarray

    def __post_init__(self) -> None:
        embeddings = np.array(self.image_embeddings, dtype=np.float64)
        ids = np.array(self.text_ids, dtype=np.int64).reshape(-1)
        if embeddings.ndim != 2 or embeddings.shape[0] != self.layout.image_tokens:
            raise ShapeError(
                f"expected {self.layout.image_tokens} image embeddings, got shape {embeddings.shape}"
            )
        if ids.shape[0] != self.layout.text_len:
            raise ShapeError(f"expected {self.layout.text_len} text ids, got {ids.shape[0]}")
        if np.any(ids < 0):
            raise ShapeError("text ids must be non-negative")
        embeddings.setflags(write=False)
        ids.setflags(write=False)
        object.__setattr__(self, "image_embeddings", embeddings)
        object.__setattr__(self, "text_ids", ids)

    @property
    def model_dim(self) -> int:
        return self.image_embeddings.shape[1]

    def appended(self, token: int) -> "TokenSequence":
        """Sequence with one more text token; generated tokens are text positions."""
        return TokenSequence(
            layout=self.layout.with_text(self.layout.text_len + 1),
            image_embeddings=self.image_embeddings,
            text_ids=np.append(self.text_ids, int(token)),
        )

    @classmethod
    def synthetic(
        cls,
        layout: MultiViewLayout,
        model_dim: int,
        vocab: int,
        seed: int,
        text_ids: Optional[Sequence[int]] = None,
    ) -> "TokenSequence":
        """Seeded Gaussian image embeddings and (unless given) uniform random text ids."""
        rng = SeededRng(seed).child(1)
        if layout.image_tokens:
            embeddings = gaussian_matrix(rng.child(0), layout.image_tokens, model_dim)
        else:
            embeddings = np.zeros((0, model_dim))
        if text_ids is None:
            text_ids = rng.child(1).generator().integers(0, vocab, size=layout.text_len)
        return cls(layout, embeddings, np.asarray(text_ids, dtype=np.int64))

    @classmethod
    def from_csv(
        cls,
        path: Union[str, Path],
        layout: MultiViewLayout,
        model_dim: int,
        text_ids: Sequence[int],
    ) -> "TokenSequence":
        """
        Load image embeddings from a headerless CSV, one row per image token.

        Lines starting with ``#`` are skipped.
        """
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"Embedding file not found: {path}")
        with open(path, newline="") as f:
            rows = [row for row in csv.reader(f) if row and not row[0].startswith("#")]
        try:
            embeddings = np.array([[float(value) for value in row] for row in rows])
        except ValueError as e:
            raise ConfigurationError(f"Embedding file {path} holds non-numeric values") from e
        embeddings = embeddings.reshape(len(rows), -1) if rows else np.zeros((0, model_dim))
        if embeddings.shape[1] != model_dim:
            raise ShapeError(f"embeddings must have {model_dim} columns, got {embeddings.shape[1]}")
        return cls(layout, embeddings, np.asarray(text_ids, dtype=np.int64))
