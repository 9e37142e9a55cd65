"""Type definitions shared across the pyrope library."""

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Tuple

import numpy as np
from typing_extensions import Literal, TypeAlias

from pyrope.core.exceptions import ConfigurationError, ShapeError

# Type aliases
Component: TypeAlias = Literal["m", "x", "y"]
VariantName: TypeAlias = str
MaskKind: TypeAlias = str
Vector: TypeAlias = np.ndarray
Matrix: TypeAlias = np.ndarray

COMPONENTS: Tuple[str, ...] = ("m", "x", "y")


@dataclass(frozen=True)
class GridShape:
    """Token grid of a single view: ``rows`` token rows by ``cols`` token columns."""

    rows: int
    cols: int

    def __post_init__(self) -> None:
        if int(self.rows) < 1 or int(self.cols) < 1:
            raise ConfigurationError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @classmethod
    def parse(cls, text: str) -> "GridShape":
        """Parse an ``HxW`` string such as ``4x4``."""
        parts = text.lower().replace(" ", "").split("x")
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ConfigurationError(f"grid must look like HxW, got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    def __str__(self) -> str:
        return f"{self.rows}x{self.cols}"


@dataclass(frozen=True)
class MultiViewLayout:
    """
    Geometry of a multimodal sequence: ``views`` image grids followed by text.

    Image tokens come first, view by view in raster order, then ``text_len``
    text tokens. ``views = 0`` describes a text-only sequence.
    """

    views: int
    grid: GridShape
    text_len: int = 0

    def __post_init__(self) -> None:
        if self.views < 0:
            raise ConfigurationError(f"views must be non-negative, got {self.views}")
        if self.text_len < 0:
            raise ConfigurationError(f"text_len must be non-negative, got {self.text_len}")
        if self.length < 1:
            raise ConfigurationError("layout must contain at least one token")

    @classmethod
    def text_only(cls, text_len: int) -> "MultiViewLayout":
        return cls(views=0, grid=GridShape(1, 1), text_len=text_len)

    @property
    def image_tokens(self) -> int:
        """Number of image tokens ``v`` across all views."""
        return self.views * self.grid.size

    @property
    def length(self) -> int:
        """Total sequence length ``v + t``."""
        return self.image_tokens + self.text_len

    def view_slice(self, view: int) -> slice:
        """Sequence slice of the image tokens of ``view`` (0-based)."""
        if not 0 <= view < self.views:
            raise ShapeError(f"view {view} out of range for {self.views} views")
        start = view * self.grid.size
        return slice(start, start + self.grid.size)

    def with_text(self, text_len: int) -> "MultiViewLayout":
        return MultiViewLayout(self.views, self.grid, text_len)


class TripletIndex(NamedTuple):
    """Hybrid positional index ``(m, x, y)`` of one token."""

    m: int
    x: int
    y: int

    def component(self, name: str) -> int:
        return getattr(self, name)

    def shifted(self, name: str, delta: int) -> "TripletIndex":
        return self._replace(**{name: getattr(self, name) + delta})


@dataclass(frozen=True)
class AttentionMask:
    """
    Boolean visibility matrix; ``visible[q, k]`` is True when query ``q`` may attend key ``k``.

    Every row keeps at least one visible entry and the diagonal is always visible.
    """

    visible: np.ndarray = field(repr=False)
    kind: MaskKind = "custom"

    def __post_init__(self) -> None:
        visible = np.array(self.visible, dtype=bool)
        if visible.ndim != 2 or visible.shape[0] != visible.shape[1]:
            raise ShapeError(f"mask must be square, got shape {visible.shape}")
        if not np.all(np.diagonal(visible)):
            raise ShapeError("mask diagonal must be visible")
        visible.setflags(write=False)
        object.__setattr__(self, "visible", visible)

    @property
    def n(self) -> int:
        return self.visible.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.visible.shape

    def count(self) -> int:
        """Number of visible entries."""
        return int(self.visible.sum())

    def rows(self) -> Iterator[np.ndarray]:
        return iter(self.visible)
