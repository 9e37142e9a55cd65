"""Heatmap and curve rendering: 8-bit PGM and matplotlib SVG."""

import io
from typing import Sequence

import numpy as np

from pyrope.analysis.decay import DecaySeries
from pyrope.core.exceptions import ShapeError
from pyrope.visualization.base import VisualizationBase

# fixed hash salt and no date keep SVG output byte-identical across runs
_SVG_RC = {"svg.hashsalt": "pyrope", "svg.fonttype": "path"}
_SVG_METADATA = {"Date": None}


def _require_matplotlib():
    try:
        import matplotlib
    except ImportError:
        raise ImportError(
            "matplotlib is required for SVG output. Install with: pip install matplotlib"
        )
    return matplotlib


def _comment_svg(svg: bytes, header: str) -> bytes:
    comment = f"<!-- {header.lstrip('# ')} -->\n".encode("utf-8")
    end = svg.find(b"?>")
    if svg.startswith(b"<?xml") and end >= 0:
        cut = svg.index(b"\n", end) + 1
        return svg[:cut] + comment + svg[cut:]
    return comment + svg


def _scale_to_bytes(values: np.ndarray) -> np.ndarray:
    low, high = float(values.min()), float(values.max())
    if high == low:
        return np.full(values.shape, 255 if high > 0 else 0, dtype=np.uint8)
    return np.rint((values - low) / (high - low) * 255.0).astype(np.uint8)


class PGMHeatmap(VisualizationBase):
    """Binary (``P5``) greyscale image, min-max scaled to 0..255."""

    suffix = ".pgm"

    def render(self, values: np.ndarray, header: str) -> bytes:
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.size == 0:
            raise ShapeError(f"heatmap needs a non-empty 2-D array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ShapeError("heatmap values must be finite")
        rows, cols = values.shape
        head = f"P5\n{header}\n{cols} {rows}\n255\n".encode("ascii")
        return head + _scale_to_bytes(values).tobytes()


class SVGHeatmap(VisualizationBase):
    """Matplotlib heatmap with a colour bar, written as SVG."""

    suffix = ".svg"

    def __init__(self, title: str = "", cmap: str = "viridis"):
        self.title = title
        self.cmap = cmap

    def render(self, values: np.ndarray, header: str) -> bytes:
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.size == 0:
            raise ShapeError(f"heatmap needs a non-empty 2-D array, got shape {values.shape}")
        matplotlib = _require_matplotlib()
        from matplotlib.figure import Figure

        with matplotlib.rc_context(_SVG_RC):
            fig = Figure(figsize=(4.8, 4.0))
            ax = fig.add_subplot()
            image = ax.imshow(values, cmap=self.cmap, interpolation="nearest")
            fig.colorbar(image, ax=ax)
            ax.set_xlabel("col")
            ax.set_ylabel("row")
            if self.title:
                ax.set_title(self.title)
            buffer = io.BytesIO()
            fig.savefig(buffer, format="svg", metadata=_SVG_METADATA)
        return _comment_svg(buffer.getvalue(), header)


def decay_chart(series: Sequence[DecaySeries], header: str, log_x: bool = False) -> bytes:
    """
    SVG line chart of one or more decay curves with one-stderr bands.

    Args:
        series: Curves to draw, one line per variant
        header: Provenance line embedded as a comment
        log_x: Use a logarithmic offset axis (bin 0 is dropped)
    """
    if not series:
        raise ShapeError("decay_chart needs at least one series")
    matplotlib = _require_matplotlib()
    from matplotlib.figure import Figure

    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=(6.0, 4.0))
        ax = fig.add_subplot()
        for curve in series:
            keep = curve.deltas > 0 if log_x else np.ones(len(curve.bins), dtype=bool)
            x, y, err = curve.deltas[keep], curve.means[keep], curve.stderrs[keep]
            ax.plot(x, y, label=f"{curve.variant} ({curve.component})")
            ax.fill_between(x, y - err, y + err, alpha=0.25)
        if log_x:
            ax.set_xscale("log")
        ax.set_xlabel("relative offset")
        ax.set_ylabel("mean |score|")
        ax.legend()
        buffer = io.BytesIO()
        fig.savefig(buffer, format="svg", metadata=_SVG_METADATA)
    return _comment_svg(buffer.getvalue(), header)
