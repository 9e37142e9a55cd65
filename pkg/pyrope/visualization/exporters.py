"""CSV export (and the matching readers) for indices, allocations, masks, traces and analyses."""

import csv
import io
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from pyrope.analysis.decay import DecayBin, DecaySeries
from pyrope.analysis.flow import FlowMap, FlowSeries
from pyrope.core.exceptions import InputError
from pyrope.core.types import AttentionMask, MultiViewLayout
from pyrope.posindex.triplet import triplet_array
from pyrope.rotary.frequencies import FrequencyAllocation
from pyrope.utils.io import atomic_write_text


def header_line(
    seed: Optional[int] = None, variant: str = "-", normalization: str = "-"
) -> str:
    """Provenance comment written as the first line of every output file."""
    seed_text = "-" if seed is None else str(seed)
    return f"# seed={seed_text} variant={variant} normalization={normalization}"


def _format(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    return str(value)


def _csv_text(header: str, columns: Optional[Sequence[str]], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    buffer.write(header + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    if columns:
        writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(value) for value in row])
    return buffer.getvalue()


def _data_lines(text: str) -> List[List[str]]:
    lines = [line for line in text.splitlines() if line and not line.startswith("#")]
    return list(csv.reader(lines))


class CSVExporter:
    """Render domain objects as CSV text and write them atomically."""

    @staticmethod
    def indices(layout: MultiViewLayout, header: str, triplets: Optional[np.ndarray] = None) -> str:
        """
        ``view,row,col,m,x,y`` per token; text tokens use ``view=0, row=0`` and ``col`` = text offset.
        """
        triplets = triplet_array(layout) if triplets is None else triplets
        rows = []
        for index, (m, x, y) in enumerate(triplets):
            if index < layout.image_tokens:
                view, cell = divmod(index, layout.grid.size)
                row, col = divmod(cell, layout.grid.cols)
                rows.append((view + 1, row + 1, col + 1, m, x, y))
            else:
                rows.append((0, 0, index - layout.image_tokens + 1, m, x, y))
        return _csv_text(header, ("view", "row", "col", "m", "x", "y"), rows)

    @staticmethod
    def allocation(alloc: FrequencyAllocation, header: str) -> str:
        rows = [(i + 1, c, t) for i, (c, t) in enumerate(alloc.pairs)]
        return _csv_text(header, ("pair", "component", "theta"), rows)

    @staticmethod
    def mask(mask: AttentionMask, header: str) -> str:
        return CSVExporter.matrix(mask.visible.astype(np.int64), header)

    @staticmethod
    def matrix(values: np.ndarray, header: str) -> str:
        return _csv_text(header, None, values.tolist())

    @staticmethod
    def decay(series: DecaySeries, header: str) -> str:
        rows = [
            (series.variant, b.delta, b.mean_abs_score, b.stderr, b.samples) for b in series.bins
        ]
        return _csv_text(header, ("variant", "delta", "mean_abs_score", "stderr", "samples"), rows)

    @staticmethod
    def flow_map(flow_map: FlowMap, header: str) -> str:
        return _csv_text(header, ("view", "row", "col", "value"), flow_map.cells())

    @staticmethod
    def flow_series(series: FlowSeries, header: str) -> str:
        return _csv_text(header, ("position", "value"), zip(series.positions, series.values))

    @staticmethod
    def tokens(tokens: Sequence[int], header: str) -> str:
        return _csv_text(header, ("step", "token"), enumerate(tokens, start=1))

    @staticmethod
    def summary(items: Iterable[Sequence], header: str) -> str:
        return _csv_text(header, ("metric", "value"), items)

    @staticmethod
    def write(path: Union[str, Path], text: str) -> Path:
        return atomic_write_text(path, text)


def parse_matrix(text: str) -> np.ndarray:
    """Read a headerless numeric CSV matrix, skipping comment lines."""
    rows = _data_lines(text)
    if not rows:
        raise InputError("matrix CSV holds no data rows")
    return np.array([[float(v) for v in row] for row in rows])


def parse_flow_series(text: str) -> FlowSeries:
    """Inverse of :meth:`CSVExporter.flow_series`."""
    rows = _data_lines(text)
    if not rows or rows[0] != ["position", "value"]:
        raise InputError("flow series CSV must start with a position,value header")
    positions = tuple(int(r[0]) for r in rows[1:])
    values = tuple(float(r[1]) for r in rows[1:])
    return FlowSeries(positions=positions, values=values)


def parse_decay(text: str) -> DecaySeries:
    """Inverse of :meth:`CSVExporter.decay`."""
    rows = _data_lines(text)
    if not rows or rows[0] != ["variant", "delta", "mean_abs_score", "stderr", "samples"]:
        raise InputError("decay CSV must start with its column header")
    body = rows[1:]
    if not body:
        raise InputError("decay CSV holds no bins")
    bins = tuple(DecayBin(int(r[1]), float(r[2]), float(r[3]), int(r[4])) for r in body)
    return DecaySeries(variant=body[0][0], bins=bins)
