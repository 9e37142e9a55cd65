"""CSV export and heatmap rendering for indices, masks, traces and analyses."""

from pyrope.visualization.base import VisualizationBase
from pyrope.visualization.charts import PGMHeatmap, SVGHeatmap, decay_chart
from pyrope.visualization.exporters import (
    CSVExporter,
    header_line,
    parse_decay,
    parse_flow_series,
    parse_matrix,
)

__all__ = [
    "VisualizationBase",
    "PGMHeatmap",
    "SVGHeatmap",
    "decay_chart",
    "CSVExporter",
    "header_line",
    "parse_decay",
    "parse_flow_series",
    "parse_matrix",
]
