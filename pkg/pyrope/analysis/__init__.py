"""Decay curves, spatial decay maps and information-flow diagnostics."""

from pyrope.analysis.decay import (
    DecayBin,
    DecaySeries,
    TrendFit,
    decay_curve,
    fit_trend,
    spatial_decay_map,
    stderr_ratio,
)
from pyrope.analysis.flow import (
    FLOW_DEFINITION,
    NORMALIZATIONS,
    FlowMap,
    FlowSeries,
    FlowTrend,
    flow_by_position,
    flow_trend,
    info_flow,
    quartile_ratio,
)

__all__ = [
    "DecayBin",
    "DecaySeries",
    "TrendFit",
    "decay_curve",
    "fit_trend",
    "spatial_decay_map",
    "stderr_ratio",
    "FLOW_DEFINITION",
    "NORMALIZATIONS",
    "FlowMap",
    "FlowSeries",
    "FlowTrend",
    "flow_by_position",
    "flow_trend",
    "info_flow",
    "quartile_ratio",
]
