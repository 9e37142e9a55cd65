"""Image-token information-flow maps and per-position flow series."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from pyrope.core.exceptions import ConfigurationError, InputError, ShapeError
from pyrope.core.types import GridShape, MultiViewLayout
from pyrope.toynet.trace import AttentionTrace

logger = logging.getLogger(__name__)

NORMALIZATIONS: Tuple[str, ...] = ("sum1", "none")

# Flow is raw post-softmax attention mass, not gradient-weighted saliency.
FLOW_DEFINITION = "attention_mass"


@dataclass(frozen=True)
class FlowMap:
    """
    Non-negative values laid out on a token grid.

    ``values`` is the view-averaged map; ``per_view`` (when present) keeps one
    raw map per view; ``stderr`` (when present) is the Monte-Carlo standard
    error of each cell. ``flags`` carries warnings such as ``no_spatial_pairs``.
    """

    grid: GridShape
    values: np.ndarray = field(repr=False)
    normalization: str
    per_view: Optional[np.ndarray] = field(default=None, repr=False)
    stderr: Optional[np.ndarray] = field(default=None, repr=False)
    flags: Tuple[str, ...] = ()
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.rows, self.grid.cols):
            raise ShapeError(f"values must have shape {self.grid.rows}x{self.grid.cols}")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ShapeError("flow values must be finite and non-negative")
        if self.normalization == "sum1" and abs(values.sum() - 1.0) > 1e-6:
            raise ShapeError(f"sum1 map sums to {values.sum()}")
        object.__setattr__(self, "values", values)

    @property
    def views(self) -> int:
        return 1 if self.per_view is None else self.per_view.shape[0]

    def cells(self) -> List[Tuple[int, int, int, float]]:
        """``(view, row, col, value)`` rows, 1-based; view 0 is the averaged map."""
        rows = []
        for r in range(self.grid.rows):
            for c in range(self.grid.cols):
                rows.append((0, r + 1, c + 1, float(self.values[r, c])))
        if self.per_view is not None:
            for view, plane in enumerate(self.per_view, start=1):
                for r in range(self.grid.rows):
                    for c in range(self.grid.cols):
                        rows.append((view, r + 1, c + 1, float(plane[r, c])))
        return rows


@dataclass(frozen=True)
class FlowSeries:
    """Mean attention from generated tokens to each image position ``m = 1 .. v``."""

    positions: Tuple[int, ...]
    values: Tuple[float, ...]
    metadata: Dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if len(self.positions) != len(self.values):
            raise ShapeError("positions and values differ in length")

    def __len__(self) -> int:
        return len(self.positions)


def _normalize(values: np.ndarray, normalization: str) -> np.ndarray:
    if normalization not in NORMALIZATIONS:
        raise ConfigurationError(f"Invalid normalization: {normalization}")
    if normalization == "sum1":
        total = values.sum()
        if total <= 0:
            raise InputError("cannot normalise a map with zero total mass")
        return values / total
    return values


def info_flow(
    trace: AttentionTrace,
    layout: MultiViewLayout,
    normalization: str = "sum1",
) -> FlowMap:
    """
    Image-to-instruction flow: mean attention from text queries to each image token.

    Attention is averaged over layers, heads and every text-query row, then
    arranged on the grid per view and averaged across views.

    Raises:
        InputError: If the layout has no text or no image tokens
        ShapeError: If the trace does not cover exactly ``layout``
    """
    if layout.text_len == 0:
        raise InputError("info_flow needs at least one instruction (text) query")
    if layout.image_tokens == 0:
        raise InputError("info_flow needs image tokens")
    if trace.length != layout.length:
        raise ShapeError(f"trace length {trace.length} does not match layout {layout.length}")

    v = layout.image_tokens
    flow = trace.mean()[v:, :v].mean(axis=0)
    per_view = flow.reshape(layout.views, layout.grid.rows, layout.grid.cols)
    values = _normalize(per_view.mean(axis=0), normalization)
    return FlowMap(
        grid=layout.grid,
        values=values,
        normalization=normalization,
        per_view=per_view,
        metadata={"flow": FLOW_DEFINITION},
    )


def flow_by_position(traces: Sequence[AttentionTrace], layout: MultiViewLayout) -> FlowSeries:
    """
    Mean attention from generated-token queries to every image position.

    ``layout`` is the prompt layout; rows past ``layout.length`` in each trace
    are generated tokens. Attention is averaged over layers, heads and
    generated rows within a step, then over steps.

    Raises:
        InputError: If ``traces`` is empty, a trace holds no generated row, or
            the layout has no image tokens
    """
    if not traces:
        raise InputError("flow_by_position needs at least one generation step")
    v = layout.image_tokens
    if v == 0:
        raise InputError("flow_by_position needs image tokens")

    per_step = []
    for step, trace in enumerate(traces):
        if trace.length <= layout.length:
            raise InputError(f"trace of step {step} has no generated-token rows")
        per_step.append(trace.weights[:, :, layout.length :, :v].mean(axis=(0, 1, 2)))
    values = np.mean(per_step, axis=0)
    return FlowSeries(
        positions=tuple(range(1, v + 1)),
        values=tuple(float(x) for x in values),
        metadata={"flow": FLOW_DEFINITION},
    )


def quartile_ratio(flow_map: FlowMap) -> float:
    """Flow mass of the bottom quarter of grid rows divided by that of the top quarter."""
    band = max(1, flow_map.grid.rows // 4)
    top = float(flow_map.values[:band].sum())
    bottom = float(flow_map.values[-band:].sum())
    if top == 0.0:
        return math.inf if bottom > 0 else 1.0
    return bottom / top


@dataclass(frozen=True)
class FlowTrend:
    """Bottom/top quartile ratios of the information-flow map over many seeds."""

    encoding: str
    mask_kind: str
    ratios: Tuple[float, ...]

    @property
    def mean_ratio(self) -> float:
        return float(np.mean(self.ratios))

    @property
    def bottom_heavy_fraction(self) -> float:
        """Fraction of seeds whose bottom rows receive more flow than the top rows."""
        return float(np.mean([r > 1.0 for r in self.ratios]))


def flow_trend(
    seeds: Sequence[int],
    layout: MultiViewLayout,
    encoding: str,
    mask_kind: str,
    layers: int = 2,
    heads: int = 2,
    head_dim: int = 16,
    vocab: int = 64,
) -> FlowTrend:
    """Run the toy decoder once per seed and collect :func:`quartile_ratio` of its flow map."""
    from pyrope.core.config import ModelConfig
    from pyrope.toynet.model import ToyDecoder
    from pyrope.toynet.sequence import TokenSequence

    ratios = []
    for seed in seeds:
        cfg = ModelConfig(
            layers=layers,
            heads=heads,
            head_dim=head_dim,
            vocab=vocab,
            seed=seed,
            encoding=encoding,
            mask_kind=mask_kind,
        )
        seq = TokenSequence.synthetic(layout, cfg.model_dim, vocab, seed)
        trace = ToyDecoder(cfg).forward(seq).trace
        ratios.append(quartile_ratio(info_flow(trace, layout)))
    logger.debug("flow trend %s/%s over %d seeds", encoding, mask_kind, len(ratios))
    return FlowTrend(encoding=encoding, mask_kind=mask_kind, ratios=tuple(ratios))
