"""Monte-Carlo long-term decay curves and spatial decay maps of rotary scores."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from pyrope.analysis.flow import FlowMap
from pyrope.core.exceptions import ConfigurationError, InputError
from pyrope.core.types import COMPONENTS, GridShape
from pyrope.numkit.rng import SeededRng, gaussian_matrix
from pyrope.posindex.grid import cartesian_coords
from pyrope.rotary.frequencies import FrequencyAllocation
from pyrope.utils.validation import validate_positive

logger = logging.getLogger(__name__)

MIN_SAMPLES = 100


@dataclass(frozen=True)
class DecayBin:
    delta: int
    mean_abs_score: float
    stderr: float
    samples: int


@dataclass(frozen=True)
class DecaySeries:
    """Mean absolute rotary score per index offset along one component."""

    variant: str
    bins: Tuple[DecayBin, ...]
    component: str = "m"
    seed: int = 0
    metadata: Dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        deltas = [b.delta for b in self.bins]
        if any(b >= a for a, b in zip(deltas[1:], deltas)):
            raise InputError("decay bins must have strictly increasing deltas")

    @property
    def deltas(self) -> np.ndarray:
        return np.array([b.delta for b in self.bins])

    @property
    def means(self) -> np.ndarray:
        return np.array([b.mean_abs_score for b in self.bins])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([b.stderr for b in self.bins])

    def bin(self, delta: int) -> DecayBin:
        for b in self.bins:
            if b.delta == delta:
                return b
        raise KeyError(f"no bin for delta {delta}")


@dataclass(frozen=True)
class TrendFit:
    """Ordinary least-squares line through a decay series."""

    slope: float
    intercept: float
    slope_stderr: float

    @property
    def t_stat(self) -> float:
        if self.slope_stderr == 0.0:
            return math.copysign(math.inf, self.slope) if self.slope else 0.0
        return self.slope / self.slope_stderr


def _pair_products(q: np.ndarray, k: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # <R(a) q, k> per pair = cos(a) * A + sin(a) * B
    A = q[:, 0::2] * k[:, 0::2] + q[:, 1::2] * k[:, 1::2]
    B = q[:, 0::2] * k[:, 1::2] - q[:, 1::2] * k[:, 0::2]
    return A, B


def _draw_pairs(
    rng: SeededRng, n: int, d: int, alignment: float
) -> Tuple[np.ndarray, np.ndarray]:
    q = gaussian_matrix(rng.child(0), n, d)
    noise = gaussian_matrix(rng.child(1), n, d)
    k = alignment * q + math.sqrt(1.0 - alignment * alignment) * noise
    return q, k


def _validate(samples: int, shards: int, alignment: float) -> None:
    if samples < MIN_SAMPLES:
        raise ConfigurationError(f"samples must be at least {MIN_SAMPLES}, got {samples}")
    if shards < 1 or shards > samples:
        raise ConfigurationError(f"shards must be between 1 and samples, got {shards}")
    if not 0.0 <= alignment <= 1.0:
        raise ConfigurationError(f"alignment must lie in [0, 1], got {alignment}")


def _monte_carlo(
    alloc: FrequencyAllocation,
    angles: np.ndarray,
    samples: int,
    seed: int,
    alignment: float,
    shards: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mean and standard error of ``|<R(angle) q, k>|`` for every column of ``angles``.

    ``angles`` has shape ``(d/2, cells)``. Shard ``s`` draws from stream
    ``(seed, s)``; partial sums are reduced in shard order.
    """
    cos, sin = np.cos(angles), np.sin(angles)
    sizes = [len(chunk) for chunk in np.array_split(np.arange(samples), shards)]
    root = SeededRng(seed)

    def run_shard(shard: int) -> Tuple[np.ndarray, np.ndarray]:
        q, k = _draw_pairs(root.child(shard), sizes[shard], alloc.head_dim, alignment)
        A, B = _pair_products(q, k)
        scores = np.abs(A @ cos + B @ sin)
        return scores.sum(axis=0), (scores * scores).sum(axis=0)

    with ThreadPoolExecutor(max_workers=shards) as executor:
        partials: List[Tuple[np.ndarray, np.ndarray]] = list(executor.map(run_shard, range(shards)))

    total = np.zeros(angles.shape[1])
    total_sq = np.zeros(angles.shape[1])
    for part, part_sq in partials:
        total += part
        total_sq += part_sq
    mean = total / samples
    variance = np.maximum(total_sq - samples * mean * mean, 0.0) / (samples - 1)
    return mean, np.sqrt(variance / samples)


def decay_curve(
    alloc: FrequencyAllocation,
    max_delta: int,
    samples: int,
    seed: int,
    component: str = "m",
    alignment: float = 1.0,
    shards: int = 4,
) -> DecaySeries:
    """
    Monte-Carlo estimate of ``E|relative_score(q, k, idx0 + delta * e_c, idx0)|``.

    One bin per ``delta = 0 .. max_delta``, where ``e_c`` is the unit offset in
    ``component``. Queries are standard Gaussian; keys are
    ``alignment * q + sqrt(1 - alignment**2) * noise``. Independent pairs
    (``alignment = 0``) give a flat curve because a rotation leaves the
    Gaussian score distribution unchanged; aligned pairs expose the decay.
    Bin 0 is the unrotated dot-product statistic.

    Args:
        alloc: Frequency allocation under test
        max_delta: Largest offset
        samples: Monte-Carlo pairs per bin (at least 100)
        seed: Root seed
        component: Index component to sweep (``m``, ``x`` or ``y``)
        alignment: Query/key correlation in ``[0, 1]``
        shards: Independent RNG streams evaluated in parallel

    Returns:
        DecaySeries with ``max_delta + 1`` bins
    """
    validate_positive(max_delta, "max_delta")
    if component not in COMPONENTS:
        raise ConfigurationError(f"Unknown index component: {component}")
    _validate(samples, shards, alignment)

    deltas = np.arange(0, max_delta + 1)
    selected = (alloc.component_ids == COMPONENTS.index(component)).astype(np.float64)
    angles = np.outer(selected * alloc.theta_array, deltas)
    mean, stderr = _monte_carlo(alloc, angles, samples, seed, alignment, shards)

    bins = tuple(
        DecayBin(int(d), float(m), float(s), samples) for d, m, s in zip(deltas, mean, stderr)
    )
    logger.debug("%s decay along %s: %d bins, %d samples", alloc.variant, component, len(bins), samples)
    return DecaySeries(
        variant=alloc.variant,
        bins=bins,
        component=component,
        seed=seed,
        metadata={"alignment": repr(alignment), "shards": str(shards)},
    )


def spatial_decay_map(
    alloc: FrequencyAllocation,
    grid: GridShape,
    samples: int,
    seed: int,
    alignment: float = 1.0,
    shards: int = 4,
) -> FlowMap:
    """
    Mean ``|score|`` between a query at the grid centre and a key at every cell.

    The query sits at ``(m, 0, 0)`` and the key at ``(m, x, y)`` with the
    cell's Cartesian coordinates, so only spatial pairs rotate. Allocations
    without spatial pairs give a flat map flagged ``no_spatial_pairs``.
    """
    _validate(samples, shards, alignment)
    flags: Tuple[str, ...] = ()
    if not alloc.has_spatial_pairs:
        logger.warning("%s allocation has no spatial pairs; spatial map is flat", alloc.variant)
        flags = ("no_spatial_pairs",)

    coords = cartesian_coords(grid).reshape(-1, 2)
    offsets = np.zeros((coords.shape[0], 3))
    offsets[:, 1:] = -coords  # idx_q - idx_k
    angles = (offsets[:, alloc.component_ids] * alloc.theta_array).T
    mean, stderr = _monte_carlo(alloc, angles, samples, seed, alignment, shards)

    return FlowMap(
        grid=grid,
        values=mean.reshape(grid.rows, grid.cols),
        normalization="none",
        stderr=stderr.reshape(grid.rows, grid.cols),
        flags=flags,
        metadata={"variant": alloc.variant, "seed": str(seed), "alignment": repr(alignment)},
    )


def fit_trend(series: DecaySeries, start: int = 1) -> TrendFit:
    """Least-squares line of ``mean_abs_score`` against ``delta`` over bins with ``delta >= start``."""
    keep = series.deltas >= start
    x = series.deltas[keep].astype(np.float64)
    y = series.means[keep]
    if x.size < 3:
        raise InputError("need at least three bins to fit a trend")
    x_centered = x - x.mean()
    sxx = float(np.dot(x_centered, x_centered))
    slope = float(np.dot(x_centered, y - y.mean()) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    residuals = y - (intercept + slope * x)
    slope_stderr = math.sqrt(float(np.dot(residuals, residuals)) / (x.size - 2) / sxx)
    return TrendFit(slope=slope, intercept=intercept, slope_stderr=slope_stderr)


def stderr_ratio(
    curve: Callable[[int], DecaySeries], samples: int, factor: int = 4
) -> float:
    """Mean ratio of bin stderrs at ``samples`` over those at ``factor * samples``."""
    small = curve(samples).stderrs
    large = curve(factor * samples).stderrs
    keep = large > 0
    return float(np.mean(small[keep] / large[keep]))
