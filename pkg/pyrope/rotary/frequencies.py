"""Rotary frequency ladders and their allocation to index components."""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from pyrope.core.exceptions import ConfigurationError, ShapeError
from pyrope.core.types import COMPONENTS
from pyrope.utils.validation import validate_even_dim

logger = logging.getLogger(__name__)

DEFAULT_BASE = 10000.0


def base_frequencies(d: int, base: float = DEFAULT_BASE) -> np.ndarray:
    """
    Rotary angles ``theta_i = base ** (-2 (i - 1) / d)`` for ``i = 1 .. d/2``.

    Raises:
        ShapeError: If ``d`` is odd or smaller than 2
        ConfigurationError: If ``base <= 1``
    """
    validate_even_dim(d)
    if base <= 1:
        raise ConfigurationError(f"base must be greater than 1, got {base}")
    exponents = np.arange(0, d, 2, dtype=np.float64) / d
    return base ** (-exponents)


@dataclass(frozen=True)
class FrequencyAllocation:
    """
    Assignment of each rotary pair to one index component.

    Pair ``i`` rotates components ``2i`` and ``2i + 1`` (0-based) of a head
    vector by ``thetas[i]`` times the index component ``components[i]``.
    Thetas always follow pair position; allocation only chooses the component.
    """

    head_dim: int
    components: Tuple[str, ...]
    thetas: Tuple[float, ...]
    variant: str
    component_ids: np.ndarray = field(init=False, repr=False, compare=False)
    theta_array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pairs = self.head_dim // 2
        if len(self.components) != pairs or len(self.thetas) != pairs:
            raise ShapeError(
                f"allocation for head_dim {self.head_dim} needs {pairs} pairs, "
                f"got {len(self.components)} components and {len(self.thetas)} thetas"
            )
        unknown = set(self.components) - set(COMPONENTS)
        if unknown:
            raise ConfigurationError(f"unknown index components: {sorted(unknown)}")
        thetas = np.asarray(self.thetas, dtype=np.float64)
        if np.any(thetas <= 0) or np.any(np.diff(thetas) > 0):
            raise ConfigurationError("thetas must be positive and non-increasing")
        declared = _SPLITS.get(self.variant)
        if declared is not None:
            expected = tuple(declared(self.head_dim))
            if self.components != expected:
                raise ConfigurationError(
                    f"{self.variant} with head_dim {self.head_dim} needs "
                    f"m={expected.count('m')} x={expected.count('x')} y={expected.count('y')} "
                    f"in its declared order"
                )

        ids = np.array([COMPONENTS.index(c) for c in self.components], dtype=np.int64)
        ids.setflags(write=False)
        thetas.setflags(write=False)
        object.__setattr__(self, "component_ids", ids)
        object.__setattr__(self, "theta_array", thetas)

    @property
    def pairs(self) -> List[Tuple[str, float]]:
        """``(component, theta)`` per rotary pair."""
        return list(zip(self.components, self.thetas))

    def count(self, component: str) -> int:
        return self.components.count(component)

    def uses(self, component: str) -> bool:
        return component in self.components

    @property
    def has_spatial_pairs(self) -> bool:
        return self.uses("x") or self.uses("y")


def _alternate_xy(count: int) -> List[str]:
    return ["x" if i % 2 == 0 else "y" for i in range(count)]


def _require_multiple_of_8(variant: str, d: int, minimum: int) -> None:
    if d % 8 or d < minimum:
        raise ConfigurationError(
            f"{variant} needs head_dim divisible by 8 and at least {minimum}, got {d}"
        )


def _vanilla(d: int) -> List[str]:
    return ["m"] * (d // 2)


def _c2rope(d: int) -> List[str]:
    # high-frequency 3/4 of the pairs keep the temporal index, x/y interleave in the rest
    _require_multiple_of_8("c2rope", d, 16)
    temporal = 3 * d // 8
    return ["m"] * temporal + _alternate_xy(d // 2 - temporal)


def _mrope_like(d: int) -> List[str]:
    _require_multiple_of_8("mrope_like", d, 8)
    temporal = d // 8
    return _alternate_xy(d // 2 - temporal) + ["m"] * temporal


def _videorope_like(d: int) -> List[str]:
    _require_multiple_of_8("videorope_like", d, 8)
    temporal = d // 4
    return ["m"] * temporal + _alternate_xy(d // 2 - temporal)


_SPLITS: Dict[str, Callable[[int], List[str]]] = {
    "vanilla": _vanilla,
    "c2rope": _c2rope,
    "mrope_like": _mrope_like,
    "videorope_like": _videorope_like,
}

VARIANTS: Tuple[str, ...] = tuple(_SPLITS)


def make_allocation(variant: str, d: int, base: float = DEFAULT_BASE) -> FrequencyAllocation:
    """
    Build the frequency allocation of a named variant.

    Variants:
        vanilla: every pair encodes ``m``
        c2rope: first ``3d/8`` pairs ``m``, last ``d/8`` pairs alternate ``x, y``
        mrope_like: first ``3d/8`` pairs alternate ``x, y``, last ``d/8`` pairs ``m``
        videorope_like: first ``d/4`` pairs ``m``, the rest alternate ``x, y``

    Raises:
        ConfigurationError: Unknown variant or head_dim incompatible with it
        ShapeError: Odd head_dim
    """
    variant = variant.lower()
    if variant not in _SPLITS:
        raise ConfigurationError(
            f"Unknown encoding variant: {variant} (expected one of {', '.join(VARIANTS)})"
        )
    validate_even_dim(d)
    thetas = base_frequencies(d, base)
    components = _SPLITS[variant](d)
    logger.debug(
        "%s allocation d=%d: m=%d x=%d y=%d",
        variant,
        d,
        components.count("m"),
        components.count("x"),
        components.count("y"),
    )
    return FrequencyAllocation(
        head_dim=d,
        components=tuple(components),
        thetas=tuple(float(t) for t in thetas),
        variant=variant,
    )
