"""Shared fixtures."""

import numpy as np
import pytest

from pyrope.core.config import ModelConfig
from pyrope.core.types import GridShape, MultiViewLayout
from pyrope.numkit.rng import SeededRng


@pytest.fixture
def grid_4x4():
    return GridShape(4, 4)


@pytest.fixture
def layout_4x4(grid_4x4):
    """One 4x4 view followed by two text tokens."""
    return MultiViewLayout(views=1, grid=grid_4x4, text_len=2)


@pytest.fixture
def small_cfg():
    return ModelConfig(layers=2, heads=2, head_dim=16, vocab=32, seed=7)


@pytest.fixture
def gen():
    """Seeded numpy generator for test inputs."""
    return SeededRng(1234).generator()


@pytest.fixture
def naive_matmul():
    def multiply(a, b):
        out = np.zeros((a.shape[0], b.shape[1]))
        for i in range(a.shape[0]):
            for j in range(b.shape[1]):
                for k in range(a.shape[1]):
                    out[i, j] += a[i, k] * b[k, j]
        return out

    return multiply
