"""Base renderer interface."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Union

import numpy as np

from pyrope.utils.io import atomic_write_bytes


class VisualizationBase(ABC):
    """Base class for heatmap renderers."""

    suffix: str = ""

    @abstractmethod
    def render(self, values: np.ndarray, header: str) -> bytes:
        """
        Render a 2-D array to file bytes.

        Args:
            values: Matrix to render
            header: Provenance line (seed, variant, normalization) embedded as a comment

        Returns:
            Encoded file contents
        """
        pass

    def export(self, values: np.ndarray, header: str, output_path: Union[str, Path]) -> Path:
        """
        Render and write atomically to ``output_path``.

        Args:
            values: Matrix to render
            header: Provenance line
            output_path: Output file path
        """
        return atomic_write_bytes(output_path, self.render(values, header))
