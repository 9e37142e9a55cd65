"""Configuration management for the pyrope library."""

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Union

from pyrope.core.exceptions import ConfigurationError
from pyrope.core.types import GridShape, MultiViewLayout

ENV_OUTPUT_DIR = "PYROPE_OUTPUT_DIR"
ENV_SEED = "PYROPE_SEED"
ENV_LOG_LEVEL = "PYROPE_LOG_LEVEL"

NOPE = "nope"


@dataclass(frozen=True)
class ModelConfig:
    """Configuration of the toy decoder."""

    layers: int = 2
    heads: int = 2
    head_dim: int = 16
    vocab: int = 64
    seed: int = 0
    encoding: str = "c2rope"
    mask_kind: str = "causal"
    rope_base: float = 10000.0
    mlp_ratio: int = 4

    def __post_init__(self) -> None:
        """Validate configuration after initialization."""
        for name in ("layers", "heads", "head_dim", "vocab", "mlp_ratio"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")
        if self.seed < 0:
            raise ConfigurationError("seed must be a non-negative integer")

        from pyrope.maskgen import MASK_KINDS
        from pyrope.rotary import make_allocation

        if self.mask_kind not in MASK_KINDS:
            raise ConfigurationError(f"Invalid mask_kind: {self.mask_kind}")
        if self.encoding == NOPE:
            if self.head_dim % 2:
                raise ConfigurationError("head_dim must be even")
        else:
            make_allocation(self.encoding, self.head_dim, base=self.rope_base)

    @property
    def model_dim(self) -> int:
        return self.heads * self.head_dim

    def allocation(self):
        """Frequency allocation for ``encoding``; None when rotation is bypassed."""
        if self.encoding == NOPE:
            return None
        from pyrope.rotary import make_allocation

        return make_allocation(self.encoding, self.head_dim, base=self.rope_base)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class RunConfig:
    """Experiment configuration consumed by the command-line tool."""

    encoding: str = "c2rope"
    mask: str = "causal"
    grid: Union[str, GridShape] = "4x4"
    views: int = 1
    text: int = 4
    layers: int = 2
    heads: int = 2
    head_dim: int = 16
    vocab: int = 64
    seed: int = 0
    output_dir: str = "."
    steps: int = 4
    samples: int = 2000
    max_delta: int = 256
    normalization: str = "sum1"
    rope_base: float = 10000.0
    embeddings: str = ""

    def __post_init__(self) -> None:
        """Validate configuration after initialization."""
        if isinstance(self.grid, str):
            self.grid = GridShape.parse(self.grid)
        for name in ("views", "text"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be non-negative")
        for name in ("steps", "samples", "max_delta"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")
        if self.normalization not in ("sum1", "none"):
            raise ConfigurationError(f"Invalid normalization: {self.normalization}")
        # cross-field checks (variant vs head_dim, mask kind) live in ModelConfig
        self.model_config()
        self.layout()

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            layers=self.layers,
            heads=self.heads,
            head_dim=self.head_dim,
            vocab=self.vocab,
            seed=self.seed,
            encoding=self.encoding,
            mask_kind=self.mask,
            rope_base=self.rope_base,
        )

    def layout(self) -> MultiViewLayout:
        return MultiViewLayout(views=self.views, grid=self.grid, text_len=self.text)

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "RunConfig":
        """Create configuration from dictionary, coercing values to the field types."""
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(config_dict) - set(known))
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys: {', '.join(unknown)}")

        values: Dict[str, Any] = {}
        for key, raw in config_dict.items():
            if raw is None:
                continue
            default = known[key].default
            try:
                if key == "grid":
                    values[key] = raw if isinstance(raw, GridShape) else str(raw)
                elif isinstance(default, bool):
                    values[key] = str(raw).lower() in ("true", "1", "yes")
                elif isinstance(default, int):
                    values[key] = int(raw)
                elif isinstance(default, float):
                    values[key] = float(raw)
                else:
                    values[key] = str(raw)
            except (TypeError, ValueError) as e:
                raise ConfigurationError(f"Invalid value for {key}: {raw!r}") from e
        return cls(**values)

    @staticmethod
    def read_file(file_path: Union[str, Path]) -> Dict[str, Any]:
        """Read a key=value, JSON or YAML configuration file into a dictionary."""
        file_path = Path(file_path)
        if not file_path.exists():
            raise ConfigurationError(f"Configuration file not found: {file_path}")

        if file_path.suffix in (".json",):
            with open(file_path, "r") as f:
                config_dict = json.load(f)
        elif file_path.suffix in (".yaml", ".yml"):
            try:
                import yaml
            except ImportError:
                raise ConfigurationError(
                    "PyYAML is required for YAML configuration files. Install with: pip install pyyaml"
                )
            with open(file_path, "r") as f:
                config_dict = yaml.safe_load(f) or {}
        else:
            config_dict = parse_key_values(file_path.read_text())

        if not isinstance(config_dict, dict):
            raise ConfigurationError(f"Configuration file must hold a mapping: {file_path}")
        return config_dict

    @classmethod
    def from_file(cls, file_path: Union[str, Path]) -> "RunConfig":
        """Load configuration from a key=value, JSON or YAML file."""
        return cls.from_dict(cls.read_file(file_path))

    @staticmethod
    def read_env() -> Dict[str, Any]:
        """Collect configuration overrides from environment variables."""
        config_dict: Dict[str, Any] = {}
        if output_dir := os.getenv(ENV_OUTPUT_DIR):
            config_dict["output_dir"] = output_dir
        if seed := os.getenv(ENV_SEED):
            config_dict["seed"] = seed
        return config_dict

    @classmethod
    def from_env(cls) -> "RunConfig":
        """Load configuration from environment variables."""
        return cls.from_dict(cls.read_env())

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        data = asdict(self)
        data["grid"] = str(self.grid)
        return data


def parse_key_values(text: str) -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    config_dict: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigurationError(f"line {lineno}: empty key")
        config_dict[key.replace("-", "_")] = value
    return config_dict
