"""Unit tests for configuration, core types and shared utilities."""

import json
import logging

import pytest

from pyrope.core.config import ModelConfig, RunConfig, parse_key_values
from pyrope.core.exceptions import ConfigurationError, ShapeError
from pyrope.core.types import GridShape, MultiViewLayout, TripletIndex
from pyrope.utils import (
    atomic_write_all,
    atomic_write_text,
    setup_logging,
    validate_even_dim,
    validate_length,
)


def test_run_config_defaults():
    """Defaults describe a valid 4x4 c2rope run."""
    cfg = RunConfig()
    assert cfg.grid == GridShape(4, 4)
    assert cfg.layout() == MultiViewLayout(1, GridShape(4, 4), 4)
    assert cfg.model_config().encoding == "c2rope"
    assert cfg.to_dict()["grid"] == "4x4"


def test_run_config_from_dict_coerces_strings():
    """String values are coerced to the field types."""
    cfg = RunConfig.from_dict({"grid": "3x5", "views": "2", "seed": "11", "rope_base": "500"})
    assert cfg.grid == GridShape(3, 5)
    assert cfg.views == 2 and cfg.seed == 11
    assert cfg.rope_base == 500.0


def test_run_config_rejects_unknown_and_bad_values():
    """Unknown keys, bad numbers and inconsistent fields are configuration errors."""
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"colour": "red"})
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"views": "two"})
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"encoding": "c2rope", "head_dim": "12"})
    with pytest.raises(ConfigurationError):
        RunConfig(normalization="softmax")
    with pytest.raises(ConfigurationError):
        RunConfig(grid="4by4")


def test_run_config_key_value_file(tmp_path):
    """Plain key=value files support comments and dashed keys."""
    path = tmp_path / "run.cfg"
    path.write_text(
        "# toy run\n"
        "layers = 1\n"
        "head-dim = 32\n"
        "encoding = vanilla   # baseline\n"
        "\n"
        "grid = 2x3\n"
        "text = 0\n"
    )
    cfg = RunConfig.from_file(path)
    assert (cfg.layers, cfg.head_dim, cfg.encoding) == (1, 32, "vanilla")
    assert cfg.layout() == MultiViewLayout(1, GridShape(2, 3), 0)


def test_run_config_json_file(tmp_path):
    """JSON files are read with the standard library."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"mask": "chebyshev", "views": 2}))
    cfg = RunConfig.from_file(path)
    assert cfg.mask == "chebyshev" and cfg.views == 2


def test_run_config_yaml_file(tmp_path):
    """YAML files need PyYAML."""
    pytest.importorskip("yaml")
    path = tmp_path / "run.yaml"
    path.write_text("encoding: mrope_like\nhead_dim: 24\n")
    cfg = RunConfig.from_file(path)
    assert cfg.encoding == "mrope_like" and cfg.head_dim == 24


def test_run_config_file_errors(tmp_path):
    """Missing files, non-mapping JSON and malformed lines are rejected."""
    with pytest.raises(ConfigurationError):
        RunConfig.from_file(tmp_path / "absent.cfg")
    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]")
    with pytest.raises(ConfigurationError):
        RunConfig.from_file(listing)
    with pytest.raises(ConfigurationError):
        parse_key_values("layers 2")
    with pytest.raises(ConfigurationError):
        parse_key_values(" = 2")


def test_run_config_from_env(monkeypatch):
    """PYROPE_OUTPUT_DIR and PYROPE_SEED are honoured."""
    monkeypatch.setenv("PYROPE_OUTPUT_DIR", "/tmp/pyrope-out")
    monkeypatch.setenv("PYROPE_SEED", "99")
    cfg = RunConfig.from_env()
    assert cfg.output_dir == "/tmp/pyrope-out"
    assert cfg.seed == 99


def test_model_config_to_dict():
    """ModelConfig serialises every field."""
    data = ModelConfig(encoding="vanilla", head_dim=10).to_dict()
    assert data["encoding"] == "vanilla" and data["head_dim"] == 10
    assert ModelConfig(heads=3, head_dim=16).model_dim == 48


def test_grid_shape_parse():
    """HxW strings parse and invalid ones raise."""
    assert GridShape.parse("16x8") == GridShape(16, 8)
    assert str(GridShape(2, 5)) == "2x5"
    for bad in ("4", "4x", "ax4", "0x4"):
        with pytest.raises(ConfigurationError):
            GridShape.parse(bad)


def test_multi_view_layout_geometry():
    """Token counts, view slices and text-only layouts."""
    layout = MultiViewLayout(3, GridShape(2, 4), 5)
    assert layout.image_tokens == 24
    assert layout.length == 29
    assert layout.view_slice(1) == slice(8, 16)
    assert layout.with_text(1).length == 25
    assert MultiViewLayout.text_only(4).image_tokens == 0
    with pytest.raises(ConfigurationError):
        MultiViewLayout(0, GridShape(2, 2), 0)
    with pytest.raises(ConfigurationError):
        MultiViewLayout(-1, GridShape(2, 2), 3)


def test_triplet_index_helpers():
    """Component access and single-component shifts."""
    idx = TripletIndex(5, -1, 2)
    assert idx.component("x") == -1
    assert idx.shifted("y", 3) == TripletIndex(5, -1, 5)


def test_validation_helpers():
    """Dimension and length validators raise shape errors."""
    validate_even_dim(16)
    with pytest.raises(ShapeError):
        validate_even_dim(0)
    assert validate_length([1, 2, 3], 3).dtype.kind == "f"
    with pytest.raises(ShapeError):
        validate_length([[1, 2, 3]], 3)


def test_atomic_write_leaves_no_partial_file(tmp_path, monkeypatch):
    """A failed replace leaves neither the target nor a temp file behind."""
    import os

    target = tmp_path / "out" / "data.csv"
    atomic_write_text(target, "a\n")
    assert target.read_text() == "a\n"

    def fail(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", fail)
    with pytest.raises(OSError):
        atomic_write_text(tmp_path / "out" / "other.csv", "b\n")
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == ["data.csv"]


def test_setup_logging_sets_level():
    """The package logger takes the requested level."""
    logger = setup_logging("DEBUG")
    assert logger.name == "pyrope"
    assert logger.level == 10
    setup_logging("WARNING")


def test_setup_logging_tags_records_with_run_context():
    """Records carry the command and seed, and reconfiguring does not add handlers."""
    logger = setup_logging("INFO", command="decay", seed=11)
    handlers = len(logger.handlers)
    logger = setup_logging("INFO", command="flow", seed=12)
    assert len(logger.handlers) == handlers

    handler = next(h for h in logger.handlers if getattr(h, "_pyrope", False))
    record = logging.LogRecord("pyrope.analysis", logging.INFO, __file__, 1, "done", None, None)
    assert handler.filter(record)
    assert "[flow seed=12] done" in handler.format(record)
    setup_logging("WARNING")


def test_cli_log_records_show_command_and_seed(tmp_path, capfd):
    """Debug output of a CLI run names the subcommand and seed on stderr."""
    from pyrope.cli.main import dispatch

    argv = ["indices", "--seed", "9", "--log-level", "INFO", "--out", str(tmp_path)]
    assert dispatch(argv) == 0
    err = capfd.readouterr().err
    assert "[indices seed=9]" in err
    setup_logging("WARNING")


def test_atomic_write_all_is_all_or_nothing(tmp_path, monkeypatch):
    """A failure on the second rename removes the first file and every temp file."""
    import os

    real_replace = os.replace
    calls = []

    def fail_second(src, dst):
        calls.append(dst)
        if len(calls) == 2:
            raise OSError("disk full")
        return real_replace(src, dst)

    monkeypatch.setattr(os, "replace", fail_second)
    with pytest.raises(OSError):
        atomic_write_all([(tmp_path / "a.csv", b"a\n"), (tmp_path / "b.csv", b"b\n")])
    assert list(tmp_path.iterdir()) == []

    monkeypatch.setattr(os, "replace", real_replace)
    written = atomic_write_all([(tmp_path / "a.csv", b"a\n"), (tmp_path / "sub" / "b.csv", b"b\n")])
    assert [p.read_bytes() for p in written] == [b"a\n", b"b\n"]
