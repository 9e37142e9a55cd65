"""End-to-end tests for the command-line interface."""

import numpy as np
import pytest

from pyrope.cli import commands
from pyrope.cli.main import dispatch
from pyrope.visualization import parse_flow_series, parse_matrix


def _read_rows(path):
    return [line for line in path.read_text().splitlines() if not line.startswith("#")]


def test_indices_corner_rows(tmp_path):
    """indices on a 4x4 grid reproduces the corner triples."""
    code = dispatch(["indices", "--grid", "4x4", "--views", "1", "--text", "0", "--out", str(tmp_path)])
    assert code == 0
    rows = _read_rows(tmp_path / "indices.csv")
    assert rows[0] == "view,row,col,m,x,y"
    assert rows[1] == "1,1,1,1,-1,1"
    assert rows[4] == "1,1,4,4,1,1"
    assert rows[13] == "1,4,1,13,-1,-1"
    assert rows[16] == "1,4,4,16,1,-1"
    assert (tmp_path / "indices.csv").read_text().startswith("# seed=0 variant=triplet")


def test_indices_raster_scheme(tmp_path):
    """The raster scheme repeats m in every component."""
    assert dispatch(["indices", "--scheme", "raster", "--text", "0", "--out", str(tmp_path)]) == 0
    assert _read_rows(tmp_path / "indices.csv")[1] == "1,1,1,1,1,1"


def test_mask_counts_and_pgm(tmp_path):
    """mask writes a CSV with 243 ones and a matching PGM."""
    argv = ["mask", "--grid", "4x4", "--views", "1", "--text", "2", "--kind", "chebyshev"]
    assert dispatch(argv + ["--out", str(tmp_path)]) == 0
    matrix = parse_matrix((tmp_path / "mask_chebyshev.csv").read_text())
    assert int(matrix.sum()) == 243
    pgm = (tmp_path / "mask_chebyshev.pgm").read_bytes()
    assert pgm.startswith(b"P5\n# seed=")
    assert pgm.endswith(bytes(255 if v else 0 for v in matrix.reshape(-1).astype(bool)))


def test_freq_dump(tmp_path):
    """freq writes the allocation table."""
    assert dispatch(["freq", "--variant", "c2rope", "--dim", "128", "--out", str(tmp_path)]) == 0
    rows = _read_rows(tmp_path / "freq_c2rope_d128.csv")
    assert rows[0] == "pair,component,theta"
    assert len(rows) == 65
    assert rows[48].startswith("48,m,") and rows[49].startswith("49,x,")


def test_outputs_are_byte_identical_across_runs(tmp_path):
    """Re-running a command overwrites its outputs with identical bytes."""
    argv = ["run", "--grid", "2x2", "--text", "3", "--steps", "2", "--out", str(tmp_path)]
    assert dispatch(argv) == 0
    first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert dispatch(argv) == 0
    assert {p.name: p.read_bytes() for p in tmp_path.iterdir()} == first


def test_run_with_config_and_trace_dump(tmp_path):
    """run reads a key=value config, lets flags win, and dumps one CSV per layer/head."""
    config = tmp_path / "run.cfg"
    config.write_text("layers = 3\nheads = 2\nhead_dim = 16\nseed = 4\ngrid = 2x2\ntext = 2\n")
    out, traces = tmp_path / "out", tmp_path / "traces"
    argv = ["run", "--config", str(config), "--seed", "5", "--out", str(out), "--dump-trace", str(traces)]
    assert dispatch(argv) == 0
    assert sorted(p.name for p in traces.iterdir()) == [
        f"trace_l{layer}_h{head}.csv" for layer in (1, 2, 3) for head in (1, 2)
    ]
    assert (out / "logits.csv").read_text().startswith("# seed=5 variant=c2rope")
    trace = parse_matrix((traces / "trace_l1_h1.csv").read_text())
    assert np.allclose(trace.sum(axis=1), 1.0, atol=1e-6)


def test_output_dir_from_environment(tmp_path, monkeypatch):
    """PYROPE_OUTPUT_DIR applies unless --out is given."""
    env_dir, flag_dir = tmp_path / "env", tmp_path / "flag"
    monkeypatch.setenv("PYROPE_OUTPUT_DIR", str(env_dir))
    assert dispatch(["indices"]) == 0
    assert (env_dir / "indices.csv").exists()
    assert dispatch(["indices", "--out", str(flag_dir)]) == 0
    assert (flag_dir / "indices.csv").exists()


def test_flow_outputs(tmp_path):
    """flow writes the map and a position series that parses back."""
    argv = ["flow", "--grid", "4x4", "--text", "3", "--steps", "2", "--out", str(tmp_path)]
    assert dispatch(argv) == 0
    rows = _read_rows(tmp_path / "flow_map.csv")
    assert rows[0] == "view,row,col,value"
    assert abs(sum(float(r.split(",")[3]) for r in rows[1:17]) - 1.0) <= 1e-6
    series = parse_flow_series((tmp_path / "flow_series.csv").read_text())
    assert series.positions == tuple(range(1, 17))
    assert (tmp_path / "flow_map.pgm").exists()


def test_flow_without_text_fails_cleanly(tmp_path):
    """A validation error exits 1 and writes nothing."""
    assert dispatch(["flow", "--text", "0", "--out", str(tmp_path / "out")]) == 1
    assert not (tmp_path / "out").exists()


def test_compare_same_encoding(tmp_path, capsys):
    """Comparing an encoding with itself reports zero differences."""
    argv = ["compare", "--encoding", "vanilla", "--against", "vanilla", "--steps", "2"]
    assert dispatch(argv + ["--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "max_abs_logit_diff 0.0" in out
    assert "token_agreement 1.0" in out
    assert "metric,value" in (tmp_path / "compare.csv").read_text()


def test_compare_reports_per_layer_metrics(tmp_path):
    """c2rope against vanilla reports one attention difference per layer."""
    argv = ["compare", "--layers", "3", "--against", "vanilla", "--steps", "1", "--out", str(tmp_path)]
    assert dispatch(argv) == 0
    names = [r.split(",")[0] for r in _read_rows(tmp_path / "compare.csv")[1:]]
    assert [n for n in names if n.startswith("mean_abs_attention_diff")] == [
        "mean_abs_attention_diff_layer1",
        "mean_abs_attention_diff_layer2",
        "mean_abs_attention_diff_layer3",
    ]
    assert "quartile_ratio_c2rope" in names and "quartile_ratio_vanilla" in names


def test_decay_and_spatial(tmp_path, capsys):
    """decay writes one CSV per variant; spatial flags vanilla maps."""
    argv = ["decay", "--variant", "vanilla", "c2rope", "--dim", "16", "--samples", "200"]
    assert dispatch(argv + ["--max-delta", "8", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "decay_vanilla_m.csv").exists()
    assert (tmp_path / "decay_c2rope_m.csv").exists()

    argv = ["spatial", "--variant", "vanilla", "--grid", "3x3", "--samples", "200"]
    assert dispatch(argv + ["--out", str(tmp_path)]) == 0
    assert "no_spatial_pairs" in capsys.readouterr().out
    assert len(_read_rows(tmp_path / "spatial_vanilla.csv")) == 10


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["indices", "--frobnicate"],
        ["indices", "--views", "many"],
        ["run", "--encoding", "c2rope", "--head-dim", "12"],
        ["freq", "--variant", "nope"],
        ["mask", "--kind", "sliding"],
        [],
    ],
)
def test_user_errors_exit_one(tmp_path, argv):
    """Usage and validation errors exit 1 without writing files."""
    out = tmp_path / "out"
    assert dispatch(argv + ["--out", str(out)]) == 1
    assert not out.exists()


def test_internal_error_exits_two(tmp_path, monkeypatch):
    """Unexpected exceptions map to exit 2."""

    def explode(args):
        raise RuntimeError("boom")

    monkeypatch.setattr(commands, "cmd_indices", explode)
    assert dispatch(["indices", "--out", str(tmp_path)]) == 2


def test_help_exits_zero(capsys):
    """--help prints usage and succeeds."""
    assert dispatch(["--help"]) == 0
    assert "selfcheck" in capsys.readouterr().out


@pytest.mark.slow
def test_selfcheck_passes(capsys):
    """selfcheck --quick lists every property as passing."""
    assert dispatch(["selfcheck", "--quick", "--trend-seeds", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert not [line for line in lines if line.startswith("FAIL")]
    assert sum(line.startswith("PASS") for line in lines) == 12
    assert sum(line.startswith("INFO flow_trend") for line in lines) == 2


def test_failed_write_leaves_no_outputs(tmp_path, monkeypatch):
    """If a later file cannot be moved into place, earlier outputs are removed too."""
    import os

    real_replace = os.replace
    calls = []

    def fail_second(src, dst):
        calls.append(dst)
        if len(calls) == 2:
            raise OSError("disk full")
        return real_replace(src, dst)

    monkeypatch.setattr(os, "replace", fail_second)
    out = tmp_path / "out"
    assert dispatch(["mask", "--kind", "chebyshev", "--out", str(out)]) == 2
    assert list(out.iterdir()) == []
