"""Command-line entry point: argument parsing, config resolution and exit codes."""

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

from pyrope.core.config import ENV_LOG_LEVEL, RunConfig
from pyrope.core.exceptions import ConfigurationError, RopeError
from pyrope.utils.logging import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_INTERNAL_ERROR = 2

# flag attribute -> RunConfig key
_CONFIG_FLAGS = {
    "encoding": "encoding",
    "mask": "mask",
    "grid": "grid",
    "views": "views",
    "text": "text",
    "layers": "layers",
    "heads": "heads",
    "head_dim": "head_dim",
    "vocab": "vocab",
    "seed": "seed",
    "out": "output_dir",
    "steps": "steps",
    "samples": "samples",
    "max_delta": "max_delta",
    "normalization": "normalization",
    "rope_base": "rope_base",
    "embeddings": "embeddings",
}


class UsageError(ConfigurationError):
    """Malformed command line."""

    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge configuration sources: defaults < ``--config`` file < environment < flags.

    Raises:
        ConfigurationError: If any source holds an invalid value or the merged
            configuration is inconsistent
    """
    merged: Dict[str, Any] = {}
    if getattr(args, "config", None):
        merged.update(RunConfig.read_file(args.config))
    merged.update(RunConfig.read_env())
    for attr, key in _CONFIG_FLAGS.items():
        value = getattr(args, attr, None)
        if value is not None:
            merged[key] = value
    return RunConfig.from_dict(merged)


def _common_options() -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    parent.add_argument("--config", help="key=value, JSON or YAML run configuration")
    parent.add_argument("--seed", type=int, help="root seed for every random stream")
    parent.add_argument("--out", help="output directory (overrides PYROPE_OUTPUT_DIR)")
    parent.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return parent


def _layout_options() -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    parent.add_argument("--grid", help="per-view token grid, e.g. 4x4")
    parent.add_argument("--views", type=int)
    parent.add_argument("--text", type=int, help="number of text tokens")
    return parent


def _model_options() -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    parent.add_argument("--encoding", help="vanilla, c2rope, mrope_like, videorope_like or nope")
    parent.add_argument("--mask", help="causal or chebyshev")
    parent.add_argument("--layers", type=int)
    parent.add_argument("--heads", type=int)
    parent.add_argument("--head-dim", dest="head_dim", type=int)
    parent.add_argument("--vocab", type=int)
    parent.add_argument("--rope-base", dest="rope_base", type=float)
    parent.add_argument("--embeddings", help="CSV of image embeddings, one row per image token")
    parent.add_argument("--steps", type=int, help="greedy generation steps")
    return parent


def _monte_carlo_options() -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    parent.add_argument("--samples", type=int)
    parent.add_argument("--alignment", type=float, default=1.0, help="query/key correlation")
    parent.add_argument("--shards", type=int, default=4)
    return parent


def build_parser() -> argparse.ArgumentParser:
    from pyrope.cli import commands
    from pyrope.cli.selfcheck import cmd_selfcheck

    common = _common_options()
    layout = _layout_options()
    model = _model_options()
    monte_carlo = _monte_carlo_options()

    parser = _Parser(prog="pyrope", description="Triplet rotary encodings in a toy multimodal decoder")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_indices = sub.add_parser("indices", parents=[common, layout], help="dump positional indices")
    p_indices.add_argument("--scheme", choices=("triplet", "raster"), default="triplet")
    p_indices.set_defaults(func=commands.cmd_indices)

    p_freq = sub.add_parser("freq", parents=[common], help="dump a frequency allocation")
    p_freq.add_argument("--variant", dest="encoding")
    p_freq.add_argument("--dim", dest="head_dim", type=int)
    p_freq.add_argument("--base", dest="rope_base", type=float)
    p_freq.set_defaults(func=commands.cmd_freq)

    p_mask = sub.add_parser("mask", parents=[common, layout], help="dump an attention mask")
    p_mask.add_argument("--kind", dest="mask")
    p_mask.set_defaults(func=commands.cmd_mask)

    p_decay = sub.add_parser("decay", parents=[common, monte_carlo], help="long-term decay curves")
    p_decay.add_argument("--variant", dest="variants", nargs="+", default=None)
    p_decay.add_argument("--dim", dest="head_dim", type=int)
    p_decay.add_argument("--max-delta", dest="max_delta", type=int)
    p_decay.add_argument("--component", choices=("m", "x", "y"), default="m")
    p_decay.add_argument("--log-x", action="store_true", help="logarithmic offset axis in the chart")
    p_decay.set_defaults(func=commands.cmd_decay)

    p_spatial = sub.add_parser(
        "spatial", parents=[common, layout, monte_carlo], help="spatial decay map"
    )
    p_spatial.add_argument("--variant", dest="encoding")
    p_spatial.add_argument("--dim", dest="head_dim", type=int)
    p_spatial.set_defaults(func=commands.cmd_spatial)

    p_run = sub.add_parser("run", parents=[common, layout, model], help="forward pass and generation")
    p_run.add_argument("--dump-trace", dest="dump_trace", help="directory for per-layer/head traces")
    p_run.set_defaults(func=commands.cmd_run)

    p_flow = sub.add_parser("flow", parents=[common, layout, model], help="information-flow maps")
    p_flow.add_argument("--normalization", choices=("sum1", "none"))
    p_flow.set_defaults(func=commands.cmd_flow)

    p_compare = sub.add_parser(
        "compare", parents=[common, layout, model], help="compare two encodings on identical inputs"
    )
    p_compare.add_argument("--against", default="vanilla", help="second encoding")
    p_compare.set_defaults(func=commands.cmd_compare)

    p_selfcheck = sub.add_parser("selfcheck", parents=[common], help="run the invariant suite")
    p_selfcheck.add_argument(
        "--trend-seeds", dest="trend_seeds", type=int, default=20, help="seeds for the flow trend"
    )
    p_selfcheck.add_argument(
        "--quick", action="store_true", help="reduced case counts for a fast smoke run"
    )
    p_selfcheck.set_defaults(func=cmd_selfcheck)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv``, run one subcommand and map the outcome to an exit status.

    Returns:
        0 on success, 1 for usage or validation errors, 2 for internal errors
    """
    parser = build_parser()
    arguments: List[str] = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(arguments)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USER_ERROR
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    setup_logging(
        args.log_level or os.getenv(ENV_LOG_LEVEL) or "WARNING",
        command=args.command,
        seed=getattr(args, "seed", None),
    )
    try:
        return int(args.func(args) or EXIT_OK)
    except RopeError as e:
        logger.debug("validation failure", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USER_ERROR
    except Exception as e:
        logger.debug("internal failure", exc_info=True)
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL_ERROR


def main() -> int:
    return dispatch()


if __name__ == "__main__":
    raise SystemExit(main())
