"""Command-line interface."""

from pyrope.cli.main import build_parser, dispatch, main, resolve_config

__all__ = ["build_parser", "dispatch", "main", "resolve_config"]
