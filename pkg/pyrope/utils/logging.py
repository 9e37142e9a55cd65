"""Logging setup for pyrope runs: one stderr handler tagged with command and seed."""

import logging
import sys
from typing import Optional

DEFAULT_FORMAT = "%(asctime)s %(levelname)s %(name)s [%(command)s seed=%(seed)s] %(message)s"


class RunContextFilter(logging.Filter):
    """Stamp every record with the running subcommand and its root seed."""

    def __init__(self, command: str = "-", seed: Optional[int] = None):
        super().__init__()
        self.command = command
        self.seed = "-" if seed is None else str(seed)

    def filter(self, record: logging.LogRecord) -> bool:
        record.command = self.command
        record.seed = self.seed
        return True


def setup_logging(
    level: str = "WARNING",
    command: str = "-",
    seed: Optional[int] = None,
    format_string: Optional[str] = None,
) -> logging.Logger:
    """
    Configure the ``pyrope`` logger for one run.

    Records go to stderr so that stdout stays free for command output. Calling
    again replaces the run context instead of stacking handlers.

    Args:
        level: DEBUG, INFO, WARNING or ERROR; unknown names fall back to WARNING
        command: Subcommand name shown in every record
        seed: Root seed shown in every record
        format_string: Overrides :data:`DEFAULT_FORMAT`

    Returns:
        The configured ``pyrope`` logger
    """
    logger = logging.getLogger("pyrope")
    context = RunContextFilter(command, seed)

    handler = next((h for h in logger.handlers if getattr(h, "_pyrope", False)), None)
    if handler is None:
        handler = logging.StreamHandler(sys.stderr)
        handler._pyrope = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
    # sys.stderr may have been swapped since the handler was made
    handler.stream = sys.stderr
    for old in list(handler.filters):
        if isinstance(old, RunContextFilter):
            handler.removeFilter(old)
    handler.addFilter(context)
    handler.setFormatter(logging.Formatter(format_string or DEFAULT_FORMAT))

    logger.setLevel(getattr(logging, level.upper(), logging.WARNING))
    return logger
