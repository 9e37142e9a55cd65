"""Atomic file output."""

import logging
import os
import tempfile
from pathlib import Path
from typing import List, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _stage(path: Path, data: bytes) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
    except BaseException:
        os.unlink(tmp_name)
        raise
    return tmp_name


def atomic_write_all(outputs: Sequence[Tuple[PathLike, bytes]]) -> List[Path]:
    """
    Write several files as one unit.

    Every payload is first staged in a temporary file next to its destination;
    only when all are staged are they moved into place with ``os.replace``. On
    any failure the staged files are removed together with every destination
    this call created, so a failed command leaves no new output behind.
    Destinations that already existed and were replaced before the failure
    keep their new content.
    """
    staged: List[Tuple[str, Path]] = []
    created: List[Path] = []
    try:
        for path, data in outputs:
            path = Path(path)
            staged.append((_stage(path, data), path))
        for tmp_name, path in staged:
            existed = path.exists()
            os.replace(tmp_name, path)
            if not existed:
                created.append(path)
    except BaseException:
        for tmp_name, _ in staged:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
        for path in created:
            if path.exists():
                path.unlink()
        raise
    for (_, data), (_, final) in zip(outputs, staged):
        logger.debug("wrote %s (%d bytes)", final, len(data))
    return [path for _, path in staged]


def atomic_write_bytes(path: PathLike, data: bytes) -> Path:
    """
    Write ``data`` to ``path`` through a temporary file and ``os.replace``.

    Readers never observe a partially written file; on failure the
    temporary file is removed and the destination is left untouched.
    """
    return atomic_write_all([(path, data)])[0]


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Text variant of :func:`atomic_write_bytes` (UTF-8, ``\\n`` line endings)."""
    return atomic_write_bytes(path, text.encode("utf-8"))
