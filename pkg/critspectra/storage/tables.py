"""CSV tables with a `# key=value` comment header and a fixed column row."""

from collections.abc import Sequence
from pathlib import Path
from typing import IO, Any

import numpy as np

from critspectra.errors import PreconditionError


def write_table(
    handle: IO[str],
    columns: Sequence[str],
    data: np.ndarray | Sequence[np.ndarray],
    metadata: dict[str, Any] | None = None,
) -> None:
    """Write rows (or a sequence of equal-length columns) under a metadata header."""
    for key, value in (metadata or {}).items():
        if value is not None:
            handle.write(f"# {key}={value}\n")

    if isinstance(data, np.ndarray) and data.ndim == 2:
        rows = data
    else:
        rows = np.column_stack([np.asarray(column, dtype=np.float64) for column in data])
    if rows.shape[1] != len(columns):
        raise ValueError(f"{len(columns)} columns declared, {rows.shape[1]} given")

    np.savetxt(
        handle,
        rows.reshape(-1, len(columns)),
        fmt="%.17g",
        delimiter=",",
        header=",".join(columns),
        comments="",
    )


def read_table(path: str | Path) -> tuple[dict[str, str], tuple[str, ...], np.ndarray]:
    """Read back (metadata, column names, rows) from a table written by `write_table`."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except FileNotFoundError as exc:
        raise PreconditionError(f"table not found: {path}") from exc

    metadata: dict[str, str] = {}
    position = 0
    while position < len(lines) and lines[position].startswith("#"):
        key, _, value = lines[position][1:].strip().partition("=")
        metadata[key] = value
        position += 1
    if position == len(lines):
        raise PreconditionError(f"{path} has no column row")

    columns = tuple(lines[position].split(","))
    body = [line for line in lines[position + 1 :] if line.strip()]
    if not body:
        return metadata, columns, np.empty((0, len(columns)))
    rows = np.loadtxt(body, delimiter=",", ndmin=2)
    return metadata, columns, rows
