"""Binary and CSV persistence of time series and correlation matrices.

Time-series dump (CSTS): little-endian header ``magic, version u32, L u32,
N u32, tau u64, seed u64`` followed by the N x tau int8 spins in row-major
order. Matrix dump (CSCM): ``magic, D u32, tau u64`` followed by the packed
upper triangle as float64, row-major.
"""

import struct
from pathlib import Path
from typing import IO

import numpy as np

from critspectra.constants import (
    MATRIX_HEADER,
    MATRIX_MAGIC,
    SERIES_CSV_COLUMNS,
    TIME_SERIES_HEADER,
    TIME_SERIES_MAGIC,
    TIME_SERIES_VERSION,
)
from critspectra.errors import DomainError, PreconditionError
from critspectra.services.correlation import CorrelationMatrix
from critspectra.services.ising import TimeSeriesMatrix


def write_time_series(handle: IO[bytes], series: TimeSeriesMatrix) -> None:
    """Write a full-lattice recording in the CSTS format."""
    if not series.is_full_lattice:
        raise DomainError("only full, unpermuted lattice recordings can be dumped")
    header = struct.pack(
        TIME_SERIES_HEADER,
        TIME_SERIES_MAGIC,
        TIME_SERIES_VERSION,
        series.lattice_size,
        series.n_series,
        series.tau,
        series.seed or 0,
    )
    handle.write(header)
    handle.write(np.ascontiguousarray(series.data, dtype=np.int8).tobytes())


def read_time_series(path: str | Path) -> TimeSeriesMatrix:
    """Load a CSTS dump.

    Raises:
        PreconditionError: If the file is missing, truncated or not a CSTS dump.
    """
    try:
        raw = Path(path).read_bytes()
    except FileNotFoundError as exc:
        raise PreconditionError(f"time-series file not found: {path}") from exc

    header_size = struct.calcsize(TIME_SERIES_HEADER)
    if len(raw) < header_size:
        raise PreconditionError(f"{path} is too short for a time-series header")
    magic, version, size, count, tau, seed = struct.unpack_from(TIME_SERIES_HEADER, raw)
    if magic != TIME_SERIES_MAGIC:
        raise PreconditionError(f"{path} is not a time-series dump (magic {magic!r})")
    if version != TIME_SERIES_VERSION:
        raise PreconditionError(f"unsupported time-series dump version {version}")
    if count != size * size:
        raise PreconditionError(f"dump header has N={count} for L={size}")
    if len(raw) != header_size + count * tau:
        raise PreconditionError(f"{path} holds {len(raw) - header_size} spin bytes, expected {count * tau}")

    data = np.frombuffer(raw, dtype=np.int8, offset=header_size).reshape(count, tau).copy()
    return TimeSeriesMatrix(
        data=data,
        site_indices=np.arange(count),
        lattice_size=size,
        seed=seed,
    )


def write_series_csv(handle: IO[str], series: TimeSeriesMatrix) -> None:
    """One row per site: the site index followed by its tau recorded values."""
    handle.write(",".join(SERIES_CSV_COLUMNS) + "\n")
    rows = np.column_stack([series.site_indices, series.data.astype(np.int64)])
    np.savetxt(handle, rows, fmt="%d", delimiter=",")


def write_matrix(handle: IO[bytes], matrix: CorrelationMatrix) -> None:
    """Write a correlation matrix in the CSCM format (tau 0 when unknown)."""
    handle.write(struct.pack(MATRIX_HEADER, MATRIX_MAGIC, matrix.dim, matrix.tau or 0))
    handle.write(np.ascontiguousarray(matrix.triangle, dtype="<f8").tobytes())


def read_matrix(path: str | Path) -> CorrelationMatrix:
    """Load a CSCM dump.

    Raises:
        PreconditionError: If the file is missing or malformed.
    """
    try:
        raw = Path(path).read_bytes()
    except FileNotFoundError as exc:
        raise PreconditionError(f"matrix file not found: {path}") from exc

    header_size = struct.calcsize(MATRIX_HEADER)
    if len(raw) < header_size:
        raise PreconditionError(f"{path} is too short for a matrix header")
    magic, dim, tau = struct.unpack_from(MATRIX_HEADER, raw)
    if magic != MATRIX_MAGIC:
        raise PreconditionError(f"{path} is not a matrix dump (magic {magic!r})")
    expected = dim * (dim + 1) // 2
    if len(raw) != header_size + 8 * expected:
        raise PreconditionError(f"{path} does not hold the {expected} entries of a {dim}x{dim} triangle")

    triangle = np.frombuffer(raw, dtype="<f8", offset=header_size).astype(np.float64)
    return CorrelationMatrix(dim=dim, triangle=triangle, tau=tau or None)


def write_matrix_csv(handle: IO[str], matrix: CorrelationMatrix) -> None:
    """Upper triangle in long form: row, col, value."""
    rows, cols = np.triu_indices(matrix.dim)
    handle.write("row,col,value\n")
    for row, col, value in zip(rows, cols, matrix.triangle):
        handle.write(f"{row},{col},{value:.17g}\n")
