"""Artifact persistence for critspectra runs."""

from critspectra.storage.dumps import (
    read_matrix,
    read_time_series,
    write_matrix,
    write_matrix_csv,
    write_series_csv,
    write_time_series,
)
from critspectra.storage.files import (
    OutputDirectory,
    atomic_write,
    read_sidecar,
    sha256_file,
    sidecar_path,
)
from critspectra.storage.manifest import (
    MANIFEST_NAME,
    read_manifest,
    verify_manifest,
    write_manifest,
)
from critspectra.storage.tables import read_table, write_table

__all__ = [
    "MANIFEST_NAME",
    "OutputDirectory",
    "atomic_write",
    "read_manifest",
    "read_matrix",
    "read_sidecar",
    "read_table",
    "read_time_series",
    "sha256_file",
    "sidecar_path",
    "verify_manifest",
    "write_manifest",
    "write_matrix",
    "write_matrix_csv",
    "write_series_csv",
    "write_table",
    "write_time_series",
]
