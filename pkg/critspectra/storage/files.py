"""Run output directories with atomic artifact writes and metadata sidecars."""

import hashlib
import logging
import os
import tempfile
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Any

import numpy as np

from critspectra import __version__
from critspectra.config import settings
from critspectra.storage.tables import write_table

logger = logging.getLogger(__name__)

SIDECAR_SUFFIX = ".meta"


def sha256_file(path: str | Path) -> str:
    """Hex SHA-256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


@contextmanager
def atomic_write(path: str | Path, binary: bool = False) -> Iterator[IO[Any]]:
    """Write to a temporary file next to `path` and rename it into place on success."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    mode = "wb" if binary else "w"
    encoding = None if binary else "utf-8"
    try:
        with os.fdopen(fd, mode, encoding=encoding, newline=None if binary else "") as handle:
            yield handle
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(temp_name, target)
    except BaseException:
        Path(temp_name).unlink(missing_ok=True)
        raise


def sidecar_path(path: str | Path) -> Path:
    """`<file>.meta` next to an artifact."""
    path = Path(path)
    return path.with_name(path.name + SIDECAR_SUFFIX)


def format_sidecar(fields: dict[str, Any]) -> str:
    """key=value lines in insertion order; None values are omitted."""
    return "".join(f"{key}={value}\n" for key, value in fields.items() if value is not None)


def read_sidecar(path: str | Path) -> dict[str, str]:
    """Parse the `.meta` sidecar of an artifact (or the sidecar path itself)."""
    path = Path(path)
    if path.suffix != SIDECAR_SUFFIX:
        path = sidecar_path(path)
    fields: dict[str, str] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        key, sep, value = line.partition("=")
        if sep:
            fields[key.strip()] = value.strip()
    return fields


class OutputDirectory:
    """Directory receiving the artifacts of one CLI invocation.

    Every artifact is written atomically, gets a metadata sidecar and is
    recorded with its SHA-256 for the run manifest.
    """

    def __init__(
        self,
        root: str | Path | None = None,
        *,
        subcommand: str,
        config_digest: str,
        seed: int | None = None,
    ):
        self.root = Path(root or settings.output_dir)
        self.subcommand = subcommand
        self.config_digest = config_digest
        self.seed = seed
        self.version = __version__
        self.artifacts: dict[str, str] = {}
        self._ensure_root_exists()

    def _ensure_root_exists(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)

    def base_metadata(self, model: str | None = None) -> dict[str, Any]:
        """Fields shared by every sidecar and table header of this run."""
        return {
            "subcommand": self.subcommand,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "version": self.version,
            "model": model,
        }

    def _record(self, path: Path) -> None:
        name = path.relative_to(self.root).as_posix()
        self.artifacts[name] = sha256_file(path)

    @contextmanager
    def artifact(
        self,
        name: str,
        *,
        binary: bool = False,
        model: str | None = None,
        meta: dict[str, Any] | None = None,
    ) -> Iterator[IO[Any]]:
        """Open an artifact for writing; on success write its sidecar and record both."""
        path = self.root / name
        with atomic_write(path, binary=binary) as handle:
            yield handle

        fields = self.base_metadata(model)
        fields.update(meta or {})
        side = sidecar_path(path)
        with atomic_write(side) as handle:
            handle.write(format_sidecar(fields))

        self._record(path)
        self._record(side)
        logger.info("Wrote artifact path=%s", path)

    def table(
        self,
        name: str,
        columns: Sequence[str],
        data: np.ndarray | Sequence[np.ndarray],
        *,
        model: str | None = None,
        meta: dict[str, Any] | None = None,
    ) -> Path:
        """Write a CSV table whose header repeats the sidecar fields."""
        fields = self.base_metadata(model)
        fields.update(meta or {})
        with self.artifact(name, model=model, meta=meta) as handle:
            write_table(handle, columns, data, fields)
        return self.root / name

    def path(self, name: str) -> Path:
        return self.root / name
