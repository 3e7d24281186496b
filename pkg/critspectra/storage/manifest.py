"""Run manifests: the resolved config and a hash for every artifact."""

import logging
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from critspectra.config import digest_payload
from critspectra.errors import PreconditionError
from critspectra.models import RunManifest
from critspectra.storage.files import OutputDirectory, atomic_write, sha256_file

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def write_manifest(
    output: OutputDirectory,
    config: dict[str, Any],
    wall_clock_seconds: float,
    extra: dict[str, Any] | None = None,
) -> Path:
    """Write manifest.json listing every artifact recorded by `output`."""
    manifest = RunManifest(
        subcommand=output.subcommand,
        config_digest=output.config_digest,
        config=config,
        seed=output.seed,
        version=output.version,
        artifacts=dict(sorted(output.artifacts.items())),
        wall_clock_seconds=wall_clock_seconds,
        created_at=datetime.now(UTC),
        extra=extra or {},
    )
    path = output.path(MANIFEST_NAME)
    with atomic_write(path) as handle:
        handle.write(manifest.model_dump_json(indent=2))
    logger.info("Wrote manifest path=%s artifacts=%d", path, len(manifest.artifacts))
    return path


def read_manifest(path: str | Path) -> RunManifest:
    """Load and validate a manifest file.

    Raises:
        PreconditionError: If the file is missing or not a manifest.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise PreconditionError(f"manifest not found: {path}") from exc
    try:
        return RunManifest.model_validate_json(text)
    except ValidationError as exc:
        raise PreconditionError(f"{path} is not a valid run manifest") from exc


def verify_manifest(path: str | Path) -> list[str]:
    """Check the config digest and every artifact hash of a manifest.

    Returns:
        Human-readable problems; empty when the run verifies.
    """
    manifest = read_manifest(path)
    root = Path(path).parent
    problems = []

    if digest_payload(manifest.config) != manifest.config_digest:
        problems.append("config digest does not match the recorded config")

    for name, expected in manifest.artifacts.items():
        artifact = root / name
        if not artifact.exists():
            problems.append(f"missing artifact: {name}")
        elif sha256_file(artifact) != expected:
            problems.append(f"hash mismatch: {name}")
    return problems
