"""Helpers shared by the subcommand handlers."""

import argparse
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ValidationError

from critspectra.config import (
    digest_payload,
    parse_section,
    read_run_config,
    resolved_config,
    settings,
)
from critspectra.constants import FIT_COLUMNS
from critspectra.errors import ConfigError
from critspectra.models import PowerLawFit, SimConfig, parse_fraction
from critspectra.storage import OutputDirectory, write_manifest

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    """Output directory, resolved config and timer of one invocation."""

    output: OutputDirectory
    config: dict[str, Any]
    started: float = field(default_factory=time.perf_counter)

    @classmethod
    def open(
        cls,
        args: argparse.Namespace,
        subcommand: str,
        seed: int | None,
        **sections: BaseModel | dict[str, Any],
    ) -> "RunContext":
        config = resolved_config(**sections)
        output = OutputDirectory(
            args.output,
            subcommand=subcommand,
            config_digest=digest_payload(config),
            seed=seed,
        )
        logger.info(
            "Starting %s config_digest=%s output=%s",
            subcommand,
            output.config_digest[:12],
            output.root,
        )
        return cls(output=output, config=config)

    def elapsed(self) -> float:
        return time.perf_counter() - self.started

    def finish(self, extra: dict[str, Any] | None = None) -> Path:
        """Write the manifest; call after every artifact is out."""
        return write_manifest(self.output, self.config, self.elapsed(), extra)


def load_simulation(
    path: str | Path,
    defaults: dict[str, Any] | None = None,
) -> tuple[dict[str, dict[str, str]], SimConfig]:
    """Read a run config and validate its [simulation] section."""
    sections = read_run_config(path)
    merged = {"equilibration_steps": settings.equilibration_steps}
    merged.update(defaults or {})
    return sections, parse_section(sections, "simulation", SimConfig, defaults=merged)


def validate_option(model: type[BaseModel], option: str, **values: Any) -> Any:
    """Build a model from CLI options, reporting failures as ConfigError."""
    try:
        return model(**values)
    except ValidationError as exc:
        raise ConfigError(exc.errors()[0]["msg"], field=option) from exc


def resolve_count(text: str, total: int, option: str) -> int:
    """`N/4`, `0.25` (fractions of total) or `256` (absolute count)."""
    cleaned = text.strip()
    try:
        if cleaned.isdigit():
            return int(cleaned)
        return max(1, round(parse_fraction(cleaned) * total))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot read '{text}' as a count or fraction", field=option) from exc


def output_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--output",
        "-o",
        default=None,
        help=f"output directory (default: {settings.output_dir})",
    )


def write_fit(
    output: OutputDirectory,
    fit: PowerLawFit,
    model: str,
    meta: dict[str, Any] | None = None,
) -> None:
    """One-row fit.csv."""
    row = np.array([[fit.zeta, fit.log_prefactor, fit.n_min, fit.n_max, fit.rmse, fit.point_count]])
    output.table("fit.csv", FIT_COLUMNS, row, model=model, meta=meta)
