"""Toolkit settings from the environment and sectioned run-config files."""

import configparser
import hashlib
import json
from pathlib import Path
from typing import Any, Self, TypeVar

from pydantic import BaseModel, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from critspectra.errors import ConfigError

ModelT = TypeVar("ModelT", bound=BaseModel)


class Settings(BaseSettings):
    """Process-wide settings loaded from CRITSPECTRA_* variables or .env."""

    # Scheduling
    jobs: int = 1

    # Logging and output
    log_level: str = "INFO"
    output_dir: str = "runs"

    # Simulation
    equilibration_steps: int = 10_000
    max_series_bytes: int = 4 * 1024**3

    # Spectral analysis
    emerging_replicas: int = 20
    gram_ratio: float = 0.5
    high_temperature_beta2j: float | None = 0.01

    model_config = SettingsConfigDict(env_prefix="CRITSPECTRA_", env_file=".env", extra="ignore")

    @field_validator("high_temperature_beta2j", mode="before")
    @classmethod
    def blank_threshold_is_unset(cls, value: object) -> object:
        """Treat a blank threshold as 'never switch to MP unfolding'."""
        if isinstance(value, str) and value.strip() == "":
            return None
        return value

    @model_validator(mode="after")
    def positive_limits(self) -> Self:
        """Reject settings that would make every run fail."""
        if self.jobs < 1:
            raise ValueError("CRITSPECTRA_JOBS must be at least 1")
        if self.max_series_bytes < 1:
            raise ValueError("CRITSPECTRA_MAX_SERIES_BYTES must be positive")
        if not 0 < self.gram_ratio <= 1:
            raise ValueError("CRITSPECTRA_GRAM_RATIO must lie in (0, 1]")
        return self


def read_run_config(path: str | Path) -> dict[str, dict[str, str]]:
    """Read a sectioned key=value file into raw string sections.

    Raises:
        ConfigError: If the file is missing or not valid key=value syntax.
    """
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"),
        interpolation=None,
    )
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("expected a [section] header", line=exc.lineno) from exc
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(
            "duplicate key", field=exc.option, section=exc.section, line=exc.lineno
        ) from exc
    except configparser.DuplicateSectionError as exc:
        raise ConfigError("duplicate section", section=exc.section, line=exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("expected 'key = value'", line=line) from exc

    return {section: dict(parser.items(section)) for section in parser.sections()}


def parse_section(
    sections: dict[str, dict[str, str]],
    name: str,
    model: type[ModelT],
    *,
    defaults: dict[str, Any] | None = None,
) -> ModelT:
    """Validate one raw section against a pydantic model.

    Raises:
        ConfigError: Naming the first offending field when validation fails.
    """
    if name not in sections:
        raise ConfigError("missing section", section=name)

    values: dict[str, Any] = dict(defaults or {})
    values.update(sections[name])
    try:
        return model.model_validate(values)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = ".".join(str(part) for part in error["loc"]) or None
        if error["type"] == "missing":
            raise ConfigError("missing required field", field=field, section=name) from exc
        if error["type"] == "extra_forbidden":
            raise ConfigError("unknown field", field=field, section=name) from exc
        raise ConfigError(error["msg"], field=field, section=name) from exc


def resolved_config(**sections: BaseModel | dict[str, Any]) -> dict[str, Any]:
    """JSON-ready view of the resolved configuration, one entry per section."""
    return {
        name: section.model_dump(mode="json") if isinstance(section, BaseModel) else section
        for name, section in sections.items()
    }


def digest_payload(payload: Any) -> str:
    """SHA-256 over canonical JSON."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# Global settings instance
settings = Settings()
