"""Pydantic models for run parameters and analysis records."""

import math
import re
from datetime import datetime
from fractions import Fraction
from typing import Any, Literal, Self

from pydantic import (
    AliasChoices,
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
    model_validator,
)

from critspectra.constants import CRITICAL_BETA2J, DEFAULT_TAU_FRACTIONS, FLIPS_PER_SITE

_CRITICAL_OFFSET = re.compile(r"^critical\s*(?:([+-])\s*([0-9.eE+-]+))?$")


def parse_beta2j(value: object) -> object:
    """Resolve `critical`, `critical+0.01` and plain numbers to a 2J/T value."""
    if not isinstance(value, str):
        return value
    text = value.strip().lower()
    match = _CRITICAL_OFFSET.match(text)
    if match is None:
        return text
    sign, offset = match.groups()
    if sign is None:
        return CRITICAL_BETA2J
    delta = float(offset)
    return CRITICAL_BETA2J + delta if sign == "+" else CRITICAL_BETA2J - delta


def parse_fraction(value: object) -> float:
    """Parse `1/4`, `0.25` or `3N/4` style fractions of a dimension."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().upper().replace("N", "")
    if text.startswith("/"):
        text = f"1{text}"
    return float(Fraction(text or "1"))


def _split_list(value: object) -> object:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class SimConfig(BaseModel):
    """Parameters of one Metropolis run."""

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    lattice_size: int = Field(ge=2, validation_alias=AliasChoices("lattice_size", "l", "L"))
    coupling: float = Field(default=1.0, gt=0, validation_alias=AliasChoices("coupling", "j", "J"))
    beta2j: float = Field(ge=0)
    seed: int = Field(ge=0, lt=2**64)
    equilibration_steps: int = Field(default=10_000, ge=0)
    tau: int = Field(ge=1)
    flips_per_step: int | None = Field(default=None, ge=1)

    @field_validator("beta2j", mode="before")
    @classmethod
    def resolve_critical_keyword(cls, value: object) -> object:
        """Accept `critical` and `critical±delta` in place of a number."""
        return parse_beta2j(value)

    @field_validator("flips_per_step", mode="before")
    @classmethod
    def blank_flips_is_default(cls, value: object) -> object:
        """Treat a blank flips_per_step as the 10 L^2 default."""
        if isinstance(value, str) and value.strip() == "":
            return None
        return value

    @property
    def flips(self) -> int:
        """Flips constituting one time step."""
        if self.flips_per_step is not None:
            return self.flips_per_step
        return FLIPS_PER_SITE * self.lattice_size**2

    @property
    def temperature(self) -> float:
        """Temperature 2J/beta2j in the coupling's energy units (inf at beta2j = 0)."""
        if self.beta2j == 0:
            return math.inf
        return 2.0 * self.coupling / self.beta2j

    @property
    def site_count(self) -> int:
        return self.lattice_size**2


class SubsampleSpec(BaseModel):
    """Random selection of k sites out of N, by fraction or explicit count."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    fraction: float | None = Field(default=None, gt=0, le=1)
    count: int | None = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def exactly_one_size(self) -> Self:
        """Require either a fraction or a count, not both."""
        if (self.fraction is None) == (self.count is None):
            raise ValueError("give exactly one of fraction or count")
        return self

    def resolve_count(self, total: int) -> int:
        """Number of rows to keep out of `total`."""
        if self.count is not None:
            return self.count
        return max(1, round(self.fraction * total))


class PowerMapParams(BaseModel):
    """Exponent of the entrywise power map sgn(C)|C|^q."""

    model_config = ConfigDict(frozen=True)

    q: float


class MPParams(BaseModel):
    """Marchenko-Pastur law parameters: kappa = D/tau and variance scale."""

    model_config = ConfigDict(frozen=True)

    kappa: float = Field(gt=0)
    scale: float = Field(default=1.0, gt=0)

    @property
    def lambda_minus(self) -> float:
        return self.scale * (1.0 - math.sqrt(self.kappa)) ** 2

    @property
    def lambda_plus(self) -> float:
        return self.scale * (1.0 + math.sqrt(self.kappa)) ** 2

    @property
    def point_mass(self) -> float:
        """Weight of the delta peak at zero (nonzero only for kappa > 1)."""
        return max(0.0, 1.0 - 1.0 / self.kappa)


class CirculantSpec(BaseModel):
    """Power-law decaying circulant correlation on the d-dimensional torus."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    dimension: Literal[1, 2]
    size: int = Field(ge=4)
    theta: float = Field(gt=0)
    prefactor: float = 1.0
    zero_value: float = 1.0

    @property
    def site_count(self) -> int:
        return self.size**self.dimension


class PowerLawFit(BaseModel):
    """Result of an OLS fit of ln(lambda_n) against ln(n)."""

    model_config = ConfigDict(frozen=True)

    zeta: float
    log_prefactor: float
    n_min: int = Field(ge=1)
    n_max: int
    rmse: float = Field(ge=0)
    point_count: int = Field(ge=5)
    excluded_count: int = 0

    @property
    def window(self) -> tuple[int, int]:
        return (self.n_min, self.n_max)


class SizeExponent(BaseModel):
    """Exponent statistics for one lattice size of a size study."""

    lattice_size: int
    zeta: float
    stderr: float
    n_min: int
    n_max: int
    rmse: float
    seeds: list[int]
    fits: list[PowerLawFit]


class StudyConfig(BaseModel):
    """The `[study]` section: exponent-vs-size sweep."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    sizes: list[int] = Field(min_length=2)
    runs_per_size: int = Field(default=5, ge=1)
    tau_multiple: float | None = Field(default=None, gt=0)  # tau = tau_multiple * N per size
    window_min: int | None = Field(default=None, ge=1)
    window_max: int | None = Field(default=None, ge=1)
    subsample_fraction: float | None = Field(default=None, gt=0, le=1)

    @field_validator("sizes", mode="before")
    @classmethod
    def split_sizes(cls, value: object) -> object:
        return _split_list(value)

    @model_validator(mode="after")
    def window_is_ordered(self) -> Self:
        """Reject half-specified or inverted fit windows."""
        if (self.window_min is None) != (self.window_max is None):
            raise ValueError("window_min and window_max must be given together")
        if self.window_min is not None and self.window_min >= self.window_max:
            raise ValueError("window_min must be smaller than window_max")
        return self

    @property
    def window(self) -> tuple[int, int] | None:
        if self.window_min is None:
            return None
        return (self.window_min, self.window_max)


class EmergingScanConfig(BaseModel):
    """The `[emerging]` section: emerging-spectrum densities across temperatures."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    beta2j: list[float] = Field(min_length=1)
    tau_fractions: list[float] = Field(
        default_factory=lambda: [parse_fraction(item) for item in DEFAULT_TAU_FRACTIONS]
    )
    q: float = Field(default=1.001, gt=0)
    replicas: int = Field(default=20, ge=1)
    bins: int | None = Field(default=None, ge=1)

    @field_validator("beta2j", mode="before")
    @classmethod
    def split_temperatures(cls, value: object) -> object:
        items = _split_list(value)
        if isinstance(items, list):
            return [parse_beta2j(item) for item in items]
        return items

    @field_validator("tau_fractions", mode="before")
    @classmethod
    def split_fractions(cls, value: object) -> object:
        items = _split_list(value)
        if isinstance(items, list):
            return [parse_fraction(item) for item in items]
        return items

    @field_validator("tau_fractions")
    @classmethod
    def fractions_below_one(cls, value: list[float]) -> list[float]:
        """Emerging spectra need tau < D."""
        for fraction in value:
            if not 0 < fraction < 1:
                raise ValueError(f"tau fraction {fraction} must lie in (0, 1)")
        return value


class RunManifest(BaseModel):
    """Everything needed to reproduce the artifacts of one CLI invocation."""

    subcommand: str
    config_digest: str
    config: dict[str, Any]
    seed: int | None = None
    version: str
    artifacts: dict[str, str] = Field(default_factory=dict)  # path -> sha256
    wall_clock_seconds: float = 0.0
    created_at: datetime
    extra: dict[str, Any] = Field(default_factory=dict)
