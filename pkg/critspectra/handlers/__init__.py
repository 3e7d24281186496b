"""Subcommand handlers."""

from critspectra.handlers import (
    emerging_scan,
    oracle,
    rmt_baseline,
    simulate,
    spectrum,
    study,
    verify_manifest,
)
from critspectra.handlers.emerging_scan import emerging_scan_command
from critspectra.handlers.oracle import oracle_command
from critspectra.handlers.rmt_baseline import rmt_baseline_command
from critspectra.handlers.simulate import simulate_command
from critspectra.handlers.spectrum import spectrum_command
from critspectra.handlers.study import study_command
from critspectra.handlers.verify_manifest import verify_manifest_command

SUBCOMMANDS = (simulate, spectrum, rmt_baseline, oracle, study, emerging_scan, verify_manifest)

__all__ = [
    "SUBCOMMANDS",
    "emerging_scan_command",
    "oracle_command",
    "rmt_baseline_command",
    "simulate_command",
    "spectrum_command",
    "study_command",
    "verify_manifest_command",
]
