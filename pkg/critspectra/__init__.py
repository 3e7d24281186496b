"""Spectral signatures of criticality in empirical correlation matrices."""

__version__ = "0.1.0"
