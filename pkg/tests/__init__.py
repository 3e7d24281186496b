"""Tests for critspectra."""
