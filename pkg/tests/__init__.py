"""Tests for pyirs-robust."""
