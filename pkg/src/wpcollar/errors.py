"""Shared exception types.

Kept in one place so the CLI can map them onto exit codes without
importing half the package.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid user-facing configuration (flags, config file, ranges)."""


class SolverError(RuntimeError):
    """A numerical routine failed to converge or produced an invalid state."""


class ReportParseError(ValueError):
    """A sweep output file could not be parsed back."""
