"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, StateError -> 3,
SnapshotError and OSError -> 4.
"""


class OblabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(OblabError):
    """Invalid grid, parameter, or configuration input."""


class StateError(OblabError):
    """A simulation state violates its invariants, or a monitor aborted."""


class SnapshotError(OblabError):
    """A snapshot file is malformed (bad magic, version, length, checksum)."""
