"""Error types; the CLI maps each to an exit code."""


class DisambigError(Exception):
    exit_code = 2


class DataError(DisambigError, ValueError):
    """Malformed or inconsistent input data."""

    exit_code = 2


class ModelError(DisambigError):
    """Model file unreadable, corrupt, or incompatible with this feature layout."""

    exit_code = 3
