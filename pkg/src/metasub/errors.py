"""Shared exception types, mapped to CLI exit codes."""


class ValidationError(ValueError):
    """Malformed or inconsistent input (exit code 2)."""


class GuardError(RuntimeError):
    """A size or iteration guard was exceeded (exit code 3)."""
