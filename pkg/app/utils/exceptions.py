"""
Exception hierarchy for the verification toolkit.

Failed identities are never raised: they are recorded as failing checks.
Exceptions signal that a computation could not be carried out at all.
"""


class VerificationError(Exception):
    """Base class for every error raised by the toolkit."""

    error_code = "INTERNAL_ERROR"


class AlgebraError(VerificationError):
    """A ring or series operation was called outside its preconditions."""

    error_code = "ALGEBRA_ERROR"


class ConfigError(VerificationError):
    """Malformed configuration or unusable golden directory."""

    error_code = "CONFIG_ERROR"


class GoldenFileError(VerificationError):
    """A golden file could not be parsed."""

    error_code = "GOLDEN_FILE_ERROR"


class NumericDomainError(VerificationError, ValueError):
    """A numeric evaluation was requested outside its domain (e.g. Im(tau) <= 0)."""

    error_code = "NUMERIC_DOMAIN_ERROR"
