"""
Exception handlers for standardized error output.

Each handler logs the failure, prints an ``ErrorResponse`` as JSON to stderr
and returns the process exit code.
"""
import sys
from typing import Callable, Dict, Type

from pydantic import ValidationError

from app.models.base import ErrorResponse
from app.utils.exceptions import AlgebraError, ConfigError, GoldenFileError
from app.utils.logger import get_logger

logger = get_logger(__name__)

EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_ALGEBRA = 3
EXIT_IO = 4


def _emit(error_response: ErrorResponse) -> int:
    print(error_response.model_dump_json(), file=sys.stderr)
    return error_response.exit_code


def config_exception_handler(exc: Exception) -> int:
    """Handle rejected configuration or an unusable golden directory."""
    logger.error(f"Configuration error: {exc}")
    return _emit(ErrorResponse(
        message="Configuration rejected",
        error=str(exc),
        error_code=ConfigError.error_code,
        exit_code=EXIT_CONFIG,
    ))


def algebra_exception_handler(exc: AlgebraError) -> int:
    """Handle a ring or series operation called outside its preconditions."""
    logger.error(f"Algebra error: {exc}")
    return _emit(ErrorResponse(
        message="Computation could not be carried out",
        error=str(exc),
        error_code=AlgebraError.error_code,
        exit_code=EXIT_ALGEBRA,
    ))


def io_exception_handler(exc: Exception) -> int:
    """Handle unreadable or unwritable files, including malformed golden files."""
    logger.error(f"I/O error: {exc}")
    context = {"path": str(exc.filename)} if isinstance(exc, OSError) and exc.filename else {}
    return _emit(ErrorResponse(
        message="File access failed",
        error=str(exc),
        error_code="IO_ERROR",
        exit_code=EXIT_IO,
        context=context,
    ))


def general_exception_handler(exc: Exception) -> int:
    """Handle anything else."""
    logger.error(f"Unhandled exception: {exc}", exc_info=True)
    return _emit(ErrorResponse(
        message="Internal error",
        error=f"{type(exc).__name__}: {exc}",
        error_code="INTERNAL_ERROR",
        exit_code=EXIT_INTERNAL,
    ))


# Most specific first
HANDLERS: Dict[Type[BaseException], Callable[[Exception], int]] = {
    ConfigError: config_exception_handler,
    ValidationError: config_exception_handler,
    AlgebraError: algebra_exception_handler,
    GoldenFileError: io_exception_handler,
    OSError: io_exception_handler,
}


def handle_exception(exc: Exception) -> int:
    """Dispatch to the matching handler and return its exit code."""
    for exc_type, handler in HANDLERS.items():
        if isinstance(exc, exc_type):
            return handler(exc)
    return general_exception_handler(exc)
