"""
Logging for the verifier.

Handlers live on the ``app`` package logger only; module loggers propagate
to it. ``get_logger`` hands out adapters that append key=value context to
every message, so suite and check identifiers stay greppable in log files.
"""
import logging
import sys
from typing import Any, Dict, MutableMapping, Optional, Tuple, Union
from colorama import Fore, Style, init

# Initialize colorama for cross-platform colored output
init(autoreset=True)

ROOT_LOGGER = "app"
TOOL_PREFIX = "cancel-verify"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class ColoredFormatter(logging.Formatter):
    """Formatter with colored level names and a bracketed tool prefix."""

    COLORS = {
        'DEBUG': Fore.CYAN,
        'INFO': Fore.GREEN,
        'WARNING': Fore.YELLOW,
        'ERROR': Fore.RED,
        'CRITICAL': Fore.MAGENTA + Style.BRIGHT
    }

    def __init__(self) -> None:
        super().__init__(
            fmt=f"%(asctime)s {Fore.BLUE}[{TOOL_PREFIX}]{Style.RESET_ALL} %(levelname)s %(name)s: %(message)s",
            datefmt=DATE_FORMAT,
        )

    def format(self, record: logging.LogRecord) -> str:
        # copy, the file handler formats the same record without colors
        record = logging.makeLogRecord(record.__dict__)
        color = self.COLORS.get(record.levelname, '')
        record.levelname = f"{color}{record.levelname}{Style.RESET_ALL}"
        return super().format(record)


class ContextLogger(logging.LoggerAdapter):
    """Adapter that renders bound and per-call ``context`` as key=value pairs."""

    def process(self, msg: Any, kwargs: MutableMapping[str, Any]) -> Tuple[Any, MutableMapping[str, Any]]:
        context: Dict[str, Any] = dict(self.extra or {})
        context.update(kwargs.pop("context", None) or {})
        if context:
            msg = f"{msg} " + " ".join(f"{key}={value}" for key, value in context.items())
        return msg, kwargs

    def bind(self, **context: Any) -> "ContextLogger":
        return ContextLogger(self.logger, {**(self.extra or {}), **context})


def _resolve_level(level: Union[int, str]) -> int:
    if isinstance(level, int):
        return level
    resolved = logging.getLevelName(str(level).upper())
    return resolved if isinstance(resolved, int) else logging.INFO


def setup_logger(
    level: Union[int, str] = logging.INFO,
    log_to_file: bool = False,
    log_file_path: Optional[str] = None
) -> ContextLogger:
    """
    Attach the console handler (and optionally a file handler) to the package logger.

    Args:
        level: Logging level, numeric or by name
        log_to_file: Whether to also log to file
        log_file_path: Path to log file if log_to_file is True

    Returns:
        Adapter on the package logger
    """
    root = logging.getLogger(ROOT_LOGGER)

    if not root.handlers:
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setFormatter(ColoredFormatter())
        root.addHandler(console_handler)
        root.propagate = False

    has_file = any(isinstance(handler, logging.FileHandler) for handler in root.handlers)
    if log_to_file and log_file_path and not has_file:
        file_handler = logging.FileHandler(log_file_path, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(
            fmt=f"%(asctime)s [{TOOL_PREFIX}] %(levelname)s %(name)s: %(message)s",
            datefmt=DATE_FORMAT,
        ))
        root.addHandler(file_handler)

    set_global_level(level)
    return ContextLogger(root, {})


def get_logger(name: str, **context: Any) -> ContextLogger:
    """Module logger; ``context`` is appended to every message it emits."""
    return ContextLogger(logging.getLogger(name), context)


def set_global_level(level: Union[int, str]) -> None:
    numeric_level = _resolve_level(level)
    root = logging.getLogger(ROOT_LOGGER)
    root.setLevel(numeric_level)
    for handler in root.handlers:
        handler.setLevel(numeric_level)
