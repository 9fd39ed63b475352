"""
Cancellation-formula verifier - command-line entry point
"""
import argparse
import sys
from typing import List, Optional

from app import __version__
from app.commands import tables, verify
from app.config.settings import get_settings
from app.utils.exception_handler import handle_exception
from app.utils.logger import get_logger, setup_logger

logger = get_logger("app.cli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cancel-verify",
        description="Exact verification of twisted miraculous cancellation formulas",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    verify.register(subparsers)
    tables.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
        level = getattr(args, "log_level", None) or settings.log_level
        setup_logger(level=level, log_to_file=bool(settings.log_file), log_file_path=settings.log_file)
        return args.handler(args)
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return 130
    except Exception as exc:
        return handle_exception(exc)


if __name__ == "__main__":
    sys.exit(main())
