"""
``tables`` subcommand: write the b_r coefficient table and the C_r quotients.
"""
import argparse

from app.config.settings import get_settings
from app.models.config import build_config
from app.utils.logger import get_logger, set_global_level
from app.utils.service_manager import get_golden_service

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("tables", help="Write b_r coefficient tables and C_r quotients")
    parser.add_argument("--k", type=int, help="dim M = 8k+4 or 8k")
    parser.add_argument("--family", help="Dimension family: 8k4 (or 8k+4) or 8k")
    parser.add_argument("--out", dest="out_dir", default="tables", help="Output directory")
    parser.add_argument("--log-level", dest="log_level", help="Logging level")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = build_config(get_settings(), {"k": args.k, "family": args.family, "log_level": args.log_level})
    set_global_level(config.log_level)
    written = get_golden_service().emit_tables(config.k, config.family, args.out_dir)
    for path in written:
        logger.info(f"Wrote {path}")
    return 0
