"""
``verify`` subcommand: run the verification suites and write the JSON report.
"""
import argparse
from typing import Any, Dict

from app.config.settings import ALL_SUITES, get_settings
from app.models.config import build_config
from app.utils.logger import get_logger, set_global_level
from app.utils.service_manager import get_verification_service

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", help="Run verification suites and write a JSON report")
    parser.add_argument("--suite", dest="suites", action="append", choices=ALL_SUITES,
                        help="Suite to run (repeatable); all suites when omitted")
    parser.add_argument("--k", type=int, help="dim M = 8k+4 or 8k")
    parser.add_argument("--family", help="Dimension family: 8k4 (or 8k+4) or 8k")
    parser.add_argument("--l", type=int, help="Half rank of the auxiliary bundle V")
    parser.add_argument("--q-order", dest="q_order", type=int, help="Retained order in units of q^(1/2)")
    parser.add_argument("--taylor-order", dest="taylor_order", type=int, help="Taylor bound of the form ring")
    parser.add_argument("--tol", dest="tolerance", type=float, help="Relative tolerance of numeric checks")
    parser.add_argument("--tau", dest="tau_samples", nargs="+", metavar="A+Bi",
                        help="Sample points in the upper half plane")
    parser.add_argument("--seed", type=int, help="Seed for random samples")
    parser.add_argument("--golden-dir", dest="golden_dir", help="Directory of golden expansion files")
    parser.add_argument("--emit-golden", dest="emit_golden", action="store_true", default=None,
                        help="Write golden files instead of comparing against them")
    parser.add_argument("--out", dest="out_path", help="Report path")
    parser.add_argument("--workers", type=int, help="Thread pool size for concurrent suites")
    parser.add_argument("--log-level", dest="log_level", help="Logging level")
    parser.set_defaults(handler=run)


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    keys = ("suites", "k", "family", "l", "q_order", "taylor_order", "tolerance", "tau_samples",
            "seed", "golden_dir", "emit_golden", "out_path", "workers", "log_level")
    return {key: getattr(args, key, None) for key in keys}


def run(args: argparse.Namespace) -> int:
    config = build_config(get_settings(), overrides_from(args))
    set_global_level(config.log_level)
    logger.info(f"Verifying k={config.k}, family={config.family.value}, suites={config.suites}")

    report = get_verification_service().run(config)
    summary = report.summary
    if report.all_passed:
        logger.info(f"All {summary.total} checks passed")
    else:
        failed = [check.id for check in report.checks if not check.passed]
        logger.warning(f"{summary.failed} of {summary.total} checks failed: {', '.join(failed)}")
    return report.exit_code
