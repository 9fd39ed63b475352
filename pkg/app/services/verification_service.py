"""
Suite orchestration: runs the selected suites, handles golden files and
writes the JSON report.
"""
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional

from app import __version__
from app.models.config import Config
from app.models.report import CheckResult, Report
from app.services.cancellation_service import CancellationService
from app.services.charform_service import CharFormService
from app.services.golden_service import GoldenService
from app.services.lambda_ring_service import LambdaRingService
from app.services.localization_service import LocalizationService
from app.services.ring_service import RingService
from app.services.theta_service import ThetaService
from app.utils.exceptions import VerificationError
from app.utils.logger import get_logger

logger = get_logger(__name__)

SuiteRunner = Callable[[Config], List[CheckResult]]


class VerificationService:
    """Runs suites concurrently and assembles an order-independent report."""

    def __init__(
        self,
        ring_service: RingService,
        theta_service: ThetaService,
        charform_service: CharFormService,
        cancellation_service: CancellationService,
        lambda_service: LambdaRingService,
        localization_service: LocalizationService,
        golden_service: GoldenService,
    ) -> None:
        self.golden_service = golden_service
        self.suites: Dict[str, SuiteRunner] = {
            "ring": ring_service.run_checks,
            "theta": theta_service.run_checks,
            "charforms": charform_service.run_checks,
            "cancel": cancellation_service.run_checks,
            "lambda": lambda_service.run_checks,
            "localize": localization_service.run_checks,
        }

    def _run_suite(self, name: str, config: Config) -> List[CheckResult]:
        suite_logger = logger.bind(suite=name)
        suite_logger.info("Starting suite")
        checks = self.suites[name](config)
        failed = sum(1 for check in checks if not check.passed)
        suite_logger.info("Suite finished", context={"checks": len(checks), "failed": failed})
        return checks

    def run(self, config: Config, write: bool = True) -> Report:
        """Execute the configured suites; golden files are compared or emitted afterwards."""
        checks: List[CheckResult] = []
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(self._run_suite, name, config) for name in config.suites]
            for future in futures:
                checks.extend(future.result())

        if config.golden_dir:
            if config.emit_golden:
                self.golden_service.emit(config, config.golden_dir)
            else:
                checks.extend(self.golden_service.compare(config, config.golden_dir))

        duplicates = [cid for cid, count in Counter(check.id for check in checks).items() if count > 1]
        if duplicates:
            raise VerificationError(f"duplicate check ids: {sorted(duplicates)}")

        report = Report(
            tool_version=__version__,
            config=config.echo(),
            checks=sorted(checks, key=lambda check: check.id),
        )
        summary = report.summary
        logger.info(f"Verification finished: {summary.passed}/{summary.total} passed")
        if write:
            self.write_report(report, config.out_path)
        return report

    @staticmethod
    def write_report(report: Report, out_path: Optional[str]) -> Path:
        path = Path(out_path or "report.json")
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"Report written to {path}")
        return path
