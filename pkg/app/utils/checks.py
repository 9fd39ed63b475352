"""
Helpers that turn computed residuals into CheckResult entries.
"""
import time
from typing import Any, Dict, Iterable, Optional

from app.algebra.graded_poly import GradedPoly
from app.algebra.qseries import QSeries
from app.models.report import CheckMode, CheckResult, CheckStatus
from app.utils.logger import get_logger

logger = get_logger(__name__)


class Stopwatch:
    """Wall-clock timer started at construction."""

    def __init__(self) -> None:
        self._start = time.perf_counter()

    @property
    def elapsed_ms(self) -> float:
        return round((time.perf_counter() - self._start) * 1000.0, 3)


def residual_witness(residual: Any) -> Optional[str]:
    """Short description of the first nonzero part of an exact residual."""
    if isinstance(residual, GradedPoly):
        return residual.leading_terms() if residual else None
    if isinstance(residual, QSeries):
        for n, coefficient in residual.items():
            text = coefficient.leading_terms() if isinstance(coefficient, GradedPoly) else str(coefficient)
            return f"q^({n}/8): {text}"
        return None
    return None if not residual else str(residual)


def _log_outcome(result: CheckResult) -> CheckResult:
    if result.passed:
        logger.info("pass", context={"check": result.id, "elapsed_ms": result.elapsed_ms})
    else:
        logger.warning("FAIL", context={"check": result.id, "witness": result.witness})
    return result


def exact_check(
    check_id: str,
    statement: str,
    residual: Any,
    watch: Stopwatch,
    details: Optional[Dict[str, Any]] = None,
    witness: Optional[str] = None,
) -> CheckResult:
    """Pass iff ``residual`` is zero (a GradedPoly, QSeries, bool failure flag or None)."""
    failed = bool(residual) if not isinstance(residual, bool) else residual
    return _log_outcome(CheckResult(
        id=check_id,
        statement=statement,
        mode=CheckMode.EXACT,
        status=CheckStatus.FAIL if failed else CheckStatus.PASS,
        witness=(witness or residual_witness(residual)) if failed else None,
        elapsed_ms=watch.elapsed_ms,
        details=details or {},
    ))


def numeric_check(
    check_id: str,
    statement: str,
    errors: Iterable[float],
    passed: bool,
    watch: Stopwatch,
    witness: Optional[str] = None,
    details: Optional[Dict[str, Any]] = None,
) -> CheckResult:
    errors = list(errors)
    return _log_outcome(CheckResult(
        id=check_id,
        statement=statement,
        mode=CheckMode.NUMERIC,
        status=CheckStatus.PASS if passed else CheckStatus.FAIL,
        error_max=max(errors) if errors else 0.0,
        witness=None if passed else witness,
        elapsed_ms=watch.elapsed_ms,
        details=details or {},
    ))
