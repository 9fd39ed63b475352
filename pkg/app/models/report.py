"""
Verification report models.
"""
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field, ConfigDict, computed_field


class CheckMode(str, Enum):
    EXACT = "exact"
    NUMERIC = "numeric"


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"


class CheckResult(BaseModel):
    """Outcome of one verified identity."""

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "id": "cancel.cancellation_formula",
                "statement": "top-weight twisted cancellation identity with p1 identification",
                "mode": "exact",
                "status": "pass",
                "error_max": None,
                "witness": None,
                "elapsed_ms": 812.4,
                "details": {"constant": 128}
            }
        }
    )

    id: str = Field(..., description="Stable dotted identifier, used for sorting")
    statement: str = Field(..., description="What was checked, in words")
    mode: CheckMode = Field(..., description="Exact algebra or floating-point evaluation")
    status: CheckStatus = Field(..., description="pass or fail")
    error_max: Optional[float] = Field(None, description="Largest residual seen (numeric mode)")
    witness: Optional[str] = Field(None, description="First offending term or sample on failure")
    elapsed_ms: float = Field(0.0, description="Wall time spent on the check")
    details: Dict[str, Any] = Field(default_factory=dict, description="Check-specific parameters")

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS


class ReportSummary(BaseModel):
    total: int = Field(..., description="Number of executed checks")
    passed: int = Field(..., description="Checks with status pass")
    failed: int = Field(..., description="Checks with status fail")


class Report(BaseModel):
    """Full run report; checks are kept sorted by id."""

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "tool_version": "1.0.0",
                "generated_at": "2026-01-01T00:00:00+00:00",
                "config": {"k": 1, "family": "8k+4", "l": 3},
                "checks": [],
                "summary": {"total": 0, "passed": 0, "failed": 0}
            }
        }
    )

    tool_version: str = Field(..., description="Package version that produced the report")
    generated_at: str = Field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"),
        description="UTC timestamp"
    )
    config: Dict[str, Any] = Field(..., description="Echo of the effective configuration")
    checks: List[CheckResult] = Field(default_factory=list, description="Executed checks")

    @computed_field
    @property
    def summary(self) -> ReportSummary:
        passed = sum(1 for check in self.checks if check.passed)
        return ReportSummary(total=len(self.checks), passed=passed, failed=len(self.checks) - passed)

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_passed else 1
