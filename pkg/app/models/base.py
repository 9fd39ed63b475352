"""
Error envelope printed when a run cannot complete.
"""
from typing import Any, Dict, Optional
from pydantic import BaseModel, Field, ConfigDict


class ErrorResponse(BaseModel):
    """Machine-readable failure description written to stderr."""

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "success": False,
                "message": "Configuration rejected",
                "error": "family must be '8k+4' or '8k', got '8k+2'",
                "error_code": "CONFIG_ERROR",
                "exit_code": 2,
                "context": {"option": "family"}
            }
        }
    )

    success: bool = Field(False, description="Always false for error envelopes")
    message: str = Field(..., description="Human-readable summary")
    error: str = Field(..., description="Detailed error information")
    error_code: Optional[str] = Field(None, description="Machine-readable error code")
    exit_code: int = Field(1, description="Process exit status that accompanies the error")
    context: Dict[str, Any] = Field(default_factory=dict, description="Extra diagnostic fields")
