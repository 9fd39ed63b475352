"""
Extraction tables and cancellation results.
"""
from typing import Any, Dict, List, Tuple
from pydantic import BaseModel, Field, ConfigDict

from app.models.geometry import Family


class ExtractionTable(BaseModel):
    """
    Integer triangular system relating P_2's q^(j/2) coefficients to the
    modular basis (8*delta_2)^a * epsilon_2^r.

    ``matrix[j][r]`` is the q^(j/2) coefficient of the r-th basis element and
    ``inverse`` is its integral inverse; row r of ``inverse`` gives b_r as a
    combination of B_0..B_r.
    """

    model_config = ConfigDict(frozen=True)

    k: int
    family: Family
    basis: List[Tuple[int, int]] = Field(..., description="(power of 8*delta_2, power of epsilon_2) per r")
    matrix: List[List[int]]
    inverse: List[List[int]]

    @property
    def size(self) -> int:
        return self.k + 1


class BrTable(BaseModel):
    """JSON artifact describing b_r as integer combinations of B_j."""

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "k": 1,
                "family": "8k+4",
                "rows": [[-1, 0], [72, -1]],
                "basis": [[3, 0], [1, 1]]
            }
        }
    )

    k: int = Field(..., description="Dimension parameter")
    family: Family = Field(..., description="Dimension family")
    rows: List[List[int]] = Field(..., description="rows[r][j] = coefficient of B_j in b_r")
    basis: List[List[int]] = Field(..., description="[power of 8*delta_2, power of epsilon_2] per r")

    @classmethod
    def from_table(cls, table: ExtractionTable) -> "BrTable":
        return cls(
            k=table.k,
            family=table.family,
            rows=[list(row) for row in table.inverse],
            basis=[list(pair) for pair in table.basis],
        )


class CancellationResult(BaseModel):
    """Both sides of the cancellation identity for one geometry."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec_label: str
    lhs: Any = Field(..., description="GradedPoly: top-weight left-hand side")
    h_forms: List[Any] = Field(..., description="GradedPoly h_r = {A-hat ch(b_r) cosh(c/2)} per r")
    constant_exponent: int = Field(..., description="Overall constant is 2**constant_exponent")
    rhs: Any = Field(..., description="GradedPoly: assembled right-hand side")
    residual: Any = Field(..., description="GradedPoly lhs - rhs")
    b_rows: List[List[int]] = Field(..., description="b_r as combinations of B_j")
    details: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.residual
