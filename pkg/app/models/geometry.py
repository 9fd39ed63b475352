"""
Geometry descriptions driving the characteristic-form pipelines.
"""
from enum import Enum
from typing import Any, Optional
from pydantic import BaseModel, Field, ConfigDict, model_validator


class Family(str, Enum):
    """Dimension family of the manifold: dim M = 8k+4 or dim M = 8k."""

    EIGHT_K_PLUS_FOUR = "8k+4"
    EIGHT_K = "8k"

    @classmethod
    def parse(cls, value: Any) -> "Family":
        if isinstance(value, Family):
            return value
        text = str(value).strip().lower().replace(" ", "")
        aliases = {"8k+4": cls.EIGHT_K_PLUS_FOUR, "8k4": cls.EIGHT_K_PLUS_FOUR, "8k": cls.EIGHT_K}
        if text not in aliases:
            raise ValueError(f"family must be '8k+4' or '8k', got '{value}'")
        return aliases[text]

    def dim(self, k: int) -> int:
        return 8 * k + 4 if self is Family.EIGHT_K_PLUS_FOUR else 8 * k

    @property
    def slug(self) -> str:
        return "8k4" if self is Family.EIGHT_K_PLUS_FOUR else "8k"


class GeometrySpec(BaseModel):
    """
    Root data of (TM, V, xi).

    In power-sum mode (``tm_roots`` unset) the tangent bundle has dim/2
    formal roots and V has l. Explicit mode keeps ``tm_roots`` individual
    root symbols for TM and l for V, which is only feasible for small counts.
    """

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "k": 1,
                "family": "8k+4",
                "l": 3,
                "xi_trivial": False,
                "v_equals_tm": False,
                "p1_identified": True,
                "tm_roots": None
            }
        }
    )

    k: int = Field(..., ge=0, description="dim M = 8k+4 or 8k")
    family: Family = Field(Family.EIGHT_K_PLUS_FOUR, description="Dimension family")
    l: int = Field(0, ge=0, description="Half rank of V")
    xi_trivial: bool = Field(False, description="xi = R^2 with c = 0")
    v_equals_tm: bool = Field(False, description="V = TM with the Levi-Civita connection")
    p1_identified: bool = Field(False, description="Impose p1(TM) = p1(V) by eliminating ps_y2")
    tm_roots: Optional[int] = Field(None, ge=1, description="Explicit TM root count; None for power sums")

    @model_validator(mode="before")
    @classmethod
    def _fill_rank(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            if "family" in data:
                data["family"] = Family.parse(data["family"])
            if data.get("v_equals_tm") and "k" in data:
                family = Family.parse(data.get("family", Family.EIGHT_K_PLUS_FOUR))
                roots = data.get("tm_roots")
                data.setdefault("l", roots if roots is not None else family.dim(data["k"]) // 2)
        return data

    @model_validator(mode="after")
    def _check_consistency(self) -> "GeometrySpec":
        if self.family is Family.EIGHT_K and self.k < 1:
            raise ValueError("family 8k needs k >= 1")
        if self.v_equals_tm and self.l != self.tm_root_count:
            raise ValueError(f"V = TM forces l = {self.tm_root_count}, got l = {self.l}")
        if self.p1_identified and self.l < 1 and not self.v_equals_tm:
            raise ValueError("p1 identification needs a nonzero V")
        return self

    @property
    def dim(self) -> int:
        return self.family.dim(self.k)

    @property
    def modular_weight(self) -> int:
        return self.dim // 2

    @property
    def explicit(self) -> bool:
        return self.tm_roots is not None

    @property
    def tm_root_count(self) -> int:
        return self.tm_roots if self.tm_roots is not None else self.dim // 2

    @property
    def p1_matched(self) -> bool:
        """p1(TM) = p1(V) holds symbolically: V = TM, or ps_y2 eliminated in power-sum mode."""
        return self.v_equals_tm or (self.p1_identified and not self.explicit)

    @property
    def cancellation_constant_exponent(self) -> int:
        """Exponent e of the overall constant 2^e: l+2k+1 for 8k+4, l+2k for 8k."""
        extra = 1 if self.family is Family.EIGHT_K_PLUS_FOUR else 0
        return self.l + 2 * self.k + extra

    def label(self) -> str:
        parts = [f"k{self.k}", self.family.slug, f"l{self.l}"]
        if self.v_equals_tm:
            parts.append("v=tm")
        if self.xi_trivial:
            parts.append("xi-trivial")
        if self.explicit:
            parts.append(f"roots{self.tm_roots}")
        return ".".join(parts)


class LocalizedSpec(BaseModel):
    """
    Restriction of a dim 8k+4 geometry to a codimension-two submanifold B
    with normal bundle N: TM|_B = TB + N and xi|_B = N.
    """

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=0, description="dim B = 8k+2")

    @property
    def ambient_dim(self) -> int:
        return 8 * self.k + 4

    @property
    def base_dim(self) -> int:
        return 8 * self.k + 2

    @property
    def base_root_count(self) -> int:
        return 4 * self.k + 1

    @property
    def max_power_index(self) -> int:
        """Largest m with ps_b[2m] kept; weight 4m stays at or below 8k."""
        return 2 * self.k
