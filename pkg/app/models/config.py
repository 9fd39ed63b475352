"""
Effective run configuration: settings defaults overlaid with CLI flags.
"""
from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field, ConfigDict, ValidationError, field_validator, model_validator

from app.config.settings import ALL_SUITES, Settings
from app.models.geometry import Family, GeometrySpec
from app.utils.exceptions import ConfigError


def parse_complex(text: str) -> complex:
    """Parse 'a+bi', 'a-bi', 'bi' or 'a' into a complex number."""
    cleaned = str(text).strip().replace(" ", "").replace("i", "j").replace("I", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise ValueError(f"cannot parse complex number '{text}'") from exc


class Config(BaseModel):
    """Validated configuration of one verification run."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "k": 1,
                "family": "8k+4",
                "l": 3,
                "q_order": 6,
                "taylor_order": None,
                "tolerance": 1e-8,
                "tau_samples": ["0.37+1.29i", "-0.2+0.9i"],
                "seed": 0,
                "suites": ALL_SUITES,
                "golden_dir": None,
                "emit_golden": False,
                "out_path": "report.json"
            }
        }
    )

    k: int = Field(1, ge=0)
    family: Family = Field(Family.EIGHT_K_PLUS_FOUR)
    l: int = Field(3, ge=1)
    q_order: int = Field(6, ge=1, description="Order in units of q^(1/2)")
    taylor_order: Optional[int] = Field(None, ge=1)
    theta_q_order: int = Field(20, ge=1)
    tolerance: float = Field(1e-8, ge=0.0)
    tau_samples: List[str] = Field(default_factory=lambda: ["0.37+1.29i", "-0.2+0.9i"], min_length=1)
    seed: int = 0
    suites: List[str] = Field(default_factory=lambda: list(ALL_SUITES))
    golden_dir: Optional[str] = None
    emit_golden: bool = False
    out_path: str = "report.json"
    workers: int = Field(4, ge=1)
    log_level: str = "INFO"
    log_file: Optional[str] = None

    @field_validator("family", mode="before")
    @classmethod
    def _parse_family(cls, value: Any) -> Family:
        return Family.parse(value)

    @field_validator("tau_samples")
    @classmethod
    def _check_taus(cls, values: List[str]) -> List[str]:
        for text in values:
            if parse_complex(text).imag <= 0:
                raise ValueError(f"tau sample '{text}' is not in the upper half plane")
        return values

    @field_validator("suites")
    @classmethod
    def _check_suites(cls, values: List[str]) -> List[str]:
        unknown = [name for name in values if name not in ALL_SUITES]
        if unknown:
            raise ValueError(f"unknown suites {unknown}; choose from {ALL_SUITES}")
        # canonical order, no duplicates
        return [name for name in ALL_SUITES if name in values]

    @model_validator(mode="after")
    def _check_family(self) -> "Config":
        if self.family is Family.EIGHT_K and self.k < 1:
            raise ValueError("family 8k needs k >= 1")
        return self

    @property
    def dim(self) -> int:
        return self.family.dim(self.k)

    @property
    def taus(self) -> List[complex]:
        return [parse_complex(text) for text in self.tau_samples]

    @property
    def effective_taylor_order(self) -> int:
        return self.taylor_order if self.taylor_order is not None else self.dim // 2 + 2

    def geometry(self, **overrides: Any) -> GeometrySpec:
        """The main geometry of the run: general xi, rank-2l V, p1 identified."""
        fields: Dict[str, Any] = {
            "k": self.k,
            "family": self.family,
            "l": self.l,
            "xi_trivial": False,
            "v_equals_tm": False,
            "p1_identified": True,
        }
        fields.update(overrides)
        if fields.get("v_equals_tm") and "l" not in overrides:
            fields.pop("l")
        return GeometrySpec(**fields)

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def build_config(settings: Settings, overrides: Optional[Dict[str, Any]] = None) -> Config:
    """Overlay non-None CLI overrides on settings; validation errors become ConfigError."""
    values = settings.model_dump()
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    try:
        return Config(**{key: values[key] for key in Config.model_fields if key in values})
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ()))
        raise ConfigError(f"{location}: {first.get('msg')}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
