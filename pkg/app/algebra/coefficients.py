"""
Coefficient domains.

Exact arithmetic uses ``fractions.Fraction`` (integers are fractions with
denominator one). Gaussian rationals are needed only where the tau -> tau+1
action produces fourth roots of unity; complex floats are confined to the
numeric verifiers.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Any, Union

from app.utils.exceptions import AlgebraError


class CoeffDomain(str, Enum):
    INTEGER = "integer"
    RATIONAL = "rational"
    GAUSSIAN = "gaussian"
    COMPLEX = "complex"
    POLY = "poly"


_RANK = {
    CoeffDomain.INTEGER: 0,
    CoeffDomain.RATIONAL: 1,
    CoeffDomain.GAUSSIAN: 2,
    CoeffDomain.COMPLEX: 3,
}


def promote(left: CoeffDomain, right: CoeffDomain) -> CoeffDomain:
    """Domain of a product or sum of coefficients from two domains."""
    if left is CoeffDomain.POLY or right is CoeffDomain.POLY:
        scalar = right if left is CoeffDomain.POLY else left
        if scalar in (CoeffDomain.GAUSSIAN, CoeffDomain.COMPLEX):
            raise AlgebraError(f"cannot combine polynomial coefficients with {scalar.value} scalars")
        return CoeffDomain.POLY
    return left if _RANK[left] >= _RANK[right] else right


def to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise AlgebraError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class GaussianRational:
    """a + b*i with rational a, b."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", to_fraction(self.re))
        object.__setattr__(self, "im", to_fraction(self.im))

    @classmethod
    def coerce(cls, value: Any) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        return cls(to_fraction(value))

    @classmethod
    def i_power(cls, n: int) -> "GaussianRational":
        return (cls(1), cls(0, 1), cls(-1), cls(0, -1))[n % 4]

    def __add__(self, other: Any) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: Any) -> "GaussianRational":
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other: Any) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other: Any) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def reciprocal(self) -> "GaussianRational":
        norm = self.norm()
        if norm == 0:
            raise AlgebraError("division by zero Gaussian rational")
        return GaussianRational(self.re / norm, -self.im / norm)

    def __truediv__(self, other: Any) -> "GaussianRational":
        return self * GaussianRational.coerce(other).reciprocal()

    def __rtruediv__(self, other: Any) -> "GaussianRational":
        return GaussianRational.coerce(other) * self.reciprocal()

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im)) if self.im else hash(self.re)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


Scalar = Union[Fraction, GaussianRational, complex]


def is_zero(value: Any) -> bool:
    """Zero test valid for scalars and GradedPoly coefficients alike."""
    return not value


def reciprocal(value: Any) -> Any:
    """Multiplicative inverse of a coefficient (GradedPoly uses its series inverse)."""
    if hasattr(value, "series_inv"):
        return value.series_inv()
    if isinstance(value, GaussianRational):
        return value.reciprocal()
    if isinstance(value, complex) or isinstance(value, float):
        if value == 0:
            raise AlgebraError("division by zero")
        return 1 / value
    value = to_fraction(value)
    if value == 0:
        raise AlgebraError("division by zero")
    return 1 / value


def check_domain(value: Any, domain: CoeffDomain) -> None:
    """Raise AlgebraError if value does not belong to domain."""
    if domain is CoeffDomain.INTEGER:
        if not (isinstance(value, (int, Fraction)) and Fraction(value).denominator == 1):
            raise AlgebraError(f"{value!r} is not an integer")
    elif domain is CoeffDomain.RATIONAL:
        if not isinstance(value, (int, Fraction)):
            raise AlgebraError(f"{value!r} is not rational")
    elif domain is CoeffDomain.GAUSSIAN:
        if not isinstance(value, (int, Fraction, GaussianRational)):
            raise AlgebraError(f"{value!r} is not a Gaussian rational")
    elif domain is CoeffDomain.POLY:
        if not hasattr(value, "ring"):
            raise AlgebraError(f"{value!r} is not a graded polynomial")
