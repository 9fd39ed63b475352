"""
Truncated q-series on the 1/8 exponent grid.

Exponent n stands for q^(n/8). A series keeps every coefficient with
exponent <= ``order``; products and sums take the smaller order of the two
operands. Coefficients are Fractions, GaussianRationals, complex floats or
GradedPoly values of one common ring.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, Mapping, Optional, Tuple

from app.algebra.coefficients import (
    CoeffDomain,
    GaussianRational,
    check_domain,
    is_zero,
    promote,
    reciprocal,
    to_fraction,
)
from app.algebra.graded_poly import GradedPoly, GradedRing
from app.utils.exceptions import AlgebraError

EIGHTHS_PER_HALF = 4
EIGHTHS_PER_UNIT = 8


def _domain_of(value: Any) -> CoeffDomain:
    if isinstance(value, GradedPoly):
        return CoeffDomain.POLY
    if isinstance(value, GaussianRational):
        return CoeffDomain.GAUSSIAN
    if isinstance(value, (complex, float)):
        return CoeffDomain.COMPLEX
    return CoeffDomain.RATIONAL


def _scale(coefficient: Any, factor: Any) -> Any:
    if isinstance(coefficient, GradedPoly):
        return coefficient.scale(factor)
    return coefficient * factor


class QSeries:
    """Immutable truncated series sum_n c_n q^(n/8), n <= order."""

    __slots__ = ("coeffs", "order", "domain", "ring")

    def __init__(
        self,
        coeffs: Mapping[int, Any],
        order: int,
        domain: Optional[CoeffDomain] = None,
        ring: Optional[GradedRing] = None,
    ):
        if order < 0:
            raise AlgebraError("q-series order must be non-negative")
        cleaned: Dict[int, Any] = {}
        for n, value in coeffs.items():
            if not isinstance(n, int) or n < 0:
                raise AlgebraError(f"q exponent must be a non-negative number of eighths, got {n!r}")
            if n > order or is_zero(value):
                continue
            if isinstance(value, int):
                value = Fraction(value)
            cleaned[n] = value
        if domain is None:
            domain = CoeffDomain.RATIONAL
            for value in cleaned.values():
                domain = promote(domain, _domain_of(value))
        elif domain is not CoeffDomain.POLY:
            for value in cleaned.values():
                check_domain(value, domain)
        if domain is CoeffDomain.POLY and ring is None:
            ring = next((v.ring for v in cleaned.values() if isinstance(v, GradedPoly)), None)
            if ring is None:
                raise AlgebraError("polynomial q-series needs a ring")
        if domain is CoeffDomain.POLY:
            cleaned = {n: (v if isinstance(v, GradedPoly) else ring.constant(v)) for n, v in cleaned.items()}
            cleaned = {n: v for n, v in cleaned.items() if v}
        self.coeffs: Dict[int, Any] = cleaned
        self.order = order
        self.domain = domain
        self.ring = ring if domain is CoeffDomain.POLY else None

    # ------------------------------------------------------------ constructors

    @classmethod
    def one(cls, order: int, ring: Optional[GradedRing] = None) -> "QSeries":
        if ring is not None:
            return cls({0: ring.one()}, order, CoeffDomain.POLY, ring)
        return cls({0: Fraction(1)}, order)

    @classmethod
    def zero(cls, order: int, ring: Optional[GradedRing] = None) -> "QSeries":
        domain = CoeffDomain.POLY if ring is not None else CoeffDomain.RATIONAL
        return cls({}, order, domain, ring)

    @classmethod
    def monomial(cls, eighths: int, coefficient: Any, order: int) -> "QSeries":
        return cls({eighths: coefficient}, order)

    # ------------------------------------------------------------------ basics

    def _zero_coeff(self) -> Any:
        return self.ring.zero() if self.ring is not None else Fraction(0)

    def coefficient(self, eighths: int) -> Any:
        """Coefficient of q^(eighths/8); zero when absent."""
        if eighths > self.order:
            raise AlgebraError(f"coefficient q^({eighths}/8) lies beyond the order {self.order}")
        return self.coeffs.get(eighths, self._zero_coeff())

    def exponents(self) -> Tuple[int, ...]:
        return tuple(sorted(self.coeffs))

    def items(self) -> Iterator[Tuple[int, Any]]:
        return iter(sorted(self.coeffs.items()))

    def min_exponent(self) -> int:
        return min(self.coeffs, default=self.order + 1)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.order, frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        head = ", ".join(f"q^({n}/8): {c!r}" for n, c in list(self.items())[:4])
        return f"QSeries[{self.domain.value}, order={self.order}]({head}{', ...' if len(self.coeffs) > 4 else ''})"

    def _rebuild(self, coeffs: Mapping[int, Any], order: int, domain: Optional[CoeffDomain] = None) -> "QSeries":
        domain = domain or self.domain
        return QSeries(coeffs, order, domain, self.ring if domain is CoeffDomain.POLY else None)

    def _merge_target(self, other: "QSeries") -> Tuple[CoeffDomain, Optional[GradedRing]]:
        domain = promote(self.domain, other.domain)
        ring = self.ring or other.ring
        if self.ring is not None and other.ring is not None and self.ring != other.ring:
            raise AlgebraError("incompatible rings in q-series coefficients")
        return domain, ring

    def truncate(self, order: int) -> "QSeries":
        return self._rebuild(self.coeffs, min(order, self.order))

    # -------------------------------------------------------------- arithmetic

    def __add__(self, other: Any) -> "QSeries":
        if not isinstance(other, QSeries):
            other = QSeries({0: other}, self.order, ring=self.ring,
                            domain=CoeffDomain.POLY if self.ring is not None else None)
        domain, ring = self._merge_target(other)
        order = min(self.order, other.order)
        out = {n: c for n, c in self.coeffs.items() if n <= order}
        for n, c in other.coeffs.items():
            if n <= order:
                out[n] = out[n] + c if n in out else c
        return QSeries(out, order, domain, ring)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return self._rebuild({n: -c for n, c in self.coeffs.items()}, self.order)

    def __sub__(self, other: Any) -> "QSeries":
        if isinstance(other, QSeries):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other: Any) -> "QSeries":
        return (-self) + other

    def scale(self, factor: Any) -> "QSeries":
        """Multiply every coefficient by a scalar or a GradedPoly."""
        if isinstance(factor, GradedPoly):
            if self.domain is CoeffDomain.POLY:
                out = {n: c * factor for n, c in self.coeffs.items()}
            else:
                out = {n: factor.scale(c) for n, c in self.coeffs.items()}
            return QSeries(out, self.order, CoeffDomain.POLY, factor.ring)
        out = {n: _scale(c, factor) for n, c in self.coeffs.items()}
        domain = promote(self.domain, _domain_of(factor)) if self.domain is not CoeffDomain.POLY else self.domain
        return self._rebuild(out, self.order, domain)

    def map_coefficients(self, fn: Callable[[Any], Any], ring: Optional[GradedRing] = None,
                         domain: Optional[CoeffDomain] = None) -> "QSeries":
        """Apply fn to every coefficient; ``ring`` names the target polynomial ring if any."""
        out = {n: fn(c) for n, c in self.coeffs.items()}
        if ring is not None:
            return QSeries(out, self.order, CoeffDomain.POLY, ring)
        return QSeries(out, self.order, domain)

    def __mul__(self, other: Any) -> "QSeries":
        if not isinstance(other, QSeries):
            return self.scale(other)
        domain, ring = self._merge_target(other)
        order = min(self.order, other.order)
        right = sorted(other.coeffs.items())
        out: Dict[int, Any] = {}
        for n, a in self.coeffs.items():
            for m, b in right:
                total = n + m
                if total > order:
                    break
                if isinstance(a, GradedPoly) or not isinstance(b, GradedPoly):
                    product = a * b
                else:
                    product = b * a
                out[total] = out[total] + product if total in out else product
        return QSeries(out, order, domain, ring)

    def __rmul__(self, other: Any) -> "QSeries":
        return self.scale(other)

    def inv(self) -> "QSeries":
        """Inverse; the q^0 coefficient must be invertible."""
        c0 = self.coeffs.get(0)
        if c0 is None or is_zero(c0):
            raise AlgebraError("q-series inverse needs an invertible constant term")
        b0 = reciprocal(c0)
        support = sorted(n for n in self.coeffs if n > 0)
        out: Dict[int, Any] = {0: b0}
        for n in range(1, self.order + 1):
            acc = None
            for k in support:
                if k > n:
                    break
                previous = out.get(n - k)
                if previous is None:
                    continue
                term = self.coeffs[k] * previous
                acc = term if acc is None else acc + term
            if acc is not None and not is_zero(acc):
                out[n] = -(b0 * acc)
        return self._rebuild(out, self.order)

    def exp(self) -> "QSeries":
        """exp of a series with zero constant term: n*E_n = sum_k k*L_k*E_(n-k)."""
        if 0 in self.coeffs:
            raise AlgebraError("q-series exp needs a zero constant term")
        one = self.ring.one() if self.ring is not None else Fraction(1)
        support = sorted(self.coeffs)
        out: Dict[int, Any] = {0: one}
        for n in range(1, self.order + 1):
            acc = None
            for k in support:
                if k > n:
                    break
                previous = out.get(n - k)
                if previous is None:
                    continue
                term = _scale(self.coeffs[k] * previous, k)
                acc = term if acc is None else acc + term
            if acc is not None and not is_zero(acc):
                out[n] = _scale(acc, Fraction(1, n))
        return self._rebuild(out, self.order)

    def log(self) -> "QSeries":
        """log of a series with constant term 1: n*L_n = n*a_n - sum_{k<n} k*L_k*a_(n-k)."""
        c0 = self.coeffs.get(0)
        if c0 is None or (c0 != 1 and not (isinstance(c0, GradedPoly) and c0 == c0.ring.one())):
            raise AlgebraError("q-series log needs constant term 1")
        out: Dict[int, Any] = {}
        for n in range(1, self.order + 1):
            acc = _scale(self.coeffs[n], n) if n in self.coeffs else None
            for k, lk in sorted(out.items()):
                a = self.coeffs.get(n - k)
                if a is None:
                    continue
                term = -_scale(lk * a, k)
                acc = term if acc is None else acc + term
            if acc is not None and not is_zero(acc):
                out[n] = _scale(acc, Fraction(1, n))
        return self._rebuild(out, self.order)

    def __pow__(self, exponent: int) -> "QSeries":
        if exponent < 0:
            return self.inv() ** (-exponent)
        result = QSeries.one(self.order, self.ring)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    # ------------------------------------------------------- exponent changes

    def shift(self, eighths: int) -> "QSeries":
        """Multiply by q^(eighths/8); negative shifts require divisibility."""
        if eighths < 0 and self.coeffs and self.min_exponent() < -eighths:
            raise AlgebraError(f"cannot divide by q^({-eighths}/8): lowest exponent is {self.min_exponent()}")
        out = {n + eighths: c for n, c in self.coeffs.items()}
        return self._rebuild(out, self.order + eighths)

    def dilate(self, step: int, sign: int = 1, order: Optional[int] = None) -> "QSeries":
        """
        Substitute t -> sign * q^(step/8) into a series read as a power series
        in t (exponent n meaning t^n).
        """
        if step <= 0:
            raise AlgebraError("dilation step must be positive")
        target = order if order is not None else self.order * step
        out: Dict[int, Any] = {}
        for n, c in self.coeffs.items():
            if n * step > target:
                continue
            out[n * step] = -c if (sign < 0 and n % 2) else c
        if self.order * step < target:
            raise AlgebraError("dilation would claim precision beyond the source order")
        return self._rebuild(out, target)

    def t_action(self) -> Tuple[int, "QSeries"]:
        """
        Exact tau -> tau+1 action q^(n/8) -> exp(2*pi*i*n/8) q^(n/8).

        Returns (phase_eighths, series) with the common phase
        exp(2*pi*i*phase_eighths/8) factored out; the remaining phases must be
        fourth roots of unity, so all exponents must agree modulo 2.
        """
        if not self.coeffs:
            return 0, self
        base = self.min_exponent()
        out: Dict[int, Any] = {}
        for n, c in self.coeffs.items():
            delta = n - base
            if delta % 2:
                raise AlgebraError("tau -> tau+1 phases are not Gaussian rational for this series")
            quarter = (delta // 2) % 4
            if quarter == 0:
                out[n] = c
            elif quarter == 2:
                out[n] = -c
            else:
                if self.domain is CoeffDomain.POLY:
                    raise AlgebraError("imaginary phases on polynomial coefficients are not supported")
                out[n] = GaussianRational.i_power(quarter) * c
        domain = CoeffDomain.POLY if self.domain is CoeffDomain.POLY else None
        return base % EIGHTHS_PER_UNIT, QSeries(out, self.order, domain, self.ring)

    # ------------------------------------------------------------- evaluation

    def evaluate_at_tau(self, tau: complex, values: Optional[Mapping[str, Any]] = None) -> complex:
        """Numeric value at q = exp(2*pi*i*tau); polynomial coefficients need generator values."""
        total = 0j
        for n, c in self.coeffs.items():
            weight = cmath.exp(2j * cmath.pi * tau * n / EIGHTHS_PER_UNIT)
            if isinstance(c, GradedPoly):
                if values is None:
                    raise AlgebraError("polynomial coefficients need generator values")
                c = c.evaluate(values)
            total += complex(c) * weight
        return total

    def is_integral(self) -> bool:
        for c in self.coeffs.values():
            if isinstance(c, GradedPoly):
                if not c.is_integral():
                    return False
            elif to_fraction(c).denominator != 1:
                return False
        return True


# Functional forms of the ring operations


def qseries_mul(a: QSeries, b: QSeries) -> QSeries:
    return a * b


def qseries_inv(s: QSeries) -> QSeries:
    return s.inv()


def qseries_coefficient(s: QSeries, eighths: int) -> Any:
    return s.coefficient(eighths)


def qseries_exp(s: QSeries) -> QSeries:
    return s.exp()
