"""
Univariate Taylor coefficients of the per-root factors.

Every factor used by the characteristic-form calculus is even in its
argument, so a multiplicative class over many roots is
const^count * exp(sum_m lambda_m * p_m) with p_m the power sums of the
squared roots. This module supplies the coefficients lambda_m.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import List, Tuple

from app.algebra.graded_poly import GradedPoly, GradedRing


def exp_coefficients(order: int, scale: Fraction = Fraction(1)) -> List[Fraction]:
    """Coefficients of exp(scale*a) up to a^order."""
    return [Fraction(scale) ** n / factorial(n) for n in range(order + 1)]


def cosh_coefficients(order: int, scale: Fraction = Fraction(1)) -> List[Fraction]:
    return [c if n % 2 == 0 else Fraction(0) for n, c in enumerate(exp_coefficients(order, scale))]


def sinh_coefficients(order: int, scale: Fraction = Fraction(1)) -> List[Fraction]:
    return [c if n % 2 == 1 else Fraction(0) for n, c in enumerate(exp_coefficients(order, scale))]


def cos_coefficients(order: int, scale: Fraction = Fraction(1)) -> List[Fraction]:
    return [c * (-1) ** (n // 2) if n % 2 == 0 else Fraction(0)
            for n, c in enumerate(exp_coefficients(order, scale))]


def sin_coefficients(order: int, scale: Fraction = Fraction(1)) -> List[Fraction]:
    return [c * (-1) ** (n // 2) if n % 2 == 1 else Fraction(0)
            for n, c in enumerate(exp_coefficients(order, scale))]


def univariate(ring: GradedRing, name: str, coefficients: List[Fraction]) -> GradedPoly:
    """sum_n coefficients[n] * g^n in ``ring`` (terms above the bound are dropped)."""
    i = ring.index(name)
    terms = {}
    for n, c in enumerate(coefficients):
        if c:
            exps = [0] * ring.rank
            exps[i] = n
            terms[tuple(exps)] = c
    return GradedPoly(ring, terms)


def _line(order: int) -> GradedRing:
    return GradedRing(("a",), (1,), order)


def _coefficients(poly: GradedPoly, order: int) -> List[Fraction]:
    return [poly.coefficient({"a": n}) for n in range(order + 1)]


@lru_cache(maxsize=None)
def ahat_root_coefficients(order: int) -> Tuple[Fraction, ...]:
    """(a/2)/sinh(a/2)."""
    ring = _line(order)
    sinh_over = univariate(ring, "a", [sinh_coefficients(order + 1, Fraction(1, 2))[n + 1] * 2
                                       for n in range(order + 1)])
    return tuple(_coefficients(sinh_over.series_inv(), order))


@lru_cache(maxsize=None)
def lhat_root_coefficients(order: int) -> Tuple[Fraction, ...]:
    """a/tanh(a/2) = 2*cosh(a/2)*(a/2)/sinh(a/2); constant term 2."""
    ring = _line(order)
    ahat = univariate(ring, "a", list(ahat_root_coefficients(order)))
    two_cosh = univariate(ring, "a", [2 * c for c in cosh_coefficients(order, Fraction(1, 2))])
    return tuple(_coefficients(ahat * two_cosh, order))


@lru_cache(maxsize=None)
def two_cosh_half_coefficients(order: int) -> Tuple[Fraction, ...]:
    """2*cosh(a/2); constant term 2."""
    return tuple(2 * c for c in cosh_coefficients(order, Fraction(1, 2)))


@lru_cache(maxsize=None)
def sinh_half_over_coefficients(order: int) -> Tuple[Fraction, ...]:
    """2*sinh(a/2)/a; constant term 1."""
    shifted = sinh_coefficients(order + 1, Fraction(1, 2))
    return tuple(2 * shifted[n + 1] for n in range(order + 1))


@lru_cache(maxsize=None)
def even_log_coefficients(coefficients: Tuple[Fraction, ...]) -> Tuple[Fraction, Tuple[Fraction, ...]]:
    """
    For an even series f = c0 + c2 a^2 + ... return (c0, lambdas) with
    log(f / c0) = sum_{m>=1} lambdas[m-1] * a^(2m).
    """
    order = len(coefficients) - 1
    ring = _line(order)
    c0 = coefficients[0]
    normalized = univariate(ring, "a", [c / c0 for c in coefficients])
    log = normalized.series_log()
    return c0, tuple(log.coefficient({"a": 2 * m}) for m in range(1, order // 2 + 1))
