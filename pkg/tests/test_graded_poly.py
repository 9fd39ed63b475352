from fractions import Fraction

import numpy as np
import pytest
import sympy

from app.algebra.graded_poly import (
    GradedRing,
    divide_by_generator,
    poly_mul,
    series_exp,
    series_inv,
    series_log,
    weight_component,
)
from app.algebra.taylor import (
    ahat_root_coefficients,
    cosh_coefficients,
    lhat_root_coefficients,
    sinh_half_over_coefficients,
)
from app.services.ring_service import sample_ring
from app.utils.exceptions import AlgebraError


@pytest.fixture
def ring():
    return GradedRing.build([("a", 2), ("b", 4)], 8)


def test_terms_above_bound_are_dropped(ring):
    a = ring.generator("a")
    assert a ** 4 == ring.monomial({"a": 4})
    assert a ** 5 == ring.zero()
    assert (a * ring.generator("b")).max_weight() == 6


def test_coefficients_are_exact_fractions(ring):
    a = ring.generator("a")
    poly = a.scale(Fraction(1, 3)) + a.scale(Fraction(2, 3))
    assert poly == a
    assert poly.coefficient({"a": 1}) == Fraction(1)


def test_mixed_rings_raise(ring):
    other = GradedRing.build([("a", 2), ("b", 4)], 6)
    with pytest.raises(AlgebraError, match="incompatible rings"):
        ring.generator("a") + other.generator("a")


def test_unknown_generator_raises(ring):
    with pytest.raises(AlgebraError):
        ring.generator("z")


def test_exp_log_inverse(ring):
    a, b = ring.generator("a"), ring.generator("b")
    x = a.scale(3) - b.scale(Fraction(1, 2)) + a * b
    assert x.series_exp().series_log() == x
    assert x.series_exp() * (-x).series_exp() == ring.one()


def test_series_inv_and_division(ring):
    unit = ring.one().scale(2) + ring.generator("a")
    assert unit * unit.series_inv() == ring.one()
    with pytest.raises(AlgebraError, match="invertible constant term"):
        ring.generator("a").series_inv()


def test_series_log_needs_unit_constant(ring):
    with pytest.raises(AlgebraError):
        (ring.one().scale(2)).series_log()


def test_divide_by_generator_lowers_bound(ring):
    a, b = ring.generator("a"), ring.generator("b")
    quotient = (a * b + a ** 2).divide_by_generator("a")
    assert quotient.ring.bound == 6
    assert quotient == (b + a).truncate(6)
    with pytest.raises(AlgebraError, match="not divisible"):
        (a + b).divide_by_generator("a")


def test_divide_by_linear(ring):
    a, b = ring.generator("a"), ring.generator("b")
    poly = a ** 3 + b * a - 4
    quotient, remainder = poly.divide_by_linear("a", 2)
    assert quotient * (a - 2) + remainder == poly
    assert remainder.degree_in("a") <= 0
    assert remainder == b.scale(2) + 4


def test_weight_component_and_truncate(ring):
    a, b = ring.generator("a"), ring.generator("b")
    poly = 1 + a + b + a * b
    assert poly.weight_component(4) == b
    assert poly.truncate(4) == (1 + a + b).truncate(4)
    with pytest.raises(AlgebraError):
        poly.weight_component(10)


def test_substitute_is_a_homomorphism():
    source = sample_ring(8)
    target = GradedRing.build([("t", 2)], 8)
    t = target.generator("t")
    mapping = {"ps_x2": t ** 2, "ps_x4": t ** 4, "c": t}
    x = source.generator("ps_x2") + source.generator("c").scale(3)
    y = source.generator("c") ** 2 - 1
    assert (x * y).substitute(mapping, target) == x.substitute(mapping, target) * y.substitute(mapping, target)


def test_evaluate_matches_float_arithmetic(ring):
    poly = ring.generator("a").scale(Fraction(1, 2)) + ring.generator("b") ** 2
    np.testing.assert_allclose(float(poly.evaluate({"a": 0.5, "b": 0.25})), 0.25 + 0.0625)


def test_monomials_up_to_counts(ring):
    # a^i b^j with 2i + 4j <= 8
    assert len(ring.monomials_up_to(8)) == 9


def _sympy_taylor(expr, order):
    x = sympy.Symbol("x")
    series = sympy.series(expr(x), x, 0, order + 1).removeO()
    return tuple(Fraction(str(series.coeff(x, n))) for n in range(order + 1))


def test_ahat_root_coefficients_against_sympy():
    expected = _sympy_taylor(lambda x: (x / 2) / sympy.sinh(x / 2), 8)
    assert ahat_root_coefficients(8) == expected


def test_lhat_root_coefficients_against_sympy():
    expected = _sympy_taylor(lambda x: x / sympy.tanh(x / 2), 8)
    assert lhat_root_coefficients(8) == expected


def test_sinh_half_over_against_sympy():
    expected = _sympy_taylor(lambda x: 2 * sympy.sinh(x / 2) / x, 8)
    assert sinh_half_over_coefficients(8) == expected


def test_cosh_coefficients_with_scale():
    expected = _sympy_taylor(lambda x: sympy.cosh(x / 2), 6)
    assert tuple(cosh_coefficients(6, Fraction(1, 2))) == expected


def test_ring_suite_passes(ring_service, default_config):
    checks = ring_service.run_checks(default_config)
    assert [c.id for c in checks if not c.passed] == []
    assert {c.id for c in checks} >= {"ring.poly_laws", "ring.division", "ring.root_factors"}


def test_functional_forms_match_methods(ring):
    a, b = ring.generator("a"), ring.generator("b")
    assert poly_mul(a, b) == a * b
    assert series_log(series_exp(a)) == a
    assert series_inv(1 + a) * (1 + a) == ring.one()
    assert divide_by_generator(a * b, "a") == b.truncate(6)
    assert weight_component(1 + a + b, 4) == b
