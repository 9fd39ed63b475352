from fractions import Fraction

import numpy as np
import pytest

from app.algebra.coefficients import CoeffDomain, GaussianRational
from app.algebra.graded_poly import GradedRing
from app.algebra.qseries import (
    EIGHTHS_PER_HALF,
    EIGHTHS_PER_UNIT,
    QSeries,
    qseries_coefficient,
    qseries_exp,
    qseries_inv,
    qseries_mul,
)
from app.services.theta_service import euler_product
from app.utils.exceptions import AlgebraError

Q = EIGHTHS_PER_UNIT


def test_euler_product_is_pentagonal():
    # prod (1 - q^n) = 1 - q - q^2 + q^5 + q^7 - q^12 - q^15 + ...
    series = euler_product(16 * Q)
    expected = {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1, 15: -1}
    for n in range(17):
        assert series.coefficient(n * Q) == expected.get(n, 0)


def test_product_order_is_the_smaller_one():
    a = QSeries({0: 1, Q: 2}, 3 * Q)
    b = QSeries({0: 1, Q: 1}, 2 * Q)
    product = a * b
    assert product.order == 2 * Q
    assert product == QSeries({0: 1, Q: 3, 2 * Q: 2}, 2 * Q)


def test_inverse_of_one_minus_q():
    series = QSeries({0: 1, Q: -1}, 6 * Q)
    geometric = series.inv()
    assert all(geometric.coefficient(n * Q) == 1 for n in range(7))
    assert series * geometric == QSeries.one(6 * Q)


def test_inverse_needs_a_unit():
    with pytest.raises(AlgebraError):
        QSeries({Q: 1}, 4 * Q).inv()


def test_exp_and_log_are_inverse():
    series = QSeries({EIGHTHS_PER_HALF: Fraction(1, 2), Q: -3}, 5 * Q)
    assert series.exp().log() == series
    with pytest.raises(AlgebraError):
        QSeries.one(Q).exp()


def test_polynomial_coefficients():
    ring = GradedRing.build([("x", 1)], 4)
    x = ring.generator("x")
    series = QSeries({0: ring.one(), EIGHTHS_PER_HALF: x}, 2 * Q, CoeffDomain.POLY, ring)
    square = series * series
    assert square.coefficient(EIGHTHS_PER_HALF) == x.scale(2)
    assert square.coefficient(Q) == x * x
    assert (square * series.inv() ** 2) == QSeries.one(2 * Q, ring)


def test_dilate_substitutes_t():
    # 1/(1 - t) with t -> -q^(1/2)
    geometric = QSeries({0: 1, 1: -1}, 8).inv()
    dilated = geometric.dilate(EIGHTHS_PER_HALF, -1, 2 * Q)
    assert dilated.order == 2 * Q
    assert [dilated.coefficient(n * EIGHTHS_PER_HALF) for n in range(5)] == [1, -1, 1, -1, 1]


def test_dilate_refuses_to_invent_precision():
    with pytest.raises(AlgebraError, match="precision"):
        QSeries({0: 1, 1: 1}, 2).dilate(Q, 1, 3 * Q)


def test_shift_and_coefficient_bounds():
    series = QSeries({0: 1}, Q).shift(1)
    assert series.coefficient(1) == 1
    assert series.order == Q + 1
    with pytest.raises(AlgebraError):
        series.coefficient(Q + 2)
    with pytest.raises(AlgebraError):
        QSeries({0: 1}, Q).shift(-1)


def test_t_action_phases():
    # q^(1/8) (1 + q^(1/4)): phases e^(2 pi i/8) and i on the second term
    phase, series = QSeries({1: 1, 3: 1}, Q).t_action()
    assert phase == 1
    assert series.coefficient(3) == GaussianRational(Fraction(0), Fraction(1))
    with pytest.raises(AlgebraError):
        QSeries({0: 1, 1: 1}, Q).t_action()


def test_evaluate_at_tau_matches_closed_form():
    tau = complex(0.1, 0.8)
    q = np.exp(2j * np.pi * tau)
    series = QSeries({0: 1, Q: -1}, 20 * Q).inv()
    np.testing.assert_allclose(series.evaluate_at_tau(tau), 1 / (1 - q), rtol=1e-12)


def test_is_integral():
    assert QSeries({0: 1, Q: -7}, Q).is_integral()
    assert not QSeries({0: Fraction(1, 2)}, Q).is_integral()


def test_functional_forms_match_methods():
    a = QSeries({0: 1, Q: -1}, 4 * Q)
    assert qseries_mul(a, qseries_inv(a)) == QSeries.one(4 * Q)
    assert qseries_coefficient(qseries_exp(QSeries({Q: 1}, 2 * Q)), 2 * Q) == Fraction(1, 2)


def test_explicit_domain_is_enforced():
    with pytest.raises(AlgebraError):
        QSeries({0: GaussianRational(Fraction(0), Fraction(1))}, Q, CoeffDomain.RATIONAL)
    with pytest.raises(AlgebraError):
        QSeries({0: Fraction(1, 2)}, Q, CoeffDomain.INTEGER)
