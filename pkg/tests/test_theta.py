from fractions import Fraction

import numpy as np
import pytest

from app.algebra.qseries import EIGHTHS_PER_HALF, EIGHTHS_PER_UNIT
from app.models.report import CheckMode
from app.services.theta_service import ModularFormId, ThetaId
from app.utils.exceptions import NumericDomainError

Q8 = EIGHTHS_PER_UNIT * 20
TAUS = [complex(0.37, 1.29), complex(-0.2, 0.9)]


@pytest.mark.parametrize("form_id, leading", [
    (ModularFormId.DELTA1, {0: Fraction(1, 4), 8: Fraction(6)}),
    (ModularFormId.EPSILON1, {0: Fraction(1, 16), 8: Fraction(-1)}),
    (ModularFormId.DELTA2, {0: Fraction(-1, 8), 4: Fraction(-3)}),
    (ModularFormId.EPSILON2, {0: Fraction(0), 4: Fraction(1)}),
])
def test_modular_form_leading_terms(theta_service, form_id, leading):
    series = theta_service.modular_form_qexp(form_id, Q8)
    for eighths, value in leading.items():
        assert series.coefficient(eighths) == value


def test_delta1_and_epsilon1_live_on_integer_powers(theta_service):
    for form_id in (ModularFormId.DELTA1, ModularFormId.EPSILON1):
        exponents = theta_service.modular_form_qexp(form_id, Q8).exponents()
        assert all(n % EIGHTHS_PER_UNIT == 0 for n in exponents)


def test_epsilon2_second_coefficient(theta_service):
    # theta1^4 theta3^4 / 16 = q^(1/2) (1 + 8 q^(1/2) + ...)
    series = theta_service.modular_form_qexp(ModularFormId.EPSILON2, Q8)
    assert series.coefficient(2 * EIGHTHS_PER_HALF) == 8


def test_theta_prime_leading_terms(theta_service):
    series = theta_service.theta_prime_over_pi(Q8)
    assert series.coefficient(1) == 2
    assert series.coefficient(1 + EIGHTHS_PER_UNIT) == -6


def test_theta_qexp_needs_positive_orders(theta_service):
    from app.utils.exceptions import AlgebraError

    with pytest.raises(AlgebraError):
        theta_service.theta_qexp(ThetaId.THETA, 0, Q8)


@pytest.mark.parametrize("theta_id", [ThetaId.THETA1, ThetaId.THETA2, ThetaId.THETA3])
def test_exact_constants_match_numeric_products(theta_service, theta_id):
    tau = complex(0.1, 0.6)
    exact = theta_service.theta_constant(theta_id, Q8).evaluate_at_tau(tau)
    np.testing.assert_allclose(exact, theta_service.numeric_theta(theta_id, 0.0, tau), rtol=1e-12)


def test_numeric_theta_is_vectorized(theta_service):
    values = theta_service.numeric_theta(ThetaId.THETA3, np.array([0.0, 0.1, 0.2]), TAUS[0])
    assert values.shape == (3,)
    np.testing.assert_allclose(values[0], theta_service.numeric_theta(ThetaId.THETA3, 0.0, TAUS[0]))


def test_theta_is_odd_in_v(theta_service):
    tau = TAUS[1]
    np.testing.assert_allclose(theta_service.numeric_theta(ThetaId.THETA, -0.13, tau),
                               -theta_service.numeric_theta(ThetaId.THETA, 0.13, tau), rtol=1e-12)


@pytest.mark.parametrize("tau", [complex(0.3, 0.0), complex(0.3, -1.0)])
def test_lower_half_plane_is_rejected(theta_service, tau):
    with pytest.raises(NumericDomainError):
        theta_service.numeric_theta(ThetaId.THETA1, 0.0, tau)


def test_transformation_laws_hold(theta_service):
    checks = theta_service.verify_transformation_laws(TAUS, complex(0.11, -0.05), 1e-8)
    assert len(checks) == 10
    assert all(c.mode is CheckMode.NUMERIC for c in checks)
    assert [c.id for c in checks if not c.passed] == []
    assert max(c.error_max for c in checks) < 1e-8


def test_zero_tolerance_fails_numeric_checks(theta_service):
    checks = theta_service.verify_transformation_laws(TAUS, complex(0.11, -0.05), 0.0)
    assert any(not c.passed for c in checks)


def test_theta_suite_passes(theta_service, default_config):
    checks = theta_service.run_checks(default_config)
    ids = {c.id for c in checks}
    assert {"theta.jacobi_identity", "theta.modular_forms.integrality", "theta.exact_t_laws"} <= ids
    assert [c.id for c in checks if not c.passed] == []
