from fractions import Fraction

import numpy as np
import pytest

from app.algebra.qseries import EIGHTHS_PER_HALF
from app.models.geometry import Family, GeometrySpec
from app.services.charform_service import Which, cauchy_radius
from app.utils.exceptions import AlgebraError


@pytest.fixture(scope="module")
def spec():
    return GeometrySpec(k=1, family=Family.EIGHT_K_PLUS_FOUR, l=3)


@pytest.fixture(scope="module")
def coords(charform_service, spec):
    return charform_service.coordinates(spec)


def test_power_sum_generators(coords):
    assert coords.ring.names == ("ps_x2", "ps_x4", "ps_x6", "ps_y2", "ps_y4", "ps_y6", "c")
    assert coords.ring.bound == 12


def test_p1_identification_drops_ps_y2(charform_service):
    coords = charform_service.coordinates(GeometrySpec(k=1, l=3, p1_identified=True))
    assert "ps_y2" not in coords.ring.names
    assert coords.ps_v(1) == coords.ring.generator("ps_x2")


def test_newton_reduction_above_rank(charform_service):
    # one root of V: p_2 = p_1^2
    coords = charform_service.coordinates(GeometrySpec(k=1, l=1))
    assert coords.ps_v(2) == coords.ring.generator("ps_y2") ** 2


def test_ahat_low_degrees(charform_service, coords):
    ahat = charform_service.ahat(coords)
    ps_x2 = coords.ring.generator("ps_x2")
    assert ahat.constant_term() == 1
    assert ahat.weight_component(4) == ps_x2.scale(Fraction(-1, 24))


def test_lhat_low_degrees(charform_service, coords):
    lhat = charform_service.lhat(coords)
    assert lhat.constant_term() == 64
    assert lhat.weight_component(4) == coords.ring.generator("ps_x2").scale(Fraction(16, 3))


def test_dethalf_low_degrees(charform_service, coords):
    dethalf = charform_service.dethalf_2cosh(coords)
    assert dethalf.constant_term() == 8
    assert dethalf.weight_component(4) == coords.ring.generator("ps_y2")


def test_chern_characters(charform_service, coords):
    ch_t = charform_service.ch_tangent(coords)
    assert ch_t.constant_term() == 12
    assert ch_t.weight_component(4) == coords.ring.generator("ps_x2")
    ch_xi = charform_service.ch_xi(coords)
    assert ch_xi.weight_component(2) == coords.ring.zero()
    assert ch_xi.weight_component(4) == coords.ring.generator("c") ** 2


def test_ch_theta_starts_at_one(charform_service, coords):
    for which in Which:
        series = charform_service.ch_theta(which, coords, 2)
        assert series.coefficient(0) == coords.ring.one()
        assert series.order == 2 * EIGHTHS_PER_HALF


def test_p2_lives_in_top_degree(charform_service, coords):
    p2 = charform_service.p_series(Which.TWO, coords, 2)
    for _, coefficient in p2.items():
        assert coefficient.weights_present() in ([], [12])


def test_ahat_dethalf_is_lhat(charform_service, spec):
    assert charform_service.verify_ahat_lhat_factorization(spec).passed


def test_theta2_first_coefficient(charform_service, spec):
    assert charform_service.verify_leading_coefficient(spec, 2).passed


def test_xi_trivial_reduction(charform_service, spec):
    assert charform_service.verify_xi_trivial_reduction(spec, 3).passed


def test_brute_force_against_explicit_roots(charform_service):
    spec = GeometrySpec(k=1, l=2, tm_roots=3)
    assert charform_service.verify_brute_force(spec, 2).passed


def test_brute_force_needs_explicit_roots(charform_service, spec):
    with pytest.raises(AlgebraError):
        charform_service.verify_brute_force(spec, 2)


def test_theta_route_agrees(charform_service):
    spec = GeometrySpec(k=1, l=1, tm_roots=2)
    checks = charform_service.verify_theta_route(spec, 2)
    assert [c.id for c in checks] == ["charforms.theta_route.P1", "charforms.theta_route.P2"]
    assert all(c.passed for c in checks)


@pytest.mark.parametrize("taus", [
    [complex(0.37, 1.29), complex(-0.2, 0.9)],
    [complex(0.3, 1.1), complex(-0.2, 0.9)],
])
def test_numeric_modularity(charform_service, spec, taus):
    checks = charform_service.verify_modularity_numeric(spec, taus, 1e-7)
    assert "charforms.modularity.S_relation" in {c.id for c in checks}
    assert [c.id for c in checks if not c.passed] == []


def test_cauchy_radius_stays_clear_of_theta_zeros():
    roots = {"x": np.array([0.2, -0.1]), "y": np.array([0.15]), "u": np.array(0.12)}
    tau = complex(0.37, 1.29)
    image = (-tau - 1) / (2 * tau + 1)
    assert image.imag < 0.15
    radius = cauchy_radius(roots, image)
    assert radius * 0.2 <= 0.5 * image.imag / 2 + 1e-15
    assert cauchy_radius(roots, complex(0, 3)) == pytest.approx(1.0)
    assert cauchy_radius({"x": np.array([0.0]), "u": np.array(0.0)}, tau) == 1.0


def test_top_coefficient_at_small_imaginary_part(charform_service, spec):
    roots = charform_service.sample_roots(spec, 0)
    tau = complex(0.37, 1.29)
    image = (-tau - 1) / (2 * tau + 1)
    lhs = charform_service.numeric_p_value(Which.ONE, roots, image, spec.dim // 2)
    rhs = (2 * tau + 1) ** spec.modular_weight * charform_service.numeric_p_value(Which.ONE, roots, tau, spec.dim // 2)
    assert abs(lhs) == pytest.approx(abs(rhs), rel=1e-7)


def test_charforms_suite_passes(charform_service, default_config):
    checks = charform_service.run_checks(default_config)
    assert [c.id for c in checks if not c.passed] == []
