import pytest

from app.algebra.graded_poly import GradedRing
from app.models.geometry import LocalizedSpec
from app.services.localization_service import EULER, localized_ring
from app.utils.exceptions import AlgebraError

SPEC = LocalizedSpec(k=1)


@pytest.fixture(scope="module")
def sides(localization_service):
    return localization_service.base_sides(SPEC)


def test_localized_spec_dimensions():
    assert (SPEC.ambient_dim, SPEC.base_dim, SPEC.base_root_count, SPEC.max_power_index) == (12, 10, 5, 2)


def test_localized_ring():
    ring = localized_ring(SPEC)
    assert ring.names == ("ps_b2", "ps_b4", EULER)
    assert ring.bound == 12


def test_localize_form_substitution(localization_service):
    ambient = GradedRing.build([("ps_x2", 4), ("ps_x6", 12), ("c", 2)], 12)
    target = localized_ring(SPEC)
    e = target.generator(EULER)
    form = ambient.generator("ps_x2") + ambient.generator("ps_x6") + ambient.generator("c")
    assert localization_service.localize_form(form, SPEC) == target.generator("ps_b2") + e ** 2 + e ** 6 + e


def test_localize_form_rejects_bundle_generators(localization_service):
    ambient = GradedRing.build([("ps_y2", 4)], 12)
    with pytest.raises(AlgebraError, match="ps_y2"):
        localization_service.localize_form(ambient.generator("ps_y2"), SPEC)


@pytest.mark.parametrize("order", [6, 12, 16])
def test_hyperbolic_identity(localization_service, order):
    check = localization_service.verify_hyperbolic_identity(order)
    assert check.passed
    assert check.details == {"taylor_order": order}


def test_base_sides_live_on_the_base(sides):
    assert sides["lhs"].ring.bound == SPEC.base_dim
    assert sides["rhs"].ring == sides["lhs"].ring
    assert len(sides["brackets"]) == SPEC.k + 1


def test_brackets_vanish_at_zero(localization_service, sides):
    assert localization_service.verify_bracket_vanishing(SPEC, sides).passed


def test_cancellation_on_base(localization_service, sides):
    main, parity = localization_service.verify_localized_cancellation(SPEC, sides)
    assert main.id == "localize.cancellation_on_base"
    assert main.passed
    assert set(main.details["lower_weights_equal"]) == {str(w) for w in range(0, SPEC.base_dim, 2)}
    assert parity.passed


def test_lhs_is_odd_in_euler_class(sides):
    lhs = sides["lhs"]
    assert lhs.constant_term() == 0
    assert lhs.coefficient({EULER: 1}) != 0


def test_multiplicative_split(localization_service):
    assert localization_service.verify_localize_examples(SPEC).passed


def test_ambient_consistency(localization_service, sides):
    assert localization_service.verify_ambient_consistency(SPEC, sides).passed


def test_cr_chain(localization_service):
    assert localization_service.verify_cr_chain(SPEC).passed


def test_localize_suite_passes(localization_service, default_config):
    checks = localization_service.run_checks(default_config)
    assert len(checks) == 7
    assert [c.id for c in checks if not c.passed] == []
