import pytest

from app.models.geometry import Family, GeometrySpec
from app.services.lambda_ring_service import (
    REDUCED_SYMBOL,
    SYMBOL,
    BundleVariant,
    VirtualBundle,
    bundle_ring,
    halve_by_reduced_symbol,
    lam,
    reduced_tangent,
)
from app.utils.exceptions import AlgebraError

RANK = 12


@pytest.fixture(scope="module")
def ring():
    return bundle_ring(RANK, 2)


def test_virtual_bundle_arithmetic():
    assert reduced_tangent(12) - 2 * REDUCED_SYMBOL == VirtualBundle(tangent=1, symbol=-2, trivial=-8)
    assert -REDUCED_SYMBOL == VirtualBundle(symbol=-1, trivial=2)


def test_bundle_ring_is_truncated_by_qhalf():
    ring = bundle_ring(RANK, 3)
    assert ring.names == ("lam1", "lam2", "lam3", SYMBOL)
    assert ring.bound == 3
    assert bundle_ring(2, 5).names == ("lam1", "lam2", SYMBOL)


def test_b0_is_one_for_every_variant(lambda_service, ring):
    for variant in BundleVariant:
        assert lambda_service.b_coefficients(variant, RANK, 2)[0] == ring.one()


@pytest.mark.parametrize("variant, symbol_coefficient, constant", [
    (BundleVariant.TWISTED, 3, RANK - 6),
    (BundleVariant.SHIFTED, 1, RANK - 2),
    (BundleVariant.UNTWISTED, 0, RANK),
])
def test_b1(lambda_service, ring, variant, symbol_coefficient, constant):
    b1 = lambda_service.b_coefficients(variant, RANK, 2)[1]
    expected = ring.generator(SYMBOL).scale(symbol_coefficient) - ring.generator(lam(1)) + constant
    assert b1 == expected


def test_theta2_bundle_needs_an_order(lambda_service):
    with pytest.raises(AlgebraError):
        lambda_service.theta2_bundle(BundleVariant.TWISTED, RANK, 0)


def test_expansions_are_cached(lambda_service):
    first = lambda_service.theta2_bundle(BundleVariant.TWISTED, RANK, 2)
    assert lambda_service.theta2_bundle("twisted", RANK, 2) is first


@pytest.mark.parametrize("build, expected", [
    (lambda s, l1: (s - 2).scale(2), 1),
    (lambda s, l1: (s - 2).scale(2) * l1, "lam1"),
    (lambda s, l1: s - 2, None),
    (lambda s, l1: s, None),
])
def test_halve_by_reduced_symbol(ring, build, expected):
    s, l1 = ring.generator(SYMBOL), ring.generator(lam(1))
    quotient = halve_by_reduced_symbol(build(s, l1))
    if expected is None:
        assert quotient is None
    elif expected == "lam1":
        assert quotient == l1
    else:
        assert quotient == expected


def test_leading_coefficient_check(lambda_service):
    assert lambda_service.verify_leading_coefficients(RANK, 2).passed


def test_variants_are_integral(lambda_service):
    assert lambda_service.verify_integrality(RANK, 3).passed


def test_factorizations(lambda_service):
    checks = lambda_service.verify_factorizations(RANK, 3)
    assert [c.id for c in checks] == [
        "lambda.factorization.shifted",
        "lambda.factorization.twisted",
        "lambda.factorization.twisted_over_shifted",
    ]
    assert all(c.passed for c in checks)


def test_trivial_symbol_collapse(lambda_service):
    assert lambda_service.verify_trivial_symbol_collapse(RANK, 3).passed


def test_reduced_symbol_congruence(lambda_service):
    check = lambda_service.verify_symbol_congruence()
    assert check.passed
    substitutions = check.details["substitutions"]
    assert substitutions["t=q"] == {"lowest_eighths": 8, "divisible": True}
    assert substitutions["t=q^(1/2)"] == {"lowest_eighths": 4, "divisible": True}


def test_theta2_congruence(lambda_service):
    assert lambda_service.verify_theta2_congruence(RANK, 3).passed


def test_cr_at_k1(lambda_service):
    # b_1 = 72 B_0 - B_1 and the twisted and shifted B_1 differ by 2(s - 2)
    c0, c1 = lambda_service.extract_Cr(1)
    assert not c0
    assert c1 == -1


def test_cr_check(lambda_service):
    check = lambda_service.verify_cr(1, RANK, 2)
    assert check.passed
    assert check.details["quotients"]["C_1"] == "-1"


def test_cr_needs_enough_orders(lambda_service):
    with pytest.raises(AlgebraError):
        lambda_service.br_differences(2, RANK, 1)


def test_exterior_characters_start_with_rank(lambda_service, charform_service):
    coords = charform_service.coordinates(GeometrySpec(k=1, v_equals_tm=True))
    characters = lambda_service.exterior_characters(coords, 2)
    assert characters[0] == 1
    assert characters[1].constant_term() == RANK
    assert characters[2].constant_term() == RANK * (RANK - 1) // 2


def test_ch_compatibility(lambda_service):
    assert lambda_service.verify_ch_compatibility(GeometrySpec(k=1, v_equals_tm=True)).passed


def test_ch_compatibility_models_v_equals_tm(lambda_service):
    with pytest.raises(AlgebraError):
        lambda_service.verify_ch_compatibility(GeometrySpec(k=1, family=Family.EIGHT_K_PLUS_FOUR, l=3))


def test_lambda_suite_passes(lambda_service, default_config):
    checks = lambda_service.run_checks(default_config)
    assert "lambda.cr_integrality" in {c.id for c in checks}
    assert [c.id for c in checks if not c.passed] == []
