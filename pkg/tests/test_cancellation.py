import pytest

from app.models.geometry import Family, GeometrySpec
from app.services.cancellation_service import (
    ExplicitFormula,
    _invert_unitriangular,
    basis_exponents,
)
from app.utils.exceptions import AlgebraError

K1 = GeometrySpec(k=1, family=Family.EIGHT_K_PLUS_FOUR, l=3, p1_identified=True)


@pytest.mark.parametrize("k, family, expected", [
    (0, Family.EIGHT_K_PLUS_FOUR, [(1, 0)]),
    (1, Family.EIGHT_K_PLUS_FOUR, [(3, 0), (1, 1)]),
    (2, Family.EIGHT_K, [(4, 0), (2, 1), (0, 2)]),
])
def test_basis_exponents(k, family, expected):
    assert basis_exponents(k, family) == expected


@pytest.mark.parametrize("family, matrix, inverse", [
    (Family.EIGHT_K_PLUS_FOUR, [[-1, 0], [-72, -1]], [[-1, 0], [72, -1]]),
    (Family.EIGHT_K, [[1, 0], [48, 1]], [[1, 0], [-48, 1]]),
])
def test_extraction_table_k1(cancellation_service, family, matrix, inverse):
    table = cancellation_service.build_extraction_table(1, family)
    assert table.matrix == matrix
    assert table.inverse == inverse


def test_extraction_table_k0(cancellation_service):
    table = cancellation_service.build_extraction_table(0, Family.EIGHT_K_PLUS_FOUR)
    assert table.inverse == [[-1]]


def test_extraction_table_k2_is_integral_triangular(cancellation_service):
    table = cancellation_service.build_extraction_table(2, Family.EIGHT_K_PLUS_FOUR)
    assert table.size == 3
    assert all(isinstance(v, int) for row in table.inverse for v in row)
    assert all(table.inverse[i][j] == 0 for i in range(3) for j in range(i + 1, 3))
    assert cancellation_service.verify_table(2, Family.EIGHT_K_PLUS_FOUR).passed


def test_table_is_cached(cancellation_service):
    first = cancellation_service.build_extraction_table(1, Family.EIGHT_K_PLUS_FOUR)
    assert cancellation_service.build_extraction_table(1, "8k4") is first


@pytest.mark.parametrize("matrix, message", [
    ([[2, 0], [1, 1]], "unimodular"),
    ([[1, 1], [0, 1]], "lower triangular"),
])
def test_invert_rejects_bad_matrices(matrix, message):
    with pytest.raises(AlgebraError, match=message):
        _invert_unitriangular(matrix)


def test_invert_unitriangular():
    assert _invert_unitriangular([[1, 0, 0], [2, -1, 0], [3, 4, 1]]) == [[1, 0, 0], [2, -1, 0], [-11, 4, 1]]


def test_extract_h_needs_enough_orders(cancellation_service):
    table = cancellation_service.build_extraction_table(1, Family.EIGHT_K_PLUS_FOUR)
    with pytest.raises(AlgebraError):
        cancellation_service.extract_h(K1, table, 0)


def test_h_forms_are_top_degree(cancellation_service):
    table = cancellation_service.build_extraction_table(1, Family.EIGHT_K_PLUS_FOUR)
    for h in cancellation_service.extract_h(K1, table, 2):
        assert h.weights_present() in ([], [12])


@pytest.mark.parametrize("spec", [
    K1,
    GeometrySpec(k=1, family=Family.EIGHT_K, l=2, p1_identified=True),
])
def test_h_forms_closed_form(cancellation_service, spec):
    assert cancellation_service.verify_h_forms(spec, 2).passed


def test_h0_is_minus_ahat_cosh(cancellation_service, charform_service):
    table = cancellation_service.build_extraction_table(1, Family.EIGHT_K_PLUS_FOUR)
    coords = charform_service.coordinates(K1)
    h0 = cancellation_service.extract_h(K1, table, 2)[0]
    expected = (charform_service.ahat(coords) * charform_service.cosh_half_c(coords)).weight_component(12)
    assert h0 == -expected


@pytest.mark.slow
def test_h_forms_closed_form_k2(cancellation_service):
    spec = GeometrySpec(k=2, family=Family.EIGHT_K_PLUS_FOUR, l=3, p1_identified=True)
    assert cancellation_service.verify_h_forms(spec, 2).passed


def test_cancellation_formula_k1(cancellation_service):
    result = cancellation_service.verify_cancellation_formula(K1, 2)
    assert result.passed
    assert result.constant_exponent == 3 + 2 + 1
    assert result.b_rows == [[-1, 0], [72, -1]]
    assert result.lhs == result.rhs
    assert result.lhs


@pytest.mark.parametrize("overrides", [
    {"xi_trivial": True},
    {"family": Family.EIGHT_K, "l": 2},
])
def test_cancellation_formula_variants(cancellation_service, overrides):
    spec = K1.model_copy(update=overrides)
    assert cancellation_service.check_cancellation_formula(spec, 2).passed


@pytest.mark.parametrize("spec", [
    K1.model_copy(update={"p1_identified": False}),
    GeometrySpec(k=1, l=2, tm_roots=3, p1_identified=True),
])
def test_cancellation_formula_needs_p1_identification(cancellation_service, spec):
    assert not spec.p1_matched
    with pytest.raises(AlgebraError, match="p1"):
        cancellation_service.verify_cancellation_formula(spec, 2)


def test_cancellation_formula_v_equals_tm(cancellation_service):
    spec = GeometrySpec(k=1, v_equals_tm=True)
    assert spec.l == 6
    check = cancellation_service.check_cancellation_formula(spec, 2, ".v_equals_tm")
    assert check.id == "cancel.cancellation_formula.v_equals_tm"
    assert check.passed


@pytest.mark.parametrize("case", list(ExplicitFormula))
def test_explicit_formulas(cancellation_service, case):
    check = cancellation_service.verify_explicit_formula(case, 2)
    assert check.id == f"cancel.explicit.{case.value}"
    assert check.passed, check.witness


def test_dual_expansion(cancellation_service):
    assert cancellation_service.verify_dual_expansion(K1, 3).passed


def test_basis_closure(cancellation_service):
    assert cancellation_service.verify_basis_closure(K1).passed


def test_extraction_stability(cancellation_service):
    assert cancellation_service.verify_extraction_stability(K1, 2).passed


@pytest.mark.parametrize("k", [0, 1, 2])
def test_constant_consistency(cancellation_service, k):
    assert cancellation_service.verify_constant_consistency(k).passed


def test_br_table_model(cancellation_service, golden_service):
    table = golden_service.br_table(1, Family.EIGHT_K_PLUS_FOUR)
    assert table.rows == [[-1, 0], [72, -1]]


@pytest.mark.slow
def test_cancellation_formula_k2(cancellation_service):
    spec = GeometrySpec(k=2, family=Family.EIGHT_K_PLUS_FOUR, l=3, p1_identified=True)
    assert cancellation_service.verify_cancellation_formula(spec, 2).passed


def test_residual_is_reported_exactly(cancellation_service):
    result = cancellation_service.verify_cancellation_formula(K1, 2)
    assert result.residual == result.lhs.ring.zero()
    assert result.spec_label == K1.label()
