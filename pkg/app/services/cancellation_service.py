"""
Cancellation formulas.

P_2 is expanded in the basis (8 delta_2)^a epsilon_2^r of modular forms of
its weight; comparing the first k+1 half-integral q-coefficients gives an
integer lower-triangular system whose inverse defines h_r (as forms) and
b_r (as integer combinations of the coefficients B_j of Theta_2). The
top-degree identity then follows from the S-transformation relating P_1
and P_2 and is verified exactly.
"""
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

from app.algebra.graded_poly import GradedPoly
from app.algebra.qseries import EIGHTHS_PER_HALF, QSeries
from app.models.config import Config
from app.models.geometry import Family, GeometrySpec
from app.models.report import CheckResult
from app.models.tables import CancellationResult, ExtractionTable
from app.services.charform_service import CharFormService, Which
from app.services.theta_service import ModularFormId, ThetaService
from app.utils.checks import Stopwatch, exact_check
from app.utils.exceptions import AlgebraError
from app.utils.logger import get_logger

logger = get_logger(__name__)


class ExplicitFormula(str, Enum):
    """Closed-form specializations with V = TM."""

    TM_GENERAL_8K4 = "tm_general_8k4"
    TM_TWISTED_DIM12 = "tm_twisted_dim12"
    TM_UNTWISTED_DIM12 = "tm_untwisted_dim12"
    TM_GENERAL_8K = "tm_general_8k"
    TM_TWISTED_DIM8 = "tm_twisted_dim8"


def basis_exponents(k: int, family: Family) -> List[Tuple[int, int]]:
    top = 2 * k + 1 if family is Family.EIGHT_K_PLUS_FOUR else 2 * k
    return [(top - 2 * r, r) for r in range(k + 1)]


def _invert_unitriangular(matrix: List[List[int]]) -> List[List[int]]:
    """Exact inverse of a lower-triangular integer matrix with diagonal entries +-1."""
    size = len(matrix)
    for j in range(size):
        if matrix[j][j] not in (1, -1):
            raise AlgebraError(f"extraction matrix is not unimodular: diagonal entry {matrix[j][j]} at {j}")
        if any(matrix[j][r] for r in range(j + 1, size)):
            raise AlgebraError("extraction matrix is not lower triangular")
    inverse = [[Fraction(0)] * size for _ in range(size)]
    for col in range(size):
        for row in range(size):
            acc = Fraction(1 if row == col else 0)
            for r in range(row):
                acc -= matrix[row][r] * inverse[r][col]
            inverse[row][col] = acc / matrix[row][row]
    if any(value.denominator != 1 for row in inverse for value in row):
        raise AlgebraError("extraction matrix inverse is not integral")
    return [[int(value) for value in row] for row in inverse]


class CancellationService:
    """Extraction of h_r and verification of the cancellation identities."""

    def __init__(self, charform_service: Optional[CharFormService] = None,
                 theta_service: Optional[ThetaService] = None) -> None:
        self.theta_service = theta_service or ThetaService()
        self.charform_service = charform_service or CharFormService(self.theta_service)

    # ---------------------------------------------------------- extraction

    def basis_series(self, k: int, family: Family, q8: int, dual: bool = False) -> List[QSeries]:
        """(8 delta)^a epsilon^r for each r; ``dual`` switches to delta_1, epsilon_1."""
        delta_id, epsilon_id = ((ModularFormId.DELTA1, ModularFormId.EPSILON1) if dual
                                else (ModularFormId.DELTA2, ModularFormId.EPSILON2))
        delta = self.theta_service.modular_form_qexp(delta_id, q8).scale(8)
        epsilon = self.theta_service.modular_form_qexp(epsilon_id, q8)
        return [delta ** power * epsilon ** r for power, r in basis_exponents(k, Family.parse(family))]

    def build_extraction_table(self, k: int, family: Family) -> ExtractionTable:
        """M[j][r] = q^(j/2) coefficient of the r-th basis form; its inverse is integral."""
        return _extraction_table(self, k, Family.parse(family))

    def _build_table(self, k: int, family: Family) -> ExtractionTable:
        if k < 0:
            raise AlgebraError("k must be non-negative")
        q8 = max(EIGHTHS_PER_HALF * k, 8)
        basis = self.basis_series(k, family, q8)
        matrix: List[List[int]] = []
        for j in range(k + 1):
            row = []
            for series in basis:
                value = series.coefficient(EIGHTHS_PER_HALF * j)
                if value.denominator != 1:
                    raise AlgebraError(f"basis coefficient {value} at q^({j}/2) is not an integer")
                row.append(int(value))
            matrix.append(row)
        inverse = _invert_unitriangular(matrix)
        logger.debug(f"extraction table k={k} {family.value}: M={matrix} Z={inverse}")
        return ExtractionTable(k=k, family=family, basis=basis_exponents(k, family),
                               matrix=matrix, inverse=inverse)

    def extract_h(self, spec: GeometrySpec, table: ExtractionTable, qhalf: int) -> List[GradedPoly]:
        """h_r = sum_j Z[r][j] * (q^(j/2) coefficient of P_2)."""
        if qhalf < table.k:
            raise AlgebraError(f"need at least {table.k} half-orders of q, got {qhalf}")
        coords = self.charform_service.coordinates(spec)
        p2 = self.charform_service.p_series(Which.TWO, coords, qhalf)
        forms = []
        for row in table.inverse:
            total = coords.ring.zero()
            for j, z in enumerate(row):
                if z:
                    total = total + p2.coefficient(EIGHTHS_PER_HALF * j).scale(z)
            forms.append(total)
        return forms

    # --------------------------------------------------- cancellation formula

    def lhs_form(self, spec: GeometrySpec) -> GradedPoly:
        """{A-hat det^(1/2)(2cosh) / cosh^2(c/2)} in top degree."""
        cf = self.charform_service
        coords = cf.coordinates(spec)
        full = cf.ahat(coords) * cf.dethalf_2cosh(coords) * cf.cosh_half_c(coords).series_inv() ** 2
        return full.weight_component(spec.dim)

    def verify_cancellation_formula(self, spec: GeometrySpec, qhalf: int) -> CancellationResult:
        """
        Both sides of the twisted cancellation formula.

        Raises AlgebraError unless p1(TM) = p1(V) is imposed.
        """
        if not spec.p1_matched:
            raise AlgebraError(f"cancellation formula needs p1(TM) = p1(V); {spec.label()} does not impose it")
        table =self.build_extraction_table(spec.k, spec.family)
        h_forms = self.extract_h(spec, table, qhalf)
        lhs = self.lhs_form(spec)
        exponent = spec.cancellation_constant_exponent
        rhs = lhs.ring.zero()
        for r, h in enumerate(h_forms):
            rhs = rhs + h.scale(Fraction(2) ** (exponent - 6 * r))
        return CancellationResult(
            spec_label=spec.label(),
            lhs=lhs,
            h_forms=h_forms,
            constant_exponent=exponent,
            rhs=rhs,
            residual=lhs - rhs,
            b_rows=table.inverse,
            details={"matrix": table.matrix, "qhalf": qhalf},
        )

    def check_cancellation_formula(self, spec: GeometrySpec, qhalf: int, suffix: str = "") -> CheckResult:
        watch = Stopwatch()
        result = self.verify_cancellation_formula(spec, qhalf)
        return exact_check(
            f"cancel.cancellation_formula{suffix}",
            f"top-degree A-hat det^(1/2)(2cosh)/cosh^2(c/2) equals 2^{result.constant_exponent} "
            f"sum_r 2^(-6r) h_r",
            result.residual, watch,
            {"spec": spec.label(), "b_rows": result.b_rows, "constant_exponent": result.constant_exponent},
        )

    def verify_h_forms(self, spec: GeometrySpec, qhalf: int) -> CheckResult:
        """
        With n = dim/4 the power of 8 delta_2 and sign = (-1)^n:
        h_0 = sign {A-hat cosh(c/2)} and, for k >= 1,
        h_1 = sign {A-hat (ch(B_1) - 24n) cosh(c/2)} with B_1 = -V~ + 3 xi~.
        """
        watch = Stopwatch()
        cf = self.charform_service
        coords = cf.coordinates(spec)
        table = self.build_extraction_table(spec.k, spec.family)
        h_forms = self.extract_h(spec, table, qhalf)
        power = spec.dim // 4
        sign = -1 if power % 2 else 1
        base = (cf.ahat(coords) * cf.cosh_half_c(coords)).scale(sign)
        expected = [base.weight_component(spec.dim)]
        if spec.k >= 1:
            ch_b1 = coords.adams_xi(1).scale(3) - coords.adams_v(1)
            expected.append((base * (ch_b1 - 24 * power)).weight_component(spec.dim))
        residual = None
        for got, want in zip(h_forms, expected):
            if got != want:
                residual = got - want
                break
        return exact_check(
            "cancel.h_forms",
            "h_0 and h_1 agree with their closed forms",
            residual, watch, {"spec": spec.label()},
        )

    # ------------------------------------------------------- specializations

    def formula_spec(self, case: ExplicitFormula, k: int = 1) -> GeometrySpec:
        case = ExplicitFormula(case)
        if case is ExplicitFormula.TM_GENERAL_8K4:
            return GeometrySpec(k=k, family=Family.EIGHT_K_PLUS_FOUR, v_equals_tm=True)
        if case is ExplicitFormula.TM_GENERAL_8K:
            return GeometrySpec(k=max(k, 1), family=Family.EIGHT_K, v_equals_tm=True)
        if case is ExplicitFormula.TM_TWISTED_DIM8:
            return GeometrySpec(k=1, family=Family.EIGHT_K, v_equals_tm=True)
        return GeometrySpec(k=1, family=Family.EIGHT_K_PLUS_FOUR, v_equals_tm=True,
                            xi_trivial=case is ExplicitFormula.TM_UNTWISTED_DIM12)

    def verify_explicit_formula(self, case: ExplicitFormula, qhalf: int, k: int = 1) -> CheckResult:
        """Compare {L-hat / cosh^2(c/2)} with the stated closed form."""
        watch = Stopwatch()
        case = ExplicitFormula(case)
        spec = self.formula_spec(case, k)
        cf = self.charform_service
        coords = cf.coordinates(spec)
        lhs = (cf.lhat(coords) * cf.cosh_half_c(coords).series_inv() ** 2).weight_component(spec.dim)
        ahat, cosh = cf.ahat(coords), cf.cosh_half_c(coords)
        ch_t, xi_shift = cf.ch_tangent(coords), cf.ch_xi(coords) - 2
        if case in (ExplicitFormula.TM_GENERAL_8K4, ExplicitFormula.TM_GENERAL_8K):
            table = self.build_extraction_table(spec.k, spec.family)
            h_forms = self.extract_h(spec, table, max(qhalf, spec.k))
            outer = 8 if case is ExplicitFormula.TM_GENERAL_8K4 else 1
            rhs = coords.ring.zero()
            for r, h in enumerate(h_forms):
                rhs = rhs + h.scale(outer * Fraction(2) ** (6 * spec.k - 6 * r))
            statement = f"V = TM: top-degree L-hat/cosh^2 equals {outer} sum_r 2^(6k-6r) h_r"
        elif case is ExplicitFormula.TM_TWISTED_DIM8:
            rhs = (ahat * (24 - ch_t + xi_shift.scale(3)) * cosh).weight_component(spec.dim)
            statement = "dim 8: {L-hat/cosh^2} = {[-A ch(T) + 24A + 3A(e^c+e^-c-2)] cosh(c/2)}"
        else:
            rhs = (ahat * (ch_t.scale(8) - 32 - xi_shift.scale(24)) * cosh).weight_component(spec.dim)
            statement = ("dim 12 without twist: {L-hat} = {8A ch(T) - 32A}"
                         if case is ExplicitFormula.TM_UNTWISTED_DIM12 else
                         "dim 12: {L-hat/cosh^2} = {[8A ch(T) - 32A - 24A(e^c+e^-c-2)] cosh(c/2)}")
        return exact_check(f"cancel.explicit.{case.value}", statement, lhs - rhs, watch, {"spec": spec.label()})

    # ------------------------------------------------------ series identities

    def verify_dual_expansion(self, spec: GeometrySpec, qhalf: int) -> CheckResult:
        """P_1 = 2^l sum_r h_r (8 delta_1)^pow epsilon_1^r as a full q-series."""
        watch = Stopwatch()
        table = self.build_extraction_table(spec.k, spec.family)
        h_forms = self.extract_h(spec, table, qhalf)
        coords = self.charform_service.coordinates(spec)
        q8 = EIGHTHS_PER_HALF * qhalf
        p1 = self.charform_service.p_series(Which.ONE, coords, qhalf)
        predicted = QSeries.zero(q8, coords.ring)
        for h, basis in zip(h_forms, self.basis_series(spec.k, spec.family, q8, dual=True)):
            predicted = predicted + basis.scale(h)
        predicted = predicted.scale(2 ** spec.l)
        return exact_check(
            "cancel.dual_expansion",
            "P1 = 2^l sum_r h_r (8 delta1)^pow epsilon1^r to the retained order",
            p1 - predicted, watch, {"spec": spec.label(), "qhalf": qhalf},
        )

    def verify_basis_closure(self, spec: GeometrySpec) -> CheckResult:
        """P_2's q^(r/2) coefficients for r = k+1, k+2 are the basis predictions."""
        watch = Stopwatch()
        qhalf = spec.k + 2
        q8 = EIGHTHS_PER_HALF * qhalf
        table = self.build_extraction_table(spec.k, spec.family)
        h_forms = self.extract_h(spec, table, qhalf)
        coords = self.charform_service.coordinates(spec)
        p2 = self.charform_service.p_series(Which.TWO, coords, qhalf)
        basis = self.basis_series(spec.k, spec.family, q8)
        residual = None
        for r in (spec.k + 1, spec.k + 2):
            n = EIGHTHS_PER_HALF * r
            predicted = coords.ring.zero()
            for h, series in zip(h_forms, basis):
                predicted = predicted + h.scale(series.coefficient(n))
            if p2.coefficient(n) != predicted:
                residual = QSeries({n: p2.coefficient(n) - predicted}, q8, ring=coords.ring)
                break
        return exact_check(
            "cancel.basis_closure",
            "P2 coefficients beyond the extraction range are the integral basis predictions",
            residual, watch, {"spec": spec.label()},
        )

    def verify_extraction_stability(self, spec: GeometrySpec, qhalf: int) -> CheckResult:
        watch = Stopwatch()
        table = self.build_extraction_table(spec.k, spec.family)
        low = self.extract_h(spec, table, qhalf)
        high = self.extract_h(spec, table, qhalf + 2)
        mismatch = [r for r, (a, b) in enumerate(zip(low, high)) if a != b]
        return exact_check(
            "cancel.extraction_stability",
            "h_r do not depend on the retained q-order",
            bool(mismatch), watch, {"qhalf": [qhalf, qhalf + 2]},
            witness=f"h_{mismatch[0]} differs" if mismatch else None,
        )

    def verify_constant_consistency(self, k: int) -> CheckResult:
        """8 * 2^(6k-6r) = 2^(l+2k+1-6r) at l = 4k+2, and 2^(6k-6r) = 2^(l+2k-6r) at l = 4k."""
        watch = Stopwatch()
        offenders = []
        for family, outer in ((Family.EIGHT_K_PLUS_FOUR, 8), (Family.EIGHT_K, 1)):
            kk = max(k, 1) if family is Family.EIGHT_K else k
            spec = GeometrySpec(k=kk, family=family, v_equals_tm=True)
            for r in range(kk + 1):
                if outer * Fraction(2) ** (6 * kk - 6 * r) != Fraction(2) ** (spec.cancellation_constant_exponent - 6 * r):
                    offenders.append(f"{family.value} r={r}")
        return exact_check(
            "cancel.constant_consistency",
            "V = TM constants agree with 2^(l+2k+1) and 2^(l+2k)",
            bool(offenders), watch, {"k": k}, witness=", ".join(offenders) or None,
        )

    def verify_table(self, k: int, family: Family) -> CheckResult:
        watch = Stopwatch()
        table = self.build_extraction_table(k, family)
        size = table.size
        product = [[sum(table.inverse[i][t] * table.matrix[t][j] for t in range(size)) for j in range(size)]
                   for i in range(size)]
        failed = any(product[i][j] != (1 if i == j else 0) for i in range(size) for j in range(size))
        return exact_check(
            "cancel.extraction_table",
            "the extraction matrix is unimodular lower-triangular with integral inverse",
            failed, watch, {"k": k, "family": Family.parse(family).value,
                            "matrix": table.matrix, "inverse": table.inverse},
            witness=f"Z*M = {product}" if failed else None,
        )

    # ----------------------------------------------------------------- suite

    def run_checks(self, config: Config) -> List[CheckResult]:
        spec = config.geometry()
        qhalf = config.q_order
        logger.info(f"cancel suite: {spec.label()}, q-order {qhalf}/2")
        checks = [
            self.verify_table(config.k, config.family),
            self.verify_h_forms(spec, qhalf),
            self.check_cancellation_formula(spec, qhalf),
            self.check_cancellation_formula(config.geometry(xi_trivial=True), qhalf, ".xi_trivial"),
            self.check_cancellation_formula(config.geometry(v_equals_tm=True), qhalf, ".v_equals_tm"),
            self.verify_dual_expansion(spec, qhalf),
            self.verify_basis_closure(spec),
            self.verify_extraction_stability(spec, qhalf),
            self.verify_constant_consistency(config.k),
        ]
        for case in ExplicitFormula:
            checks.append(self.verify_explicit_formula(case, qhalf, config.k))
        return checks


@lru_cache(maxsize=None)
def _extraction_table(service: CancellationService, k: int, family: Family) -> ExtractionTable:
    return service._build_table(k, family)
