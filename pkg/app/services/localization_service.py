"""
Restriction to a codimension-two submanifold.

With TM|_B = TB + N and xi|_B = N, the ambient power sums split as
ps_x{2m} -> ps_b{2m} + e^(2m) and c -> e, where e is the Euler form of N.
Power sums of TB stop at ps_b{4k}, the last one of weight <= 8k on the
(8k+2)-dimensional base.
"""
from fractions import Fraction
from typing import Dict, List, Optional

from app.algebra.graded_poly import GradedPoly, GradedRing
from app.algebra.qseries import EIGHTHS_PER_HALF
from app.algebra.taylor import (
    ahat_root_coefficients,
    cosh_coefficients,
    even_log_coefficients,
    exp_coefficients,
    lhat_root_coefficients,
    sinh_coefficients,
    sinh_half_over_coefficients,
    univariate,
)
from app.models.config import Config
from app.models.geometry import Family, GeometrySpec, LocalizedSpec
from app.models.report import CheckResult
from app.services.cancellation_service import CancellationService
from app.services.charform_service import CharFormService, RootCoordinates, Which
from app.services.lambda_ring_service import LambdaRingService
from app.utils.checks import Stopwatch, exact_check
from app.utils.exceptions import AlgebraError
from app.utils.logger import get_logger

logger = get_logger(__name__)

EULER = "e"
DEFAULT_TAYLOR_ORDER = 12


def localized_ring(spec: LocalizedSpec) -> GradedRing:
    gens = [(f"ps_b{2 * m}", 4 * m) for m in range(1, spec.max_power_index + 1)]
    gens.append((EULER, 2))
    return GradedRing.build(gens, spec.ambient_dim)


def _euler_series(ring: GradedRing, coefficients: List[Fraction]) -> GradedPoly:
    """sum_n coefficients[n] * e^n (e has weight 2, so only n <= bound/2 survive)."""
    return univariate(ring, EULER, coefficients)


def _base_class(ring: GradedRing, per_root, count: int, top: int) -> GradedPoly:
    """Multiplicative class of TB over ``count`` roots from its even per-root series."""
    c0, lambdas = even_log_coefficients(per_root)
    log = ring.zero()
    for m, value in enumerate(lambdas, start=1):
        if m > top:
            break
        if value:
            log = log + ring.generator(f"ps_b{2 * m}").scale(value)
    return log.series_exp().scale(c0 ** count)


class LocalizationService:
    """Form-level identities on the base of a codimension-two embedding."""

    def __init__(self, cancellation_service: Optional[CancellationService] = None,
                 lambda_service: Optional[LambdaRingService] = None) -> None:
        self.cancellation_service = cancellation_service or CancellationService()
        self.charform_service: CharFormService = self.cancellation_service.charform_service
        self.lambda_service = lambda_service or LambdaRingService(self.cancellation_service, self.charform_service)

    # ---------------------------------------------------------- substitution

    @staticmethod
    def ambient_spec(spec: LocalizedSpec, xi_trivial: bool = False) -> GeometrySpec:
        return GeometrySpec(k=spec.k, family=Family.EIGHT_K_PLUS_FOUR, v_equals_tm=True, xi_trivial=xi_trivial)

    def localize_form(self, form: GradedPoly, spec: LocalizedSpec) -> GradedPoly:
        """Image of an ambient form under ps_x{2m} -> ps_b{2m} + e^(2m), c -> e."""
        target = localized_ring(spec)
        euler = target.generator(EULER)
        mapping: Dict[str, GradedPoly] = {}
        for name in form.ring.names:
            if name == "c":
                mapping[name] = euler
            elif name.startswith("ps_x"):
                m = int(name[len("ps_x"):]) // 2
                image = euler ** (2 * m)
                if m <= spec.max_power_index:
                    image = image + target.generator(f"ps_b{2 * m}")
                mapping[name] = image
            else:
                raise AlgebraError(f"generator '{name}' has no localization")
        return form.substitute(mapping, target)

    def base_ahat(self, spec: LocalizedSpec, ring: GradedRing) -> GradedPoly:
        order = spec.ambient_dim // 2
        return _base_class(ring, ahat_root_coefficients(order), spec.base_root_count, spec.max_power_index)

    def base_lhat(self, spec: LocalizedSpec, ring: GradedRing) -> GradedPoly:
        order = spec.ambient_dim // 2
        return _base_class(ring, lhat_root_coefficients(order), spec.base_root_count, spec.max_power_index)

    def _ch_br(self, coords: RootCoordinates, qhalf: int, xi_factors: bool, row: List[int]) -> GradedPoly:
        """ch(b_r) = sum_j Z[r][j] ch(B_j) for the twisted or untwisted Theta_2."""
        series = self.charform_service.ch_theta(Which.TWO, coords, qhalf, xi_factors)
        total = coords.ring.zero()
        for j, z in enumerate(row):
            if z:
                total = total + series.coefficient(EIGHTHS_PER_HALF * j).scale(z)
        return total

    # ------------------------------------------------------------ identities

    def base_sides(self, spec: LocalizedSpec) -> Dict[str, GradedPoly]:
        """
        Both sides of

            (1/8) L-hat(TB) sinh(e/2)/cosh(e/2)
              = sum_r 2^(6k-6r) A-hat(TB) [ch b_r(TB+N, C^2) - cosh(e/2) ch b_r(TB+N, N)] / (2 sinh(e/2))

        over the base ring (bound 8k+2), plus the undivided brackets.
        """
        k = spec.k
        qhalf = max(k, 1)
        table = self.cancellation_service.build_extraction_table(k, Family.EIGHT_K_PLUS_FOUR)
        coords = self.charform_service.coordinates(self.ambient_spec(spec))
        ring = localized_ring(spec)
        base = ring.with_bound(spec.base_dim)
        order = ring.bound // 2
        cosh_e = _euler_series(ring, cosh_coefficients(order, Fraction(1, 2)))
        brackets = []
        rhs = base.zero()
        for r, row in enumerate(table.inverse):
            untwisted = self.localize_form(self._ch_br(coords, qhalf, False, row), spec)
            twisted = self.localize_form(self._ch_br(coords, qhalf, True, row), spec)
            bracket = untwisted - cosh_e * twisted
            brackets.append(bracket)
            rhs = rhs + bracket.divide_by_generator(EULER).scale(Fraction(2) ** (6 * k - 6 * r))
        sinh_over = _euler_series(base, list(sinh_half_over_coefficients(base.bound // 2)))
        rhs = rhs * self.base_ahat(spec, base) * sinh_over.series_inv()
        tanh_half = (_euler_series(base, sinh_coefficients(base.bound // 2, Fraction(1, 2)))
                     * _euler_series(base, cosh_coefficients(base.bound // 2, Fraction(1, 2))).series_inv())
        lhs = (self.base_lhat(spec, base) * tanh_half).scale(Fraction(1, 8))
        return {"lhs": lhs, "rhs": rhs, "brackets": brackets}

    def verify_bracket_vanishing(self, spec: LocalizedSpec, sides: Dict) -> CheckResult:
        watch = Stopwatch()
        offenders = []
        for r, bracket in enumerate(sides["brackets"]):
            if bracket.substitute({EULER: 0}, bracket.ring):
                offenders.append(r)
        return exact_check(
            "localize.bracket_vanishes_at_zero",
            "ch b_r(TB+N, C^2) - cosh(e/2) ch b_r(TB+N, N) vanishes at e = 0",
            bool(offenders), watch, {"k": spec.k},
            witness=f"bracket {offenders[0]} survives e = 0" if offenders else None,
        )

    def verify_localized_cancellation(self, spec: LocalizedSpec, sides: Dict) -> List[CheckResult]:
        """Top weight asserted; the remaining weights are recorded only."""
        watch = Stopwatch()
        lhs, rhs = sides["lhs"], sides["rhs"]
        top = spec.base_dim
        residual = lhs.weight_component(top) - rhs.weight_component(top)
        lower = {w: (lhs.weight_component(w) == rhs.weight_component(w)) for w in range(0, top, 2)}
        main = exact_check(
            "localize.cancellation_on_base",
            f"(1/8) L-hat(TB) tanh(e/2) equals the localized sum over b_r in degree {top}",
            residual, watch, {"k": spec.k, "lower_weights_equal": {str(w): ok for w, ok in lower.items()}},
        )
        watch = Stopwatch()
        flip = {EULER: -lhs.ring.generator(EULER)}
        odd = [name for name, side in (("lhs", lhs), ("rhs", rhs)) if side.substitute(flip, side.ring) != -side]
        parity = exact_check(
            "localize.parity",
            "both sides are odd under e -> -e",
            bool(odd), watch, {"k": spec.k}, witness=f"{odd} not odd" if odd else None,
        )
        return [main, parity]

    def verify_ambient_consistency(self, spec: LocalizedSpec, sides: Dict) -> CheckResult:
        """Localizing the ambient difference of the twisted and untwisted formulas and dividing by e."""
        watch = Stopwatch()
        k = spec.k
        cf = self.charform_service
        coords = cf.coordinates(self.ambient_spec(spec))
        table = self.cancellation_service.build_extraction_table(k, Family.EIGHT_K_PLUS_FOUR)
        top = spec.ambient_dim
        cosh = cf.cosh_half_c(coords)
        ambient_lhs = (cf.lhat(coords) * (1 - cosh.series_inv() ** 2)).scale(Fraction(1, 8)).weight_component(top)
        ambient_rhs = coords.ring.zero()
        for r, row in enumerate(table.inverse):
            bracket = self._ch_br(coords, max(k, 1), False, row) - cosh * self._ch_br(coords, max(k, 1), True, row)
            ambient_rhs = ambient_rhs + (cf.ahat(coords) * bracket).scale(Fraction(2) ** (6 * k - 6 * r))
        ambient_rhs = ambient_rhs.weight_component(top)
        offenders = []
        for name, ambient in (("lhs", ambient_lhs), ("rhs", ambient_rhs)):
            reduced = self.localize_form(ambient, spec).divide_by_generator(EULER)
            if reduced != sides[name].weight_component(spec.base_dim):
                offenders.append(name)
        if ambient_lhs != ambient_rhs:
            offenders.append("ambient identity")
        return exact_check(
            "localize.ambient_consistency",
            "the ambient twisted-minus-untwisted identity localizes to the identity on the base",
            bool(offenders), watch, {"k": k}, witness=f"mismatch: {offenders}" if offenders else None,
        )

    def verify_localize_examples(self, spec: LocalizedSpec) -> CheckResult:
        """A-hat and L-hat split off their normal factors; localization commutes with weight_component."""
        watch = Stopwatch()
        cf = self.charform_service
        coords = cf.coordinates(self.ambient_spec(spec))
        ring = localized_ring(spec)
        order = ring.bound // 2
        ahat = self.localize_form(cf.ahat(coords), spec)
        lhat = self.localize_form(cf.lhat(coords), spec)
        normal_ahat = _euler_series(ring, list(ahat_root_coefficients(order)))
        normal_lhat = _euler_series(ring, list(lhat_root_coefficients(order)))
        # TB classes are evaluated in the full ring; terms above 8k+2 vanish on B
        base_ahat, base_lhat = self.base_ahat(spec, ring), self.base_lhat(spec, ring)
        problems = []
        base = spec.base_dim
        for name, got, want in (("ahat", ahat, base_ahat * normal_ahat), ("lhat", lhat, base_lhat * normal_lhat)):
            if got.truncate(base) != want.truncate(base):
                problems.append(name)
        for w in range(0, spec.ambient_dim + 1, 2):
            if self.localize_form(cf.ahat(coords).weight_component(w), spec) != ahat.weight_component(w):
                problems.append(f"weight {w}")
                break
        return exact_check(
            "localize.multiplicative_split",
            "A-hat(TM) -> A-hat(TB) (e/2)/sinh(e/2) and L-hat(TM) -> L-hat(TB) e/tanh(e/2)",
            bool(problems), watch, {"k": spec.k}, witness=f"mismatch: {problems}" if problems else None,
        )

    def verify_hyperbolic_identity(self, taylor_order: int = DEFAULT_TAYLOR_ORDER) -> CheckResult:
        """cosh(e/2)/sinh(e/2) * (e^e + e^(-e) - 2) = 2 sinh(e) as series in e."""
        watch = Stopwatch()
        ring = GradedRing.build([(EULER, 1)], taylor_order + 1)
        shifted = [c * 2 if n % 2 == 0 else Fraction(0) for n, c in enumerate(exp_coefficients(taylor_order + 1))]
        shifted[0] = Fraction(0)
        xi_reduced = _euler_series(ring, shifted).divide_by_generator(EULER)
        target = ring.with_bound(taylor_order)
        cosh_half = _euler_series(target, cosh_coefficients(taylor_order, Fraction(1, 2)))
        sinh_over = _euler_series(target, [c / 2 for c in sinh_half_over_coefficients(taylor_order)])
        lhs = xi_reduced * cosh_half * sinh_over.series_inv()
        rhs = _euler_series(target, sinh_coefficients(taylor_order)).scale(2)
        return exact_check(
            "localize.hyperbolic_identity",
            f"cosh(e/2)/sinh(e/2) (e^e + e^-e - 2) = 2 sinh(e) to e^{taylor_order}",
            lhs - rhs, watch, {"taylor_order": taylor_order},
        )

    def verify_cr_chain(self, spec: LocalizedSpec) -> CheckResult:
        """
        With b_r(T, xi) - b_r(T + C^2 - xi, C^2) = 2 xi~ C_r localized to (TB + N, N):
        cosh(e/2)/(2 sinh(e/2)) ch(difference) = 2 sinh(e) ch(C_r).
        """
        watch = Stopwatch()
        k = spec.k
        rank = spec.ambient_dim
        qhalf = max(k, 1)
        coords = self.charform_service.coordinates(self.ambient_spec(spec))
        differences = self.lambda_service.br_differences(k, rank, qhalf)
        quotients = self.lambda_service.extract_Cr(k, rank, qhalf)
        ring = localized_ring(spec)
        base = ring.with_bound(spec.base_dim)
        order = base.bound // 2
        cosh_half = _euler_series(base, cosh_coefficients(order, Fraction(1, 2)))
        sinh_over = _euler_series(base, list(sinh_half_over_coefficients(order)))
        two_sinh = _euler_series(base, sinh_coefficients(order)).scale(2)
        residual = None
        for difference, quotient in zip(differences, quotients):
            ch_difference = self.localize_form(self.lambda_service.bundle_chern_character(difference, coords), spec)
            ch_quotient = self.localize_form(self.lambda_service.bundle_chern_character(quotient, coords), spec)
            lhs = ch_difference.divide_by_generator(EULER) * cosh_half * sinh_over.series_inv()
            rhs = two_sinh * ch_quotient.truncate(base.bound)
            if lhs != rhs:
                residual = lhs - rhs
                break
        return exact_check(
            "localize.cr_chain",
            "cosh(e/2)/(2 sinh(e/2)) ch(b_r(TB+N, N) - b_r(TB+N, C^2)) = 2 sinh(e) ch(C_r)",
            residual, watch, {"k": k, "rank": rank},
        )

    # ----------------------------------------------------------------- suite

    def run_checks(self, config: Config) -> List[CheckResult]:
        spec = LocalizedSpec(k=config.k)
        logger.info(f"localize suite: base dimension {spec.base_dim}")
        sides = self.base_sides(spec)
        checks = [
            self.verify_bracket_vanishing(spec, sides),
            *self.verify_localized_cancellation(spec, sides),
            self.verify_ambient_consistency(spec, sides),
            self.verify_localize_examples(spec),
            self.verify_hyperbolic_identity(max(DEFAULT_TAYLOR_ORDER, config.effective_taylor_order)),
            self.verify_cr_chain(spec),
        ]
        return checks

