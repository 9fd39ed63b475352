"""
Theta_2 as a virtual bundle.

Coefficients live in the free lambda-ring on T (symbols lam1..lamN, lam_i
vanishing above the rank N) and the oriented rank-2 symbol s. Symmetric
powers are expressed through S_t = 1 / Lambda_{-t}, so every coefficient is
an integer polynomial in lam_i and s. Grading lam_i by i and s by 1, the
q^(j/2) coefficient has weight at most j, which lets the bundle ring carry
the half-order of q as its bound.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional

from app.algebra.coefficients import CoeffDomain
from app.algebra.graded_poly import GradedPoly, GradedRing
from app.algebra.qseries import EIGHTHS_PER_HALF, EIGHTHS_PER_UNIT, QSeries
from app.models.config import Config
from app.models.geometry import Family, GeometrySpec
from app.models.report import CheckResult
from app.services.cancellation_service import CancellationService
from app.services.charform_service import CharFormService, RootCoordinates, Which
from app.utils.checks import Stopwatch, exact_check
from app.utils.exceptions import AlgebraError
from app.utils.logger import get_logger

logger = get_logger(__name__)

SYMBOL = "s"
CONGRUENCE_T_ORDER = 4


class BundleVariant(str, Enum):
    """Theta_2(T, xi), Theta_2(T, C^2) and Theta_2(T + C^2 - xi, C^2)."""

    TWISTED = "twisted"
    UNTWISTED = "untwisted"
    SHIFTED = "shifted"


@dataclass(frozen=True)
class VirtualBundle:
    """tangent * T + symbol * s + trivial * C."""

    tangent: int = 0
    symbol: int = 0
    trivial: int = 0

    def __add__(self, other: "VirtualBundle") -> "VirtualBundle":
        return VirtualBundle(self.tangent + other.tangent, self.symbol + other.symbol, self.trivial + other.trivial)

    def __neg__(self) -> "VirtualBundle":
        return VirtualBundle(-self.tangent, -self.symbol, -self.trivial)

    def __sub__(self, other: "VirtualBundle") -> "VirtualBundle":
        return self + (-other)

    def __rmul__(self, factor: int) -> "VirtualBundle":
        return VirtualBundle(factor * self.tangent, factor * self.symbol, factor * self.trivial)


def reduced_tangent(rank: int) -> VirtualBundle:
    return VirtualBundle(tangent=1, trivial=-rank)


REDUCED_SYMBOL = VirtualBundle(symbol=1, trivial=-2)


def lam(i: int) -> str:
    return f"lam{i}"


def bundle_ring(rank: int, qhalf: int) -> GradedRing:
    """lam1..lam_min(N, Qhalf) of weight i, and s of weight 1, bounded at Qhalf."""
    generators = [(lam(i), i) for i in range(1, min(rank, qhalf) + 1)]
    generators.append((SYMBOL, 1))
    return GradedRing.build(generators, qhalf)


def halve_by_reduced_symbol(poly: GradedPoly) -> Optional[GradedPoly]:
    """C with poly = 2 (s - 2) C and C integral, or None when no such C exists."""
    quotient, remainder = poly.divide_by_linear(SYMBOL, 2)
    if remainder:
        return None
    if any(c.denominator != 1 or c.numerator % 2 for _, c in quotient):
        return None
    return quotient.scale(Fraction(1, 2))


class LambdaRingService:
    """Virtual-bundle expansions of Theta_2 and their congruences modulo 2(s - 2)."""

    def __init__(self, cancellation_service: Optional[CancellationService] = None,
                 charform_service: Optional[CharFormService] = None) -> None:
        self.cancellation_service = cancellation_service or CancellationService(charform_service)
        self.charform_service = charform_service or self.cancellation_service.charform_service

    # ------------------------------------------------------------ t-series

    def lambda_t(self, ring: GradedRing, bundle: VirtualBundle, t_order: int) -> QSeries:
        """Lambda_t(bundle) with exponent n standing for t^n."""
        tangent = {0: ring.one()}
        for i in range(1, t_order + 1):
            if ring.has(lam(i)):
                tangent[i] = ring.generator(lam(i))
        symbol = {0: ring.one(), 1: ring.generator(SYMBOL), 2: ring.one()}
        trivial = {0: ring.one(), 1: ring.one()}
        result = QSeries.one(t_order, ring)
        for coeffs, power in ((tangent, bundle.tangent), (symbol, bundle.symbol), (trivial, bundle.trivial)):
            if power:
                result = result * QSeries(coeffs, t_order, CoeffDomain.POLY, ring) ** power
        return result

    def lambda_q(self, ring: GradedRing, bundle: VirtualBundle, step: int, sign: int, q8: int) -> QSeries:
        """Lambda_{sign * q^(step/8)}(bundle)."""
        return self.lambda_t(ring, bundle, q8 // step + 1).dilate(step, sign, q8)

    def symmetric_q(self, ring: GradedRing, bundle: VirtualBundle, step: int, q8: int) -> QSeries:
        """S_{q^(step/8)}(bundle) = 1 / Lambda_{-q^(step/8)}(bundle)."""
        return self.lambda_t(ring, bundle, q8 // step + 1).inv().dilate(step, -1, q8)

    def half_products(self, ring: GradedRing, bundle: VirtualBundle, sign: int, q8: int) -> QSeries:
        """prod_{m >= 1} Lambda_{sign * q^(m - 1/2)}(bundle)."""
        result = QSeries.one(q8, ring)
        for step in range(EIGHTHS_PER_HALF, q8 + 1, EIGHTHS_PER_UNIT):
            result = result * self.lambda_q(ring, bundle, step, sign, q8)
        return result

    def integer_products(self, ring: GradedRing, bundle: VirtualBundle, sign: int, q8: int) -> QSeries:
        """prod_{n >= 1} Lambda_{sign * q^n}(bundle)."""
        result = QSeries.one(q8, ring)
        for step in range(EIGHTHS_PER_UNIT, q8 + 1, EIGHTHS_PER_UNIT):
            result = result * self.lambda_q(ring, bundle, step, sign, q8)
        return result

    def symmetric_products(self, ring: GradedRing, bundle: VirtualBundle, q8: int) -> QSeries:
        result = QSeries.one(q8, ring)
        for step in range(EIGHTHS_PER_UNIT, q8 + 1, EIGHTHS_PER_UNIT):
            result = result * self.symmetric_q(ring, bundle, step, q8)
        return result

    # ------------------------------------------------------------ variants

    def theta2_bundle(self, variant: BundleVariant, rank: int, qhalf: int) -> QSeries:
        """Theta_2 variant to q^(Qhalf/2) over bundle_ring(rank, Qhalf)."""
        return _theta2_bundle(self, BundleVariant(variant), rank, qhalf)

    def _expand_theta2(self, variant: BundleVariant, rank: int, qhalf: int) -> QSeries:
        if qhalf < 1:
            raise AlgebraError("theta2_bundle needs Qhalf >= 1")
        variant = BundleVariant(variant)
        ring = bundle_ring(rank, qhalf)
        q8 = EIGHTHS_PER_HALF * qhalf
        tangent = reduced_tangent(rank)
        if variant is BundleVariant.TWISTED:
            result = (self.symmetric_products(ring, tangent, q8)
                      * self.half_products(ring, tangent - 2 * REDUCED_SYMBOL, -1, q8)
                      * self.half_products(ring, REDUCED_SYMBOL, 1, q8)
                      * self.integer_products(ring, REDUCED_SYMBOL, 1, q8))
        else:
            bundle = tangent if variant is BundleVariant.UNTWISTED else tangent - REDUCED_SYMBOL
            result = self.symmetric_products(ring, bundle, q8) * self.half_products(ring, bundle, -1, q8)
        logger.debug(f"theta2 {variant.value} bundle expanded: rank {rank}, {len(result.exponents())} terms")
        return result

    def b_coefficients(self, variant: BundleVariant, rank: int, qhalf: int) -> List[GradedPoly]:
        """B_0..B_Qhalf of a variant."""
        series = self.theta2_bundle(variant, rank, qhalf)
        return [series.coefficient(EIGHTHS_PER_HALF * j) for j in range(qhalf + 1)]

    # -------------------------------------------------------- Chern character

    def exterior_characters(self, coords: RootCoordinates, count: int) -> List[GradedPoly]:
        """ch(lambda^i T) for i = 0..count from log Lambda_t(T) = sum_p (-1)^(p+1) ch(psi^p T) t^p / p."""
        rank = 2 * coords.tm_count
        log = {}
        for p in range(1, count + 1):
            sign = 1 if p % 2 else -1
            log[p] = (coords.adams_tm(p) + rank).scale(Fraction(sign, p))
        series = QSeries(log, count, CoeffDomain.POLY, coords.ring).exp()
        return [series.coefficient(i) for i in range(count + 1)]

    def bundle_chern_character(self, element: GradedPoly, coords: RootCoordinates) -> GradedPoly:
        """Forms image of a bundle-ring element: lam_i -> ch(lambda^i T), s -> e^c + e^(-c)."""
        names = [name for name in element.ring.names if name != SYMBOL]
        characters = self.exterior_characters(coords, len(names))
        mapping = {lam(i): characters[i] for i in range(1, len(names) + 1)}
        mapping[SYMBOL] = self.charform_service.ch_xi(coords)
        return element.substitute(mapping, coords.ring)

    # --------------------------------------------------------------- checks

    def verify_leading_coefficients(self, rank: int, qhalf: int) -> CheckResult:
        """B_0 = 1 for every variant; twisted B_1 = -T + 3s + (N - 6)."""
        watch = Stopwatch()
        ring = bundle_ring(rank, qhalf)
        problems = []
        for variant in BundleVariant:
            if self.b_coefficients(variant, rank, qhalf)[0] != ring.one():
                problems.append(f"{variant.value} B_0 != 1")
        b1 = self.b_coefficients(BundleVariant.TWISTED, rank, qhalf)[1]
        expected = ring.generator(SYMBOL).scale(3) - ring.generator(lam(1)) + (rank - 6)
        if b1 != expected:
            problems.append(f"twisted B_1 = {b1.to_string()}")
        return exact_check(
            "lambda.leading_coefficients",
            f"B_0 = 1 and the twisted B_1 = -T + 3s + {rank - 6} at rank {rank}",
            bool(problems), watch, {"rank": rank}, witness="; ".join(problems) or None,
        )

    def verify_integrality(self, rank: int, qhalf: int) -> CheckResult:
        watch = Stopwatch()
        bad = [v.value for v in BundleVariant if not self.theta2_bundle(v, rank, qhalf).is_integral()]
        return exact_check(
            "lambda.integrality",
            "every Theta_2 variant has integer coefficients in the lambda-ring",
            bool(bad), watch, {"rank": rank, "qhalf": qhalf},
            witness=f"non-integral variants: {bad}" if bad else None,
        )

    def verify_factorizations(self, rank: int, qhalf: int) -> List[CheckResult]:
        """The three product identities relating the variants, each side expanded separately."""
        ring = bundle_ring(rank, qhalf)
        q8 = EIGHTHS_PER_HALF * qhalf
        xi = REDUCED_SYMBOL
        twisted = self.theta2_bundle(BundleVariant.TWISTED, rank, qhalf)
        untwisted = self.theta2_bundle(BundleVariant.UNTWISTED, rank, qhalf)
        shifted = self.theta2_bundle(BundleVariant.SHIFTED, rank, qhalf)
        odd_plus, odd_minus = self.half_products(ring, xi, 1, q8), self.half_products(ring, xi, -1, q8)
        even_plus, even_minus = self.integer_products(ring, xi, 1, q8), self.integer_products(ring, xi, -1, q8)
        cases = [
            ("shifted",
             "Theta_2(T + C^2 - xi, C^2) = Theta_2(T, C^2) prod Lambda_{-q^n}(xi~) / prod Lambda_{-q^(m-1/2)}(xi~)",
             shifted, untwisted * even_minus * odd_minus.inv()),
            ("twisted",
             "Theta_2(T, xi) = Theta_2(T, C^2) prod Lambda_{q^(r-1/2)}(xi~) Lambda_{q^s}(xi~) "
             "/ (prod Lambda_{-q^(m-1/2)}(xi~))^2",
             twisted, untwisted * odd_plus * even_plus * odd_minus.inv() ** 2),
            ("twisted_over_shifted",
             "Theta_2(T, xi) = Theta_2(T + C^2 - xi, C^2) prod Lambda_{q^(r-1/2)}(xi~) Lambda_{q^s}(xi~) "
             "/ prod Lambda_{-q^(m-1/2)}(xi~) Lambda_{-q^n}(xi~)",
             twisted, shifted * odd_plus * even_plus * (odd_minus * even_minus).inv()),
        ]
        results = []
        for name, statement, lhs, rhs in cases:
            watch = Stopwatch()
            results.append(exact_check(f"lambda.factorization.{name}", statement, lhs - rhs, watch,
                                       {"rank": rank, "qhalf": qhalf}))
        return results

    def verify_trivial_symbol_collapse(self, rank: int, qhalf: int) -> CheckResult:
        """s -> 2 makes the three variants equal."""
        watch = Stopwatch()
        ring = bundle_ring(rank, qhalf)
        images = [self.theta2_bundle(v, rank, qhalf).map_coefficients(
            lambda c: c.substitute({SYMBOL: 2}, ring), ring=ring) for v in BundleVariant]
        residual = images[0] - images[1] if images[0] != images[1] else images[0] - images[2]
        return exact_check(
            "lambda.trivial_symbol_collapse",
            "at s = 2 the twisted, untwisted and shifted expansions coincide",
            residual, watch, {"rank": rank},
        )

    def verify_symbol_congruence(self, t_order: int = CONGRUENCE_T_ORDER) -> CheckResult:
        """Lambda_t(xi~) - Lambda_{-t}(xi~) has every coefficient in 2(s - 2) Z[s]."""
        watch = Stopwatch()
        ring = GradedRing.build([(SYMBOL, 1)], t_order)
        plus = self.lambda_t(ring, REDUCED_SYMBOL, t_order)
        difference = plus - plus.dilate(1, -1)
        witnesses = [f"t^{n} coefficient not divisible" for n, c in difference.items()
                     if halve_by_reduced_symbol(c) is None]
        if 0 in difference.coeffs:
            witnesses.append("nonzero t^0 coefficient")
        substitutions: Dict[str, Dict[str, Any]] = {}
        for label, step in (("t=q", EIGHTHS_PER_UNIT), ("t=q^(1/2)", EIGHTHS_PER_HALF)):
            series = difference.dilate(step)
            bad = [n for n, c in series.items() if halve_by_reduced_symbol(c) is None]
            vanishes_at_zero = not series.coefficient(0)
            substitutions[label] = {
                "lowest_eighths": series.min_exponent(),
                "divisible": not bad and vanishes_at_zero,
            }
            if bad:
                witnesses.append(f"{label}: q^({bad[0]}/8) coefficient not divisible")
            elif not vanishes_at_zero:
                witnesses.append(f"{label}: nonzero q^0 coefficient")
        return exact_check(
            "lambda.congruence.reduced_symbol",
            f"Lambda_t(xi~) = Lambda_(-t)(xi~) mod 2 t (s - 2) Z[s][[t]] to t^{t_order}",
            bool(witnesses), watch,
            {"t_order": t_order, "substitutions": substitutions},
            witness=witnesses[0] if witnesses else None,
        )

    def verify_theta2_congruence(self, rank: int, qhalf: int) -> CheckResult:
        """B_j(twisted) = B_j(shifted) mod 2(s - 2) for every j, with equality at j = 0."""
        watch = Stopwatch()
        twisted = self.b_coefficients(BundleVariant.TWISTED, rank, qhalf)
        shifted = self.b_coefficients(BundleVariant.SHIFTED, rank, qhalf)
        offenders = []
        for j, (a, b) in enumerate(zip(twisted, shifted)):
            if (j == 0 and a != b) or halve_by_reduced_symbol(a - b) is None:
                offenders.append(j)
        return exact_check(
            "lambda.congruence.theta2",
            "Theta_2(T, xi) = Theta_2(T + C^2 - xi, C^2) mod 2 q^(1/2) (s - 2)",
            bool(offenders), watch, {"rank": rank, "qhalf": qhalf},
            witness=f"B_{offenders[0]} differs outside 2(s - 2)" if offenders else None,
        )

    # ------------------------------------------------------------------- C_r

    def br_differences(self, k: int, rank: int, qhalf: int,
                       family: Family = Family.EIGHT_K_PLUS_FOUR) -> List[GradedPoly]:
        """b_r(twisted) - b_r(shifted) with b_r = sum_j Z[r][j] B_j."""
        if qhalf < k:
            raise AlgebraError(f"C_r extraction needs Qhalf >= {k}")
        table = self.cancellation_service.build_extraction_table(k, family)
        twisted = self.b_coefficients(BundleVariant.TWISTED, rank, qhalf)
        shifted = self.b_coefficients(BundleVariant.SHIFTED, rank, qhalf)
        ring = bundle_ring(rank, qhalf)
        differences = []
        for row in table.inverse:
            total = ring.zero()
            for j, z in enumerate(row):
                if z:
                    total = total + (twisted[j] - shifted[j]).scale(z)
            differences.append(total)
        return differences

    def extract_Cr(self, k: int, rank: Optional[int] = None, qhalf: Optional[int] = None,
                   family: Family = Family.EIGHT_K_PLUS_FOUR) -> List[GradedPoly]:
        """Integral C_r with b_r(T, xi) = b_r(T + C^2 - xi, C^2) + 2 (s - 2) C_r."""
        rank = rank if rank is not None else Family.parse(family).dim(k)
        qhalf = qhalf if qhalf is not None else max(k, 1)
        quotients = []
        for r, difference in enumerate(self.br_differences(k, rank, qhalf, family)):
            quotient = halve_by_reduced_symbol(difference)
            if quotient is None:
                raise AlgebraError(f"b_{r} difference is not divisible by 2(s - 2)")
            quotients.append(quotient)
        return quotients

    def verify_cr(self, k: int, rank: int, qhalf: int) -> CheckResult:
        watch = Stopwatch()
        differences = self.br_differences(k, rank, qhalf)
        failing = [r for r, d in enumerate(differences) if halve_by_reduced_symbol(d) is None]
        quotients = {f"C_{r}": halve_by_reduced_symbol(d).to_string()
                     for r, d in enumerate(differences) if r not in failing}
        return exact_check(
            "lambda.cr_integrality",
            "b_r(T, xi) - b_r(T + C^2 - xi, C^2) = 2 (s - 2) C_r with integral C_r",
            bool(failing) or bool(differences[0]), watch, {"k": k, "rank": rank, "quotients": quotients},
            witness=f"b_{failing[0]} difference not divisible" if failing else None,
        )

    def verify_ch_compatibility(self, spec: GeometrySpec, max_j: int = 2) -> CheckResult:
        """ch of the twisted B_j reproduces the q^(j/2) coefficient of ch(Theta_2) for j <= max_j."""
        watch = Stopwatch()
        if not spec.v_equals_tm:
            raise AlgebraError("the lambda-ring expansion models V = TM")
        coords = self.charform_service.coordinates(spec)
        rank = 2 * coords.tm_count
        forms = self.charform_service.ch_theta(Which.TWO, coords, max_j)
        bundles = self.b_coefficients(BundleVariant.TWISTED, rank, max_j)
        residual = None
        for j in range(max_j + 1):
            image = self.bundle_chern_character(bundles[j], coords)
            if image != forms.coefficient(EIGHTHS_PER_HALF * j):
                residual = forms.coefficient(EIGHTHS_PER_HALF * j) - image
                break
        return exact_check(
            "lambda.ch_compatibility",
            f"ch maps the bundle expansion onto ch(Theta_2) through q^({max_j}/2)",
            residual, watch, {"spec": spec.label()},
        )

    # ----------------------------------------------------------------- suite

    def run_checks(self, config: Config) -> List[CheckResult]:
        rank = config.dim
        qhalf = max(config.q_order, config.k)
        factor_order = min(qhalf, 3)
        logger.info(f"lambda suite: rank {rank}, q-order {qhalf}/2")
        checks = [
            self.verify_leading_coefficients(rank, qhalf),
            self.verify_integrality(rank, qhalf),
            *self.verify_factorizations(rank, factor_order),
            self.verify_trivial_symbol_collapse(rank, factor_order),
            self.verify_symbol_congruence(),
            self.verify_theta2_congruence(rank, qhalf),
        ]
        if config.family is Family.EIGHT_K_PLUS_FOUR:
            checks.append(self.verify_cr(config.k, rank, qhalf))
        checks.append(self.verify_ch_compatibility(config.geometry(v_equals_tm=True)))
        return checks


@lru_cache(maxsize=None)
def _theta2_bundle(service: LambdaRingService, variant: BundleVariant, rank: int, qhalf: int) -> QSeries:
    return service._expand_theta2(variant, rank, qhalf)
