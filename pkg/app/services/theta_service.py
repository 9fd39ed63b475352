"""
Jacobi theta functions, theta constants and the level-two modular forms
delta_1, epsilon_1, delta_2, epsilon_2.

Exact expansions live on the q^(1/8) grid with coefficients that are
truncated Taylor polynomials in z = pi*v, so no transcendental constant
ever enters: the derivative at v = 0 is always carried as theta'/pi.
Numeric evaluation uses the same truncated products with numpy.
"""
import math
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.algebra.coefficients import CoeffDomain
from app.algebra.graded_poly import GradedRing
from app.algebra.qseries import EIGHTHS_PER_HALF, EIGHTHS_PER_UNIT, QSeries
from app.algebra.taylor import cos_coefficients, sin_coefficients, univariate
from app.models.config import Config
from app.models.report import CheckResult
from app.utils.checks import Stopwatch, exact_check, numeric_check
from app.utils.exceptions import AlgebraError, NumericDomainError
from app.utils.logger import get_logger

logger = get_logger(__name__)

# Truncated products stop once the tail drops below this size
PRODUCT_TAIL = 1e-16
MAX_PRODUCT_TERMS = 20000
CONSISTENCY_TOLERANCE = 1e-10


class ThetaId(str, Enum):
    THETA = "theta"
    THETA1 = "theta1"
    THETA2 = "theta2"
    THETA3 = "theta3"

    @property
    def has_eighth_prefactor(self) -> bool:
        return self in (ThetaId.THETA, ThetaId.THETA1)

    @property
    def sign(self) -> int:
        """Sign in front of 2*cos(2z) inside the product."""
        return -1 if self in (ThetaId.THETA, ThetaId.THETA2) else 1


class ModularFormId(str, Enum):
    DELTA1 = "delta1"
    EPSILON1 = "epsilon1"
    DELTA2 = "delta2"
    EPSILON2 = "epsilon2"

    @property
    def weight(self) -> int:
        return 2 if self in (ModularFormId.DELTA1, ModularFormId.DELTA2) else 4


# Displayed leading coefficients, keyed by eighths
LEADING_TERMS: Dict[ModularFormId, Dict[int, Fraction]] = {
    ModularFormId.DELTA1: {0: Fraction(1, 4), 4: Fraction(0), 8: Fraction(6)},
    ModularFormId.EPSILON1: {0: Fraction(1, 16), 4: Fraction(0), 8: Fraction(-1)},
    ModularFormId.DELTA2: {0: Fraction(-1, 8), 4: Fraction(-3)},
    ModularFormId.EPSILON2: {0: Fraction(0), 4: Fraction(1)},
}

# Constant terms removed before the integrality check
INTEGRALITY_OFFSETS: Dict[ModularFormId, Fraction] = {
    ModularFormId.DELTA1: Fraction(1, 4),
    ModularFormId.EPSILON1: Fraction(1, 16),
    ModularFormId.DELTA2: Fraction(-1, 8),
    ModularFormId.EPSILON2: Fraction(0),
}


def z_ring(taylor_order: int) -> GradedRing:
    """Univariate Taylor ring in z = pi*v."""
    return GradedRing(("z",), (1,), taylor_order)


@lru_cache(maxsize=None)
def euler_product(q8: int, power: int = 1) -> QSeries:
    """prod_j (1 - q^j)^power truncated at q^(q8/8)."""
    result = QSeries.one(q8)
    j = 1
    while EIGHTHS_PER_UNIT * j <= q8:
        result = result * QSeries({0: 1, EIGHTHS_PER_UNIT * j: -1}, q8)
        j += 1
    return result ** power if power != 1 else result


@lru_cache(maxsize=None)
def _theta_series(theta_id: ThetaId, taylor_order: int, q8: int) -> QSeries:
    ring = z_ring(taylor_order)
    two_cos2z = univariate(ring, "z", cos_coefficients(taylor_order, Fraction(2))).scale(2 * theta_id.sign)
    one = ring.one()
    if theta_id.has_eighth_prefactor:
        inner = q8 - 1
        product = QSeries.one(inner, ring)
        j = 1
        while EIGHTHS_PER_UNIT * j <= inner:
            n = EIGHTHS_PER_UNIT * j
            product = product * QSeries({0: one, n: two_cos2z, 2 * n: one}, inner, CoeffDomain.POLY, ring)
            j += 1
        trig = sin_coefficients if theta_id is ThetaId.THETA else cos_coefficients
        prefactor = univariate(ring, "z", trig(taylor_order)).scale(2)
        return (product * euler_product(inner)).scale(prefactor).shift(1)
    product = QSeries.one(q8, ring)
    j = 1
    while EIGHTHS_PER_UNIT * j - EIGHTHS_PER_HALF <= q8:
        n = EIGHTHS_PER_UNIT * j - EIGHTHS_PER_HALF
        product = product * QSeries({0: one, n: two_cos2z, 2 * n: one}, q8, CoeffDomain.POLY, ring)
        j += 1
    return product * euler_product(q8)


@lru_cache(maxsize=None)
def _theta_constant(theta_id: ThetaId, q8: int) -> QSeries:
    if theta_id is ThetaId.THETA:
        return QSeries.zero(q8)
    if theta_id is ThetaId.THETA1:
        inner = q8 - 1
        product = QSeries.one(inner)
        j = 1
        while EIGHTHS_PER_UNIT * j <= inner:
            product = product * QSeries({0: 1, EIGHTHS_PER_UNIT * j: 1}, inner) ** 2
            j += 1
        return (product * euler_product(inner)).scale(2).shift(1)
    sign = -1 if theta_id is ThetaId.THETA2 else 1
    product = QSeries.one(q8)
    j = 1
    while EIGHTHS_PER_UNIT * j - EIGHTHS_PER_HALF <= q8:
        product = product * QSeries({0: 1, EIGHTHS_PER_UNIT * j - EIGHTHS_PER_HALF: sign}, q8) ** 2
        j += 1
    return product * euler_product(q8)


@lru_cache(maxsize=None)
def _modular_form(form_id: ModularFormId, q8: int) -> QSeries:
    t1, t2, t3 = (_theta_constant(t, q8) ** 4 for t in (ThetaId.THETA1, ThetaId.THETA2, ThetaId.THETA3))
    if form_id is ModularFormId.DELTA1:
        return (t2 + t3).scale(Fraction(1, 8))
    if form_id is ModularFormId.EPSILON1:
        return (t2 * t3).scale(Fraction(1, 16))
    if form_id is ModularFormId.DELTA2:
        return (t1 + t3).scale(Fraction(-1, 8))
    return (t1 * t3).scale(Fraction(1, 16))


def product_terms(q_abs: float, growth: float = 1.0) -> int:
    """Number of product factors J with |q|^(J - 1/2) * growth below the tail threshold."""
    if q_abs <= 0.0:
        return 1
    needed = (math.log(PRODUCT_TAIL) - math.log(max(growth, 1.0))) / math.log(q_abs) + 0.5
    return int(min(max(math.ceil(needed) + 1, 1), MAX_PRODUCT_TERMS))


def _q_power(tau: complex, exponent: Union[float, np.ndarray]) -> np.ndarray:
    return np.exp(2j * np.pi * tau * np.asarray(exponent))


def _check_tau(tau: complex) -> complex:
    tau = complex(tau)
    if tau.imag <= 0:
        raise NumericDomainError(f"tau = {tau} is not in the upper half plane")
    return tau


class ThetaService:
    """Exact and numeric theta functions plus their verification suite."""

    # ---------------------------------------------------------------- exact

    def theta_qexp(self, theta_id: ThetaId, taylor_order: int, q8: int) -> QSeries:
        """theta_id(v, tau) with Taylor polynomials in z = pi*v as q-coefficients."""
        if taylor_order < 1 or q8 < EIGHTHS_PER_UNIT:
            raise AlgebraError("theta expansion needs Z >= 1 and Q8 >= 8")
        return _theta_series(ThetaId(theta_id), taylor_order, q8)

    def theta_constant(self, theta_id: ThetaId, q8: int) -> QSeries:
        """theta_id(0, tau) from the z-free product."""
        return _theta_constant(ThetaId(theta_id), q8)

    def theta_prime_over_pi(self, q8: int) -> QSeries:
        """theta'(0, tau)/pi = 2 q^(1/8) prod (1 - q^j)^3."""
        if q8 < EIGHTHS_PER_UNIT:
            raise AlgebraError("theta'/pi needs Q8 >= 8")
        return euler_product(q8 - 1, 3).scale(2).shift(1)

    def modular_form_qexp(self, form_id: ModularFormId, q8: int) -> QSeries:
        return _modular_form(ModularFormId(form_id), q8)

    # -------------------------------------------------------------- numeric

    def numeric_theta(self, theta_id: ThetaId, v, tau: complex, terms: Optional[int] = None):
        """
        Truncated product value; ``v`` may be a scalar or a numpy array.

        Raises NumericDomainError when Im(tau) <= 0.
        """
        theta_id = ThetaId(theta_id)
        tau = _check_tau(tau)
        v_arr = np.asarray(v, dtype=complex)
        z = np.pi * v_arr
        if terms is None:
            spread = float(np.max(np.abs(z.imag))) if v_arr.size else 0.0
            terms = product_terms(abs(np.exp(2j * np.pi * tau)), math.exp(2.0 * spread))
        j = np.arange(1, terms + 1, dtype=float)
        euler = 1.0 - _q_power(tau, j)
        two_cos2z = 2.0 * np.cos(2.0 * z)[..., None]
        nome = _q_power(tau, j) if theta_id.has_eighth_prefactor else _q_power(tau, j - 0.5)
        factors = euler * (1.0 + theta_id.sign * two_cos2z * nome + nome * nome)
        value = np.prod(factors, axis=-1)
        if theta_id is ThetaId.THETA:
            value = 2.0 * _q_power(tau, 0.125) * np.sin(z) * value
        elif theta_id is ThetaId.THETA1:
            value = 2.0 * _q_power(tau, 0.125) * np.cos(z) * value
        return complex(value) if v_arr.ndim == 0 else value

    def numeric_theta_prime_over_pi(self, tau: complex, terms: Optional[int] = None) -> complex:
        tau = _check_tau(tau)
        terms = terms or product_terms(abs(np.exp(2j * np.pi * tau)))
        j = np.arange(1, terms + 1, dtype=float)
        return complex(2.0 * _q_power(tau, 0.125) * np.prod((1.0 - _q_power(tau, j)) ** 3))

    def numeric_modular_form(self, form_id: ModularFormId, tau: complex) -> complex:
        t1, t2, t3 = (self.numeric_theta(t, 0.0, tau) ** 4
                      for t in (ThetaId.THETA1, ThetaId.THETA2, ThetaId.THETA3))
        form_id = ModularFormId(form_id)
        if form_id is ModularFormId.DELTA1:
            return (t2 + t3) / 8.0
        if form_id is ModularFormId.EPSILON1:
            return t2 * t3 / 16.0
        if form_id is ModularFormId.DELTA2:
            return -(t1 + t3) / 8.0
        return t1 * t3 / 16.0

    # ---------------------------------------------------------- verification

    def verify_jacobi_identity(self, q8: int) -> CheckResult:
        watch = Stopwatch()
        product = (self.theta_constant(ThetaId.THETA1, q8)
                   * self.theta_constant(ThetaId.THETA2, q8)
                   * self.theta_constant(ThetaId.THETA3, q8))
        residual = self.theta_prime_over_pi(q8) - product
        return exact_check(
            "theta.jacobi_identity",
            "theta'(0,tau)/pi equals theta1(0,tau)*theta2(0,tau)*theta3(0,tau) as q-series",
            residual, watch, {"q8": q8},
        )

    def verify_leading_terms(self, q8: int) -> CheckResult:
        watch = Stopwatch()
        mismatches: List[str] = []
        for form_id, expected in LEADING_TERMS.items():
            series = self.modular_form_qexp(form_id, q8)
            for n, value in expected.items():
                if series.coefficient(n) != value:
                    mismatches.append(f"{form_id.value} q^({n}/8): {series.coefficient(n)} != {value}")
        return exact_check(
            "theta.modular_forms.leading_terms",
            "delta1 = 1/4 + 6q, epsilon1 = 1/16 - q, delta2 = -1/8 - 3q^(1/2), epsilon2 = q^(1/2) to leading order",
            bool(mismatches), watch, {"q8": q8}, witness="; ".join(mismatches) or None,
        )

    def verify_integrality(self, q8: int) -> CheckResult:
        watch = Stopwatch()
        offenders = [
            form_id.value for form_id, offset in INTEGRALITY_OFFSETS.items()
            if not (self.modular_form_qexp(form_id, q8) - offset).is_integral()
        ]
        return exact_check(
            "theta.modular_forms.integrality",
            "every coefficient of delta1-1/4, epsilon1-1/16, delta2+1/8 and epsilon2 is an integer",
            bool(offenders), watch, {"q8": q8}, witness=", ".join(offenders) or None,
        )

    def verify_parity(self, taylor_order: int, q8: int) -> CheckResult:
        """theta's Taylor coefficients are odd in z; the other three are even."""
        watch = Stopwatch()
        offenders: List[str] = []
        for theta_id in ThetaId:
            wanted = 1 if theta_id is ThetaId.THETA else 0
            for n, coefficient in self.theta_qexp(theta_id, taylor_order, q8).items():
                if any(exps[0] % 2 != wanted for exps in coefficient.terms):
                    offenders.append(f"{theta_id.value} q^({n}/8)")
                    break
            grid = 1 if theta_id.has_eighth_prefactor else 0
            step = EIGHTHS_PER_UNIT if theta_id.has_eighth_prefactor else EIGHTHS_PER_HALF
            if any((n - grid) % step for n in self.theta_qexp(theta_id, taylor_order, q8).exponents()):
                offenders.append(f"{theta_id.value} exponent grid")
        return exact_check(
            "theta.taylor_parity",
            "z-parity and q-exponent grid of the four theta expansions",
            bool(offenders), watch, {"taylor_order": taylor_order, "q8": q8},
            witness=", ".join(offenders) or None,
        )

    def verify_constants_agree(self, taylor_order: int, q8: int) -> CheckResult:
        """Setting z = 0 in theta_qexp reproduces the independently built theta constants."""
        watch = Stopwatch()
        offenders: List[str] = []
        for theta_id in ThetaId:
            at_zero = self.theta_qexp(theta_id, taylor_order, q8).map_coefficients(lambda c: c.constant_term())
            if at_zero != self.theta_constant(theta_id, q8):
                offenders.append(theta_id.value)
        return exact_check(
            "theta.constants_match_expansions",
            "theta expansions at z = 0 equal the theta constants",
            bool(offenders), watch, {"q8": q8}, witness=", ".join(offenders) or None,
        )

    def verify_exact_t_laws(self, taylor_order: int, q8: int) -> CheckResult:
        """
        tau -> tau+1 on exact series: theta and theta1 pick up exp(pi*i/4),
        theta2 and theta3 are exchanged.
        """
        watch = Stopwatch()
        offenders: List[str] = []
        expected = {
            ThetaId.THETA: (1, ThetaId.THETA),
            ThetaId.THETA1: (1, ThetaId.THETA1),
            ThetaId.THETA2: (0, ThetaId.THETA3),
            ThetaId.THETA3: (0, ThetaId.THETA2),
        }
        for theta_id, (phase, image) in expected.items():
            got_phase, shifted = self.theta_qexp(theta_id, taylor_order, q8).t_action()
            if got_phase != phase or shifted != self.theta_qexp(image, taylor_order, q8):
                offenders.append(theta_id.value)
        return exact_check(
            "theta.exact_t_laws",
            "theta(v,tau+1) = exp(pi i/4) theta, theta1 likewise, theta2 and theta3 exchanged",
            bool(offenders), watch, {"q8": q8}, witness=", ".join(offenders) or None,
        )

    def transformation_laws(self, tau: complex, v: complex) -> Dict[str, Tuple[complex, complex]]:
        """(lhs, rhs) of every T- and S-law at one sample point."""
        tau = _check_tau(tau)
        eighth = np.exp(1j * np.pi / 4)
        s_tau = -1.0 / tau
        root = np.sqrt(-1j * tau)
        gauss = np.exp(1j * np.pi * tau * v * v)
        th = self.numeric_theta
        laws = {
            "T.theta": (th(ThetaId.THETA, v, tau + 1), eighth * th(ThetaId.THETA, v, tau)),
            "T.theta1": (th(ThetaId.THETA1, v, tau + 1), eighth * th(ThetaId.THETA1, v, tau)),
            "T.theta2": (th(ThetaId.THETA2, v, tau + 1), th(ThetaId.THETA3, v, tau)),
            "T.theta3": (th(ThetaId.THETA3, v, tau + 1), th(ThetaId.THETA2, v, tau)),
            "S.theta": (th(ThetaId.THETA, v, s_tau), -1j * root * gauss * th(ThetaId.THETA, tau * v, tau)),
            "S.theta1": (th(ThetaId.THETA1, v, s_tau), root * gauss * th(ThetaId.THETA2, tau * v, tau)),
            "S.theta2": (th(ThetaId.THETA2, v, s_tau), root * gauss * th(ThetaId.THETA1, tau * v, tau)),
            "S.theta3": (th(ThetaId.THETA3, v, s_tau), root * gauss * th(ThetaId.THETA3, tau * v, tau)),
            "S.delta": (self.numeric_modular_form(ModularFormId.DELTA2, s_tau),
                        tau ** 2 * self.numeric_modular_form(ModularFormId.DELTA1, tau)),
            "S.epsilon": (self.numeric_modular_form(ModularFormId.EPSILON2, s_tau),
                          tau ** 4 * self.numeric_modular_form(ModularFormId.EPSILON1, tau)),
        }
        return {name: (complex(lhs), complex(rhs)) for name, (lhs, rhs) in laws.items()}

    def verify_transformation_laws(self, taus: Sequence[complex], v: complex, tol: float) -> List[CheckResult]:
        """One numeric check per law; residual |lhs - rhs| / (1 + |rhs|) over every tau sample."""
        watch = Stopwatch()
        per_law: Dict[str, List[Tuple[complex, float]]] = {}
        for tau in taus:
            for name, (lhs, rhs) in self.transformation_laws(tau, v).items():
                per_law.setdefault(name, []).append((tau, abs(lhs - rhs) / (1.0 + abs(rhs))))
        results = []
        for name, samples in sorted(per_law.items()):
            errors = [error for _, error in samples]
            worst_tau, worst = max(samples, key=lambda item: item[1])
            results.append(numeric_check(
                f"theta.transformation_law.{name}",
                f"numeric transformation law {name} at every tau sample",
                errors, all(error < tol for error in errors), watch,
                witness=f"tau={worst_tau}: residual {worst:.3e}",
                details={"v": str(v), "taus": [str(t) for t in taus]},
            ))
        return results

    def verify_numeric_consistency(self, taus: Sequence[complex], q8: int) -> CheckResult:
        """Exact theta constants evaluated at numeric q agree with the truncated products."""
        watch = Stopwatch()
        usable = [complex(t) for t in taus if abs(np.exp(2j * np.pi * complex(t))) <= 0.2]
        errors: List[float] = []
        witness = None
        for tau in usable:
            for theta_id in (ThetaId.THETA1, ThetaId.THETA2, ThetaId.THETA3):
                exact = self.theta_constant(theta_id, q8).evaluate_at_tau(tau)
                numeric = self.numeric_theta(theta_id, 0.0, tau)
                error = abs(exact - numeric) / (1.0 + abs(numeric))
                errors.append(error)
                if error >= CONSISTENCY_TOLERANCE and witness is None:
                    witness = f"{theta_id.value} at tau={tau}: {error:.3e}"
        return numeric_check(
            "theta.numeric_exact_consistency",
            "exact theta-constant expansions match numeric products for |q| <= 0.2",
            errors, bool(usable) and witness is None, watch,
            witness=witness or "no tau sample with |q| <= 0.2",
            details={"samples": len(usable), "q8": q8},
        )

    # ----------------------------------------------------------------- suite

    def run_checks(self, config: Config) -> List[CheckResult]:
        q8 = EIGHTHS_PER_UNIT * config.theta_q_order
        taylor_order = config.effective_taylor_order
        logger.info(f"theta suite: q-order {config.theta_q_order}, Taylor order {taylor_order}")
        taus = config.taus
        checks = [
            self.verify_jacobi_identity(q8),
            self.verify_leading_terms(q8),
            self.verify_integrality(q8),
            self.verify_parity(taylor_order, q8),
            self.verify_constants_agree(taylor_order, q8),
            self.verify_exact_t_laws(taylor_order, q8),
            self.verify_numeric_consistency(list(taus) + [complex(0.1, 0.6)], q8),
        ]
        checks.extend(self.verify_transformation_laws(taus, complex(0.11, -0.05), config.tolerance))
        return checks
