"""
Characteristic-form calculus in root coordinates.

All tangent and V dependence is carried by the even power sums
ps_x{2m} = sum_j a_j^(2m) and ps_y{2m} = sum_v b_v^(2m) of the formal roots
(a = 2*pi*i*x, weight 2 each), plus the Euler form c of xi. Every per-root
factor is even, so a multiplicative class over n roots is
const^n * exp(sum_m lambda_m * ps{2m}).

Explicit-root coordinates keep individual root generators instead; they
exist for the brute-force and theta-route cross checks.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.algebra.coefficients import CoeffDomain
from app.algebra.graded_poly import GradedPoly, GradedRing
from app.algebra.qseries import EIGHTHS_PER_HALF, EIGHTHS_PER_UNIT, QSeries
from app.algebra.taylor import (
    ahat_root_coefficients,
    cosh_coefficients,
    even_log_coefficients,
    lhat_root_coefficients,
    two_cosh_half_coefficients,
    univariate,
)
from app.models.config import Config
from app.models.geometry import GeometrySpec
from app.models.report import CheckResult
from app.services.theta_service import ThetaId, ThetaService, z_ring
from app.utils.checks import Stopwatch, exact_check, numeric_check
from app.utils.exceptions import AlgebraError
from app.utils.logger import get_logger

logger = get_logger(__name__)

CAUCHY_POINTS = 64
# Fraction of the distance to the nearest theta zero that the sampled circle may reach
CAUCHY_REACH = 0.5
CAUCHY_RADIUS_MAX = 1.0

# Elements (a, b, c, d) acting by tau -> (a tau + b)/(c tau + d)
GAMMA0_GENERATORS = {"T": (1, 1, 0, 1), "ST2ST": (-1, -1, 2, 1), "identity": (1, 0, 0, 1)}
GAMMA_UPPER_GENERATORS = {"STS": (-1, 0, 1, -1), "T2STS": (1, -2, 1, -1), "identity": (1, 0, 0, 1)}


class Which(int, Enum):
    ONE = 1
    TWO = 2


@dataclass(frozen=True)
class RootCoordinates:
    """Generator table and power-sum accessors for one geometry."""

    ring: GradedRing
    tm_count: int
    v_count: int
    explicit: bool = False
    xi_trivial: bool = False
    v_alias: bool = False
    p1_identified: bool = False
    _cache: Dict[Tuple[str, int], GradedPoly] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    @classmethod
    def for_spec(cls, spec: GeometrySpec, tm_count: Optional[int] = None) -> "RootCoordinates":
        """
        Power-sum coordinates, or explicit roots when ``spec.tm_roots`` is set.

        ``tm_count`` overrides the number of tangent roots in power-sum mode,
        which only changes the rank constants.
        """
        bound = spec.dim
        if spec.explicit:
            gens = [(f"x{j}", 2) for j in range(1, spec.tm_root_count + 1)]
            if not spec.v_equals_tm:
                gens += [(f"y{v}", 2) for v in range(1, spec.l + 1)]
            if not spec.xi_trivial:
                gens.append(("c", 2))
            return cls(GradedRing.build(gens, bound), spec.tm_root_count, spec.l, True,
                       spec.xi_trivial, spec.v_equals_tm, False)
        top = bound // 4
        gens = [(f"ps_x{2 * m}", 4 * m) for m in range(1, top + 1)]
        if not spec.v_equals_tm:
            first = 2 if spec.p1_identified else 1
            gens += [(f"ps_y{2 * m}", 4 * m) for m in range(first, min(spec.l, top) + 1)]
        if not spec.xi_trivial:
            gens.append(("c", 2))
        return cls(GradedRing.build(gens, bound), tm_count or spec.tm_root_count, spec.l, False,
                   spec.xi_trivial, spec.v_equals_tm, spec.p1_identified and not spec.v_equals_tm)

    # --------------------------------------------------------------- names

    @property
    def tm_names(self) -> List[str]:
        return [f"x{j}" for j in range(1, self.tm_count + 1)] if self.explicit else []

    @property
    def v_names(self) -> List[str]:
        if not self.explicit:
            return []
        if self.v_alias:
            return self.tm_names
        return [f"y{v}" for v in range(1, self.v_count + 1)]

    # ---------------------------------------------------------- power sums

    def ps_tm(self, m: int) -> GradedPoly:
        """sum over tangent roots of a^(2m)."""
        if 4 * m > self.ring.bound:
            return self.ring.zero()
        if self.explicit:
            return self._explicit_sum(self.tm_names, m)
        return self.ring.generator(f"ps_x{2 * m}")

    def ps_v(self, m: int) -> GradedPoly:
        """sum over the roots of V of b^(2m); Newton-reduced above the rank."""
        if self.v_alias:
            return self.ps_tm(m)
        if 4 * m > self.ring.bound:
            return self.ring.zero()
        if self.explicit:
            return self._explicit_sum(self.v_names, m)
        if m == 1 and self.p1_identified:
            return self.ring.generator("ps_x2")
        if m <= self.v_count:
            return self.ring.generator(f"ps_y{2 * m}")
        key = ("newton", m)
        if key not in self._cache:
            self._cache[key] = self._newton_reduce(m)
        return self._cache[key]

    def _explicit_sum(self, names: Sequence[str], m: int) -> GradedPoly:
        total = self.ring.zero()
        for name in names:
            total = total + self.ring.monomial({name: 2 * m})
        return total

    def _newton_reduce(self, m: int) -> GradedPoly:
        """p_m = sum_{i=1..l} (-1)^(i-1) e_i p_(m-i) for l squared roots and m > l."""
        rank = self.v_count
        elementary: List[GradedPoly] = [self.ring.one()]
        for i in range(1, rank + 1):
            acc = self.ring.zero()
            for j in range(1, i + 1):
                term = elementary[i - j] * self.ps_v(j)
                acc = acc + (term if j % 2 else -term)
            elementary.append(acc.scale(Fraction(1, i)))
        result = self.ring.zero()
        for i in range(1, rank + 1):
            previous = self.ps_v(m - i) if m - i > 0 else self.ring.constant(rank)
            term = elementary[i] * previous
            result = result + (term if i % 2 else -term)
        return result

    def c(self) -> GradedPoly:
        return self.ring.zero() if self.xi_trivial else self.ring.generator("c")

    # ------------------------------------------------- Adams characters

    def adams_tm(self, j: int) -> GradedPoly:
        """ch(psi^j of the reduced tangent bundle) = sum_p 2 j^(2p) ps_x{2p}/(2p)!."""
        return self._adams("tm", j, self.ps_tm)

    def adams_v(self, j: int) -> GradedPoly:
        return self._adams("v", j, self.ps_v)

    def adams_xi(self, j: int) -> GradedPoly:
        """e^(jc) + e^(-jc) - 2."""
        key = ("xi", j)
        if key not in self._cache:
            if self.xi_trivial:
                value = self.ring.zero()
            else:
                coefficients = [2 * x for x in cosh_coefficients(self.ring.bound // 2, Fraction(j))]
                coefficients[0] = Fraction(0)
                value = univariate(self.ring, "c", coefficients)
            self._cache[key] = value
        return self._cache[key]

    def _adams(self, tag: str, j: int, sums) -> GradedPoly:
        key = (tag, j)
        if key not in self._cache:
            total = self.ring.zero()
            p = 1
            while 4 * p <= self.ring.bound:
                total = total + sums(p).scale(Fraction(2 * j ** (2 * p), factorial(2 * p)))
                p += 1
            self._cache[key] = total
        return self._cache[key]


def _multiplicative(coords: RootCoordinates, per_root: Tuple[Fraction, ...], sums, count: int) -> GradedPoly:
    c0, lambdas = even_log_coefficients(per_root)
    log = coords.ring.zero()
    for m, lam in enumerate(lambdas, start=1):
        if 4 * m > coords.ring.bound:
            break
        if lam:
            log = log + sums(m).scale(lam)
    return log.series_exp().scale(c0 ** count)


def cauchy_radius(roots: Dict[str, np.ndarray], tau: complex) -> float:
    """
    Radius in t for sampling the theta quotients at t*root.

    The zeros of the four thetas nearest the origin lie at distance at least
    min(1/2, Im(tau)/2), so every scaled root stays within CAUCHY_REACH of that.
    """
    largest = max(float(np.max(np.abs(values), initial=0.0)) for values in roots.values())
    if largest == 0.0:
        return CAUCHY_RADIUS_MAX
    clearance = min(0.5, complex(tau).imag / 2.0)
    return min(CAUCHY_RADIUS_MAX, CAUCHY_REACH * clearance / largest)


def _root_order(coords: RootCoordinates) -> int:
    order = coords.ring.bound // 2
    return order + (order % 2)


class CharFormService:
    """Characteristic forms, Theta characters and the P series."""

    def __init__(self, theta_service: Optional[ThetaService] = None) -> None:
        self.theta_service = theta_service or ThetaService()

    # ------------------------------------------------------------- forms

    def coordinates(self, spec: GeometrySpec) -> RootCoordinates:
        return _coordinates(spec)

    def ahat(self, coords: RootCoordinates) -> GradedPoly:
        """prod_j (a_j/2)/sinh(a_j/2)."""
        return _multiplicative(coords, ahat_root_coefficients(_root_order(coords)), coords.ps_tm, coords.tm_count)

    def lhat(self, coords: RootCoordinates) -> GradedPoly:
        """prod_j a_j/tanh(a_j/2); constant term 2^(number of roots)."""
        return _multiplicative(coords, lhat_root_coefficients(_root_order(coords)), coords.ps_tm, coords.tm_count)

    def dethalf_2cosh(self, coords: RootCoordinates) -> GradedPoly:
        """prod_v 2cosh(b_v/2); constant term 2^l."""
        return _multiplicative(coords, two_cosh_half_coefficients(_root_order(coords)), coords.ps_v, coords.v_count)

    def cosh_half_c(self, coords: RootCoordinates) -> GradedPoly:
        if coords.xi_trivial:
            return coords.ring.one()
        return univariate(coords.ring, "c", cosh_coefficients(coords.ring.bound // 2, Fraction(1, 2)))

    def ch_tangent(self, coords: RootCoordinates) -> GradedPoly:
        return coords.adams_tm(1) + 2 * coords.tm_count

    def ch_xi(self, coords: RootCoordinates) -> GradedPoly:
        """e^c + e^(-c)."""
        return coords.adams_xi(1) + 2

    # ---------------------------------------------------- Theta characters

    def ch_theta_log(self, which: Which, coords: RootCoordinates, qhalf: int, xi_factors: bool = True) -> QSeries:
        """Logarithm of ch(Theta_which) as a q-series with zero constant term."""
        which = Which(which)
        q8 = EIGHTHS_PER_HALF * qhalf
        ring = coords.ring
        log: Dict[int, GradedPoly] = {}

        def add(eighths: int, value: GradedPoly) -> None:
            if eighths <= q8 and value:
                log[eighths] = log[eighths] + value if eighths in log else value

        def reduced_v(j: int) -> GradedPoly:
            base = coords.adams_v(j)
            return base - coords.adams_xi(j).scale(2) if xi_factors else base

        for j in range(1, q8 // EIGHTHS_PER_HALF + 1):
            sign = 1 if j % 2 else -1
            inv_j = Fraction(1, j)
            tangent, v_part, xi = coords.adams_tm(j), reduced_v(j), coords.adams_xi(j)
            # symmetric powers of the reduced tangent bundle at q^n
            for n in range(1, q8 // (EIGHTHS_PER_UNIT * j) + 1):
                add(EIGHTHS_PER_UNIT * n * j, tangent.scale(inv_j))
            if which is Which.TWO:
                for m in range(1, q8 + 1):
                    exponent = j * (EIGHTHS_PER_UNIT * m - EIGHTHS_PER_HALF)
                    if exponent > q8:
                        break
                    add(exponent, v_part.scale(-inv_j))
                    if xi_factors:
                        add(exponent, xi.scale(sign * inv_j))
                if xi_factors:
                    for s in range(1, q8 // (EIGHTHS_PER_UNIT * j) + 1):
                        add(EIGHTHS_PER_UNIT * s * j, xi.scale(sign * inv_j))
            else:
                for m in range(1, q8 // (EIGHTHS_PER_UNIT * j) + 1):
                    add(EIGHTHS_PER_UNIT * m * j, v_part.scale(sign * inv_j))
                if xi_factors:
                    for r in range(1, q8 + 1):
                        exponent = j * (EIGHTHS_PER_UNIT * r - EIGHTHS_PER_HALF)
                        if exponent > q8:
                            break
                        add(exponent, xi.scale(sign * inv_j))
                        add(exponent, xi.scale(-inv_j))
        return QSeries(log, q8, CoeffDomain.POLY, ring)

    def ch_theta(self, which: Which, coords: RootCoordinates, qhalf: int, xi_factors: bool = True) -> QSeries:
        """
        ch(Theta_1) or ch(Theta_2) as a q^(1/2)-series of forms.

        ``xi_factors=False`` drops the three xi factor families and the -2xi
        correction of V, leaving the untwisted series.
        """
        return _ch_theta(self, Which(which), coords, qhalf, xi_factors)

    def p_series(self, which: Which, coords: RootCoordinates, qhalf: int) -> QSeries:
        """P_1 or P_2: top-weight part of each q-coefficient of the full product."""
        top = coords.ring.bound
        full = self.full_product(which, coords, qhalf)
        return full.map_coefficients(lambda c: c.weight_component(top), ring=coords.ring)

    def full_product(self, which: Which, coords: RootCoordinates, qhalf: int) -> QSeries:
        """A-hat det^(1/2)(2cosh) cosh^-2(c/2) ch(Theta_1), or A-hat ch(Theta_2) cosh(c/2)."""
        which = Which(which)
        if which is Which.ONE:
            prefactor = self.ahat(coords) * self.dethalf_2cosh(coords) * self.cosh_half_c(coords).series_inv() ** 2
        else:
            prefactor = self.ahat(coords) * self.cosh_half_c(coords)
        return self.ch_theta(which, coords, qhalf).scale(prefactor)

    # ---------------------------------------------------------- theta route

    def _normalized_theta(self, theta_id: ThetaId, taylor_order: int, q8: int) -> QSeries:
        """theta_id(z)/theta_id(0) in the univariate z ring."""
        if theta_id.has_eighth_prefactor:
            series = self.theta_service.theta_qexp(theta_id, taylor_order, q8 + 1).shift(-1)
            constant = self.theta_service.theta_constant(theta_id, q8 + 1).shift(-1)
        else:
            series = self.theta_service.theta_qexp(theta_id, taylor_order, q8)
            constant = self.theta_service.theta_constant(theta_id, q8)
        return series * constant.inv()

    def _x_factor(self, taylor_order: int, q8: int) -> QSeries:
        """x theta'(0)/theta(x) written in z = pi*x."""
        ring = z_ring(taylor_order)
        theta = self.theta_service.theta_qexp(ThetaId.THETA, taylor_order + 1, q8 + 1).shift(-1)
        over_z = theta.map_coefficients(lambda c: c.divide_by_generator("z"), ring=ring)
        prime = self.theta_service.theta_prime_over_pi(q8 + 1).shift(-1)
        return over_z.inv() * prime

    def theta_route_product(self, which: Which, coords: RootCoordinates, qhalf: int) -> QSeries:
        """
        The theta-quotient product for P_which over explicit roots, with each
        generator read as z = pi*a for the root a; P_1 carries the factor 2^l.
        """
        if not coords.explicit:
            raise AlgebraError("the theta route needs explicit-root coordinates")
        which = Which(which)
        q8 = EIGHTHS_PER_HALF * qhalf
        taylor_order = coords.ring.bound // 2
        target = coords.ring
        x_factor = self._x_factor(taylor_order, q8)
        norm = {t: self._normalized_theta(t, taylor_order, q8) for t in (ThetaId.THETA1, ThetaId.THETA2, ThetaId.THETA3)}
        v_theta = norm[ThetaId.THETA1] if which is Which.ONE else norm[ThetaId.THETA2]
        if which is Which.ONE:
            u_factor = norm[ThetaId.THETA1].inv() ** 2 * norm[ThetaId.THETA3] * norm[ThetaId.THETA2]
        else:
            u_factor = norm[ThetaId.THETA2].inv() ** 2 * norm[ThetaId.THETA3] * norm[ThetaId.THETA1]

        def place(series: QSeries, name: str) -> QSeries:
            image = {"z": target.generator(name)}
            return series.map_coefficients(lambda c: c.substitute(image, target), ring=target)

        product = QSeries.one(q8, target)
        for name in coords.tm_names:
            product = product * place(x_factor, name)
        for name in coords.v_names:
            product = product * place(v_theta, name)
        if not coords.xi_trivial:
            product = product * place(u_factor, "c")
        if which is Which.ONE:
            product = product.scale(2 ** coords.v_count)
        return product

    # ------------------------------------------------------------ checks

    def verify_theta_route(self, spec: GeometrySpec, qhalf: int) -> List[CheckResult]:
        """Bundle route equals theta route after a = 2iz, i.e. weight-w terms scaled by (-4)^(w/4)."""
        coords = self.coordinates(spec)
        results = []
        for which in Which:
            watch = Stopwatch()
            bundle = self.full_product(which, coords, qhalf).map_coefficients(
                lambda c: c.map_coefficients(lambda w, e, value: value * Fraction(-4) ** (w // 4)),
                ring=coords.ring,
            )
            residual = self.theta_route_product(which, coords, qhalf) - bundle
            results.append(exact_check(
                f"charforms.theta_route.P{which.value}",
                f"P{which.value} from Chern characters equals the theta-quotient product",
                residual, watch, {"spec": spec.label(), "qhalf": qhalf},
            ))
        return results

    def numeric_p_value(self, which: Which, roots: Dict[str, np.ndarray], tau: complex, degree: int) -> complex:
        """Top-degree coefficient of the numeric theta-route product, by Cauchy sampling in a scale t."""
        theta = self.theta_service
        which = Which(which)
        t = cauchy_radius(roots, tau) * np.exp(2j * np.pi * np.arange(CAUCHY_POINTS) / CAUCHY_POINTS)
        x = t[:, None] * roots["x"][None, :]
        y = t[:, None] * roots["y"][None, :]
        u = t * roots["u"]
        prime = np.pi * theta.numeric_theta_prime_over_pi(tau)
        value = np.prod(x * prime / theta.numeric_theta(ThetaId.THETA, x, tau), axis=1)
        v_id = ThetaId.THETA1 if which is Which.ONE else ThetaId.THETA2
        value = value * np.prod(theta.numeric_theta(v_id, y, tau) / theta.numeric_theta(v_id, 0.0, tau), axis=1)

        def ratio(theta_id: ThetaId):
            return theta.numeric_theta(theta_id, u, tau) / theta.numeric_theta(theta_id, 0.0, tau)

        if which is Which.ONE:
            value = value * ratio(ThetaId.THETA3) * ratio(ThetaId.THETA2) / ratio(ThetaId.THETA1) ** 2
            value = value * 2 ** len(roots["y"])
        else:
            value = value * ratio(ThetaId.THETA3) * ratio(ThetaId.THETA1) / ratio(ThetaId.THETA2) ** 2
        return complex(np.mean(value * t ** (-degree)))

    def sample_roots(self, spec: GeometrySpec, seed: int) -> Dict[str, np.ndarray]:
        """Small nonzero real roots with sum x^2 = sum y^2 (first Pontrjagin forms agree)."""
        rng = np.random.default_rng(seed)
        count = spec.tm_root_count
        x = rng.uniform(0.1, 0.2, count) * rng.choice([-1.0, 1.0], count)
        if spec.v_equals_tm:
            y = x.copy()
        else:
            y = rng.uniform(0.1, 0.2, spec.l) * rng.choice([-1.0, 1.0], spec.l)
            y = y * np.sqrt(np.sum(x ** 2) / np.sum(y ** 2))
        u = np.array(0.0) if spec.xi_trivial else np.array(rng.uniform(0.1, 0.2))
        return {"x": x, "y": y, "u": u}

    def verify_modularity_numeric(self, spec: GeometrySpec, taus: Sequence[complex], tol: float,
                                  seed: int = 0) -> List[CheckResult]:
        """
        Numeric modularity of P_1 over Gamma_0(2) and P_2 over Gamma^0(2),
        plus P_1(-1/tau) = 2^l tau^w P_2(tau) with w = dim/2.
        """
        roots = self.sample_roots(spec, seed)
        weight = spec.modular_weight
        degree = spec.dim // 2
        values: Dict[Tuple[int, complex], complex] = {}

        def p_at(which: Which, tau: complex) -> complex:
            key = (which.value, tau)
            if key not in values:
                values[key] = self.numeric_p_value(which, roots, tau, degree)
            return values[key]

        results: List[CheckResult] = []
        groups = ((Which.ONE, GAMMA0_GENERATORS), (Which.TWO, GAMMA_UPPER_GENERATORS))
        for which, generators in groups:
            for name, (a, b, c, d) in generators.items():
                watch = Stopwatch()
                errors: List[float] = []
                ratios: List[complex] = []
                witness = None
                for tau in taus:
                    tau = complex(tau)
                    image = (a * tau + b) / (c * tau + d)
                    scale = (c * tau + d) ** weight
                    lhs, base = p_at(which, image), p_at(which, tau)
                    ratio = lhs / (scale * base)
                    ratios.append(ratio)
                    error = abs(abs(lhs) - abs(scale * base)) / abs(scale * base)
                    errors.append(error)
                    if not error < tol and witness is None:
                        witness = f"|P(g tau)| mismatch at tau={tau}: {error:.3e}"
                for tau, ratio in zip(taus[1:], ratios[1:]):
                    error = abs(ratio - ratios[0]) / abs(ratios[0])
                    errors.append(error)
                    if not error < tol and witness is None:
                        witness = f"character not constant at tau={tau}: {error:.3e}"
                if name == "identity":
                    errors.extend(abs(ratio - 1.0) for ratio in ratios)
                passed = all(error < tol for error in errors)
                results.append(numeric_check(
                    f"charforms.modularity.P{which.value}.{name}",
                    f"P{which.value} transforms with weight {weight} under {name}",
                    errors, passed, watch, witness=witness or "residual above tolerance",
                    details={"spec": spec.label(), "character": [str(complex(round(r.real, 10), round(r.imag, 10)))
                                                                 for r in ratios]},
                ))
        watch = Stopwatch()
        errors = []
        witness = None
        factor = 2 ** spec.l
        for tau in taus:
            tau = complex(tau)
            lhs = p_at(Which.ONE, -1.0 / tau)
            rhs = factor * tau ** weight * p_at(Which.TWO, tau)
            error = abs(lhs - rhs) / abs(rhs)
            errors.append(error)
            if not error < tol and witness is None:
                witness = f"tau={tau}: {error:.3e}"
        results.append(numeric_check(
            "charforms.modularity.S_relation",
            f"P1(-1/tau) = 2^l tau^{weight} P2(tau)",
            errors, all(error < tol for error in errors), watch, witness=witness,
            details={"spec": spec.label()},
        ))
        return results

    def verify_brute_force(self, spec: GeometrySpec, qhalf: int) -> CheckResult:
        """
        Explicit-root products against the power-sum pipeline pushed to the
        explicit roots, for the multiplicative classes and each ch(Theta)
        q-coefficient.
        """
        watch = Stopwatch()
        explicit = self.coordinates(spec)
        if not explicit.explicit:
            raise AlgebraError("brute-force comparison needs explicit roots")
        power_sums = RootCoordinates.for_spec(
            spec.model_copy(update={"tm_roots": None, "p1_identified": False}), tm_count=explicit.tm_count
        )
        target = explicit.ring
        mapping: Dict[str, GradedPoly] = {}
        for name, weight in zip(power_sums.ring.names, power_sums.ring.weights):
            if name.startswith("ps_x"):
                mapping[name] = explicit.ps_tm(weight // 4)
            elif name.startswith("ps_y"):
                mapping[name] = explicit.ps_v(weight // 4)

        def push(poly: GradedPoly) -> GradedPoly:
            return poly.substitute(mapping, target)

        order = _root_order(explicit)

        def direct(coefficients, names) -> GradedPoly:
            total = target.one()
            for name in names:
                total = total * univariate(target, name, list(coefficients))
            return total

        offenders: List[str] = []
        pairs = [
            ("ahat", push(self.ahat(power_sums)), direct(ahat_root_coefficients(order), explicit.tm_names)),
            ("lhat", push(self.lhat(power_sums)), direct(lhat_root_coefficients(order), explicit.tm_names)),
            ("dethalf", push(self.dethalf_2cosh(power_sums)),
             direct(two_cosh_half_coefficients(order), explicit.v_names)),
            ("ch_tangent", push(self.ch_tangent(power_sums)),
             sum((direct(_two_cosh(order), [name]) for name in explicit.tm_names), target.zero())),
        ]
        for which in Which:
            ps_series = self.ch_theta(which, power_sums, qhalf)
            ex_series = self.ch_theta(which, explicit, qhalf)
            for n in range(ps_series.order + 1):
                pairs.append((f"ch_theta{which.value} q^({n}/8)", push(ps_series.coefficient(n)),
                              ex_series.coefficient(n)))
        for label, left, right in pairs:
            if left != right:
                offenders.append(f"{label}: {(left - right).leading_terms()}")
        return exact_check(
            "charforms.brute_force",
            "power-sum pipeline agrees with explicit-root products",
            bool(offenders), watch, {"spec": spec.label(), "qhalf": qhalf},
            witness="; ".join(offenders[:3]) or None,
        )

    def verify_ahat_lhat_factorization(self, spec: GeometrySpec) -> CheckResult:
        """A-hat * det^(1/2)(2cosh) = L-hat when V = TM."""
        watch = Stopwatch()
        coords = self.coordinates(spec.model_copy(update={"v_equals_tm": True, "l": spec.tm_root_count,
                                                          "p1_identified": False}))
        residual = self.ahat(coords) * self.dethalf_2cosh(coords) - self.lhat(coords)
        return exact_check(
            "charforms.ahat_dethalf_equals_lhat",
            "A-hat times det^(1/2)(2cosh) equals L-hat for V = TM",
            residual, watch, {"dim": spec.dim},
        )

    def verify_xi_trivial_reduction(self, spec: GeometrySpec, qhalf: int) -> CheckResult:
        """Setting c = 0 in ch(Theta_i) gives the series without the xi factor families."""
        watch = Stopwatch()
        general = self.coordinates(spec.model_copy(update={"xi_trivial": False}))
        trivial = self.coordinates(spec.model_copy(update={"xi_trivial": True}))
        residual = None
        for which in Which:
            reduced = self.ch_theta(which, general, qhalf).map_coefficients(
                lambda c: c.substitute({"c": 0}, trivial.ring), ring=trivial.ring
            )
            difference = reduced - self.ch_theta(which, trivial, qhalf, xi_factors=False)
            if difference:
                residual = difference
                break
        return exact_check(
            "charforms.xi_trivial_reduction",
            "ch(Theta_i) at c = 0 equals the untwisted series",
            residual, watch, {"spec": spec.label(), "qhalf": qhalf},
        )

    def verify_leading_coefficient(self, spec: GeometrySpec, qhalf: int) -> CheckResult:
        """q^0 of ch(Theta_i) is 1; with V = TM the q^(1/2) coefficient of ch(Theta_2) is -ch(T) + 3ch(xi) + dim - 6."""
        watch = Stopwatch()
        coords = self.coordinates(spec.model_copy(update={"v_equals_tm": True, "l": spec.tm_root_count,
                                                          "p1_identified": False}))
        offenders = [f"ch_theta{w.value} q^0" for w in Which
                     if self.ch_theta(w, coords, qhalf).coefficient(0) != coords.ring.one()]
        expected = (spec.dim - 6) - self.ch_tangent(coords) + self.ch_xi(coords).scale(3)
        got = self.ch_theta(Which.TWO, coords, qhalf).coefficient(EIGHTHS_PER_HALF)
        if got != expected:
            offenders.append(f"q^(1/2): {(got - expected).leading_terms()}")
        return exact_check(
            "charforms.theta2_first_coefficient",
            "ch(Theta_2) = 1 + (-ch(T) + 3 ch(xi) + dim - 6) q^(1/2) + ... for V = TM",
            bool(offenders), watch, {"dim": spec.dim}, witness="; ".join(offenders) or None,
        )

    # ------------------------------------------------------------- suite

    def run_checks(self, config: Config) -> List[CheckResult]:
        spec = config.geometry()
        qhalf = config.q_order
        logger.info(f"charforms suite: {spec.label()}, q-order {qhalf}/2")
        small = GeometrySpec(k=min(config.k, 1), family=config.family, l=1, tm_roots=2, p1_identified=False)
        brute = GeometrySpec(k=min(config.k, 1), family=config.family, l=2, tm_roots=3, p1_identified=False)
        checks = [
            self.verify_ahat_lhat_factorization(spec),
            self.verify_xi_trivial_reduction(spec, min(qhalf, 4)),
            self.verify_leading_coefficient(spec, 2),
            self.verify_brute_force(brute, 2),
        ]
        checks.extend(self.verify_theta_route(small, 2))
        checks.extend(self.verify_modularity_numeric(spec, config.taus, config.tolerance, config.seed))
        return checks


def _two_cosh(order: int) -> Tuple[Fraction, ...]:
    return tuple(2 * c for c in cosh_coefficients(order))


@lru_cache(maxsize=None)
def _coordinates(spec: GeometrySpec) -> RootCoordinates:
    return RootCoordinates.for_spec(spec)


@lru_cache(maxsize=None)
def _ch_theta(service: CharFormService, which: Which, coords: RootCoordinates, qhalf: int,
              xi_factors: bool) -> QSeries:
    return service.ch_theta_log(which, coords, qhalf, xi_factors).exp()
