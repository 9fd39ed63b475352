"""
Randomized law checks for the exact arithmetic core.
"""
from fractions import Fraction
from typing import List, Optional

import numpy as np

from app.algebra.coefficients import CoeffDomain
from app.algebra.graded_poly import GradedPoly, GradedRing, poly_mul
from app.algebra.qseries import QSeries, qseries_mul
from app.algebra.serialization import dumps, loads
from app.algebra.taylor import ahat_root_coefficients, lhat_root_coefficients
from app.models.config import Config
from app.models.report import CheckResult
from app.utils.checks import Stopwatch, exact_check
from app.utils.logger import get_logger

logger = get_logger(__name__)

SAMPLE_TRIALS = 6


def sample_ring(bound: int = 12) -> GradedRing:
    return GradedRing.build([("ps_x2", 4), ("ps_x4", 8), ("c", 2)], bound)


class RingService:
    """Ring laws on seeded random sparse samples."""

    def __init__(self, trials: int = SAMPLE_TRIALS) -> None:
        self.trials = trials

    @staticmethod
    def random_poly(ring: GradedRing, rng: np.random.Generator, terms: int = 4,
                    constant: Optional[Fraction] = None) -> GradedPoly:
        monomials = ring.monomials_up_to(ring.bound)
        picks = rng.choice(len(monomials), size=min(terms, len(monomials)), replace=False)
        out = {}
        for index in picks:
            numerator = int(rng.integers(-6, 7))
            out[monomials[int(index)]] = Fraction(numerator, int(rng.integers(1, 5)))
        poly = GradedPoly(ring, out)
        if constant is not None:
            poly = poly - poly.constant_term() + constant
        return poly

    @staticmethod
    def random_qseries(ring: GradedRing, rng: np.random.Generator, order: int) -> QSeries:
        coeffs = {}
        for n in sorted(rng.choice(order + 1, size=3, replace=False)):
            coeffs[int(n)] = RingService.random_poly(ring, rng, terms=2)
        return QSeries(coeffs, order, CoeffDomain.POLY, ring)

    # --------------------------------------------------------------- checks

    def verify_poly_laws(self, rng: np.random.Generator) -> CheckResult:
        watch = Stopwatch()
        ring = sample_ring()
        failures = []
        for trial in range(self.trials):
            a, b, c = (self.random_poly(ring, rng) for _ in range(3))
            if poly_mul(a, b) != poly_mul(b, a):
                failures.append(f"trial {trial}: commutativity")
            if poly_mul(poly_mul(a, b), c) != poly_mul(a, poly_mul(b, c)):
                failures.append(f"trial {trial}: associativity")
            if poly_mul(a, b + c) != poly_mul(a, b) + poly_mul(a, c):
                failures.append(f"trial {trial}: distributivity")
        return exact_check("ring.poly_laws", "poly_mul is commutative, associative and distributive",
                           bool(failures), watch, {"trials": self.trials}, witness="; ".join(failures) or None)

    def verify_qseries_laws(self, rng: np.random.Generator) -> CheckResult:
        watch = Stopwatch()
        ring = sample_ring(8)
        failures = []
        for trial in range(self.trials):
            a, b, c = (self.random_qseries(ring, rng, 12) for _ in range(3))
            if qseries_mul(a, b) != qseries_mul(b, a):
                failures.append(f"trial {trial}: commutativity")
            if qseries_mul(qseries_mul(a, b), c) != qseries_mul(a, qseries_mul(b, c)):
                failures.append(f"trial {trial}: associativity")
            if qseries_mul(a, b + c) != qseries_mul(a, b) + qseries_mul(a, c):
                failures.append(f"trial {trial}: distributivity")
        return exact_check("ring.qseries_laws", "qseries_mul is commutative, associative and distributive",
                           bool(failures), watch, {"trials": self.trials}, witness="; ".join(failures) or None)

    def verify_truncation_coherence(self, rng: np.random.Generator) -> CheckResult:
        watch = Stopwatch()
        ring = sample_ring(12)
        failures = []
        for trial in range(self.trials):
            a, b = self.random_poly(ring, rng), self.random_poly(ring, rng)
            low = int(rng.integers(2, ring.bound))
            if (a * b).truncate(low) != a.truncate(low) * b.truncate(low):
                failures.append(f"trial {trial}: bound {low}")
        return exact_check("ring.truncation_coherence", "truncating a product equals the product of truncations",
                           bool(failures), watch, witness="; ".join(failures) or None)

    def verify_series_inverses(self, rng: np.random.Generator) -> CheckResult:
        watch = Stopwatch()
        ring = sample_ring()
        failures = []
        for trial in range(self.trials):
            nilpotent = self.random_poly(ring, rng, constant=Fraction(0))
            if nilpotent.series_exp().series_log() != nilpotent:
                failures.append(f"trial {trial}: log(exp(a))")
            unit = self.random_poly(ring, rng, constant=Fraction(int(rng.integers(1, 5))))
            if unit * unit.series_inv() != ring.one():
                failures.append(f"trial {trial}: a * inv(a)")
            series = self.random_qseries(ring, rng, 10) + 1
            if series.coefficient(0).constant_term() and (series * series.inv()) != QSeries.one(10, ring):
                failures.append(f"trial {trial}: qseries inverse")
        return exact_check("ring.series_inverses", "exp/log and inv are exact inverse pairs",
                           bool(failures), watch, witness="; ".join(failures) or None)

    def verify_division(self, rng: np.random.Generator) -> CheckResult:
        watch = Stopwatch()
        ring = sample_ring()
        c = ring.generator("c")
        failures = []
        for trial in range(self.trials):
            a = self.random_poly(ring, rng)
            quotient = (a * c).divide_by_generator("c")
            if quotient != a.truncate(ring.bound - 2):
                failures.append(f"trial {trial}: divide_by_generator")
            root = Fraction(int(rng.integers(-3, 4)))
            q, r = a.divide_by_linear("c", root)
            if q * (c - root) + r != a:
                failures.append(f"trial {trial}: divide_by_linear")
        return exact_check("ring.division", "exact division by a generator and by (g - root)",
                           bool(failures), watch, witness="; ".join(failures) or None)

    def verify_serialization(self, rng: np.random.Generator) -> CheckResult:
        watch = Stopwatch()
        ring = sample_ring()
        failures = []
        for trial in range(self.trials):
            for value in (self.random_poly(ring, rng), self.random_qseries(ring, rng, 16)):
                text = dumps(value)
                if dumps(loads(text)) != text:
                    failures.append(f"trial {trial}: {type(value).__name__}")
        return exact_check("ring.serialization", "serialize, parse and re-serialize is byte-identical",
                           bool(failures), watch, witness="; ".join(failures) or None)

    def verify_root_factors(self) -> CheckResult:
        """(a/2)/sinh(a/2) = 1 - a^2/24 + 7a^4/5760 and a/tanh(a/2) = 2 + a^2/6 - a^4/360."""
        watch = Stopwatch()
        ahat = ahat_root_coefficients(4)
        lhat = lhat_root_coefficients(4)
        expected_ahat = (Fraction(1), Fraction(0), Fraction(-1, 24), Fraction(0), Fraction(7, 5760))
        expected_lhat = (Fraction(2), Fraction(0), Fraction(1, 6), Fraction(0), Fraction(-1, 360))
        failed = tuple(ahat) != expected_ahat or tuple(lhat) != expected_lhat
        return exact_check("ring.root_factors", "per-root A-hat and L-hat Taylor coefficients",
                           failed, watch, witness=f"ahat={ahat}, lhat={lhat}" if failed else None)

    def run_checks(self, config: Config) -> List[CheckResult]:
        rng = np.random.default_rng(config.seed)
        logger.info(f"ring suite: {self.trials} trials, seed {config.seed}")
        return [
            self.verify_poly_laws(rng),
            self.verify_qseries_laws(rng),
            self.verify_truncation_coherence(rng),
            self.verify_series_inverses(rng),
            self.verify_division(rng),
            self.verify_serialization(rng),
            self.verify_root_factors(),
        ]
