"""
Sparse weighted-graded polynomials truncated at a total-weight bound.

A ``GradedRing`` fixes the generator table (names and positive weights) and
the bound W. A ``GradedPoly`` maps exponent vectors to nonzero exact
coefficients; terms whose total weight exceeds W are never stored, so the
ring is the quotient of the polynomial ring by everything above weight W.
All values are immutable after construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from operator import add
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from app.algebra.coefficients import to_fraction
from app.utils.exceptions import AlgebraError

Exponents = Tuple[int, ...]


@dataclass(frozen=True)
class GradedRing:
    """Generator table plus truncation bound."""

    names: Tuple[str, ...]
    weights: Tuple[int, ...]
    bound: int
    _index: Dict[str, int] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.names) != len(self.weights):
            raise AlgebraError("generator names and weights differ in length")
        if len(set(self.names)) != len(self.names):
            raise AlgebraError(f"duplicate generator names in {self.names}")
        if any(w <= 0 for w in self.weights):
            raise AlgebraError("generator weights must be positive")
        if self.bound < 0:
            raise AlgebraError("truncation bound must be non-negative")
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(self.names)})

    @classmethod
    def build(cls, generators: Iterable[Tuple[str, int]], bound: int) -> "GradedRing":
        pairs = list(generators)
        return cls(tuple(n for n, _ in pairs), tuple(w for _, w in pairs), bound)

    @property
    def rank(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlgebraError(f"generator '{name}' not in ring {self.names}") from None

    def has(self, name: str) -> bool:
        return name in self._index

    def weight_of(self, exponents: Exponents) -> int:
        return sum(e * w for e, w in zip(exponents, self.weights))

    def with_bound(self, bound: int) -> "GradedRing":
        return GradedRing(self.names, self.weights, bound)

    @property
    def unit(self) -> Exponents:
        return (0,) * len(self.names)

    def zero(self) -> "GradedPoly":
        return GradedPoly(self, {})

    def one(self) -> "GradedPoly":
        return self.constant(1)

    def constant(self, value: Any) -> "GradedPoly":
        return GradedPoly(self, {self.unit: value})

    def generator(self, name: str) -> "GradedPoly":
        exps = [0] * len(self.names)
        exps[self.index(name)] = 1
        return GradedPoly(self, {tuple(exps): 1})

    def monomial(self, powers: Mapping[str, int], coefficient: Any = 1) -> "GradedPoly":
        exps = [0] * len(self.names)
        for name, power in powers.items():
            exps[self.index(name)] += int(power)
        return GradedPoly(self, {tuple(exps): coefficient})

    def monomials_up_to(self, weight: int) -> List[Exponents]:
        """Every exponent vector of total weight <= weight, in canonical order."""
        out: List[Exponents] = []

        def extend(prefix: List[int], position: int, used: int) -> None:
            if position == len(self.weights):
                out.append(tuple(prefix))
                return
            w = self.weights[position]
            power = 0
            while used + power * w <= weight:
                extend(prefix + [power], position + 1, used + power * w)
                power += 1

        extend([], 0, 0)
        return sorted(out)


class GradedPoly:
    """Truncated polynomial over a GradedRing with Fraction coefficients."""

    __slots__ = ("ring", "terms", "_weighted")

    def __init__(self, ring: GradedRing, terms: Optional[Mapping[Exponents, Any]] = None, *, trusted: bool = False):
        self.ring = ring
        if trusted:
            self.terms: Dict[Exponents, Fraction] = dict(terms or {})
        else:
            cleaned: Dict[Exponents, Fraction] = {}
            for exps, value in (terms or {}).items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != ring.rank or any(e < 0 for e in exps):
                    raise AlgebraError(f"bad exponent vector {exps} for ring {ring.names}")
                if ring.weight_of(exps) > ring.bound:
                    continue
                coefficient = to_fraction(value)
                if coefficient:
                    cleaned[exps] = cleaned.get(exps, Fraction(0)) + coefficient
            self.terms = {e: c for e, c in cleaned.items() if c}
        self._weighted: Optional[List[Tuple[int, Exponents, Fraction]]] = None

    # ------------------------------------------------------------------ basics

    def _check_ring(self, other: "GradedPoly") -> None:
        if other.ring != self.ring:
            raise AlgebraError(f"incompatible rings: {self.ring.names}/W={self.ring.bound} "
                               f"vs {other.ring.names}/W={other.ring.bound}")

    def _coerce(self, other: Any) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            self._check_ring(other)
            return other
        return self.ring.constant(to_fraction(other))

    def weighted_terms(self) -> List[Tuple[int, Exponents, Fraction]]:
        """Terms as (weight, exponents, coefficient), sorted by weight."""
        if self._weighted is None:
            weight_of = self.ring.weight_of
            self._weighted = sorted(((weight_of(e), e, c) for e, c in self.terms.items()),
                                    key=lambda item: (item[0], item[1]))
        return self._weighted

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Exponents, Fraction]]:
        return iter(sorted(self.terms.items()))

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, GradedPoly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self.terms == self.ring.constant(to_fraction(other)).terms
        except AlgebraError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"GradedPoly({self.to_string()})"

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exps, coefficient in sorted(self.terms.items()):
            monomial = "*".join(
                name if power == 1 else f"{name}^{power}"
                for name, power in zip(self.ring.names, exps) if power
            )
            pieces.append(f"{coefficient}" + (f"*{monomial}" if monomial else ""))
        return " + ".join(pieces)

    def constant_term(self) -> Fraction:
        return self.terms.get(self.ring.unit, Fraction(0))

    def coefficient(self, powers: Mapping[str, int]) -> Fraction:
        exps = [0] * self.ring.rank
        for name, power in powers.items():
            exps[self.ring.index(name)] = power
        return self.terms.get(tuple(exps), Fraction(0))

    def max_weight(self) -> int:
        return max((w for w, _, _ in self.weighted_terms()), default=-1)

    def weights_present(self) -> List[int]:
        return sorted({w for w, _, _ in self.weighted_terms()})

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    def degree_in(self, name: str) -> int:
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=-1)

    # -------------------------------------------------------------- arithmetic

    def __add__(self, other: Any) -> "GradedPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for exps, coefficient in other.terms.items():
            value = out.get(exps, 0) + coefficient
            if value:
                out[exps] = value
            else:
                out.pop(exps, None)
        return GradedPoly(self.ring, out, trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "GradedPoly":
        return GradedPoly(self.ring, {e: -c for e, c in self.terms.items()}, trusted=True)

    def __sub__(self, other: Any) -> "GradedPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "GradedPoly":
        return self._coerce(other) - self

    def scale(self, factor: Any) -> "GradedPoly":
        factor = to_fraction(factor)
        if not factor:
            return self.ring.zero()
        return GradedPoly(self.ring, {e: c * factor for e, c in self.terms.items()}, trusted=True)

    def __mul__(self, other: Any) -> "GradedPoly":
        if not isinstance(other, GradedPoly):
            try:
                return self.scale(other)
            except AlgebraError:
                return NotImplemented
        self._check_ring(other)
        bound = self.ring.bound
        right = other.weighted_terms()
        out: Dict[Exponents, Fraction] = {}
        for wa, ea, ca in self.weighted_terms():
            room = bound - wa
            for wb, eb, cb in right:
                if wb > room:
                    break
                key = tuple(map(add, ea, eb))
                out[key] = out.get(key, 0) + ca * cb
        return GradedPoly(self.ring, {e: c for e, c in out.items() if c}, trusted=True)

    def __rmul__(self, other: Any) -> "GradedPoly":
        try:
            return self.scale(other)
        except AlgebraError:
            return NotImplemented

    def __truediv__(self, other: Any) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            return self * other.series_inv()
        divisor = to_fraction(other)
        if not divisor:
            raise AlgebraError("division by zero")
        return self.scale(1 / divisor)

    def __pow__(self, exponent: int) -> "GradedPoly":
        if exponent < 0:
            return self.series_inv() ** (-exponent)
        result = self.ring.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    # ------------------------------------------------------------------ series

    def series_exp(self) -> "GradedPoly":
        """exp(a) for a with zero constant term, truncated at the ring bound."""
        if self.constant_term():
            raise AlgebraError("series_exp needs a zero constant term")
        result = self.ring.one()
        term = self.ring.one()
        n = 1
        while True:
            term = (term * self).scale(Fraction(1, n))
            if not term:
                return result
            result = result + term
            n += 1

    def series_log(self) -> "GradedPoly":
        """log(a) for a with constant term 1."""
        if self.constant_term() != 1:
            raise AlgebraError("series_log needs constant term 1")
        u = self - 1
        result = self.ring.zero()
        power = self.ring.one()
        n = 1
        while True:
            power = power * u
            if not power:
                return result
            result = result + power.scale(Fraction((-1) ** (n + 1), n))
            n += 1

    def series_inv(self) -> "GradedPoly":
        """Multiplicative inverse; the constant term must be nonzero."""
        c0 = self.constant_term()
        if not c0:
            raise AlgebraError("series_inv needs an invertible constant term")
        u = self.scale(1 / c0) - 1
        result = self.ring.one()
        power = self.ring.one()
        negated = -u
        while True:
            power = power * negated
            if not power:
                return result.scale(1 / c0)
            result = result + power

    # --------------------------------------------------------- graded structure

    def weight_component(self, weight: int) -> "GradedPoly":
        if weight < 0 or weight > self.ring.bound:
            raise AlgebraError(f"weight {weight} outside 0..{self.ring.bound}")
        return GradedPoly(self.ring, {e: c for w, e, c in self.weighted_terms() if w == weight}, trusted=True)

    def truncate(self, bound: int) -> "GradedPoly":
        """Drop terms above ``bound`` and move to the ring with that bound."""
        ring = self.ring.with_bound(bound)
        return GradedPoly(ring, {e: c for w, e, c in self.weighted_terms() if w <= bound}, trusted=True)

    def divide_by_generator(self, name: str) -> "GradedPoly":
        """Exact quotient by a generator g; the result lives at bound W - weight(g)."""
        i = self.ring.index(name)
        out: Dict[Exponents, Fraction] = {}
        for exps, coefficient in self.terms.items():
            if exps[i] < 1:
                raise AlgebraError(f"not divisible by {name}: term {self._monomial_text(exps)}")
            shifted = list(exps)
            shifted[i] -= 1
            out[tuple(shifted)] = coefficient
        ring = self.ring.with_bound(self.ring.bound - self.ring.weights[i])
        return GradedPoly(ring, out, trusted=True)

    def divide_by_linear(self, name: str, root: Any) -> Tuple["GradedPoly", "GradedPoly"]:
        """
        Division by (g - root) treating the other generators as coefficients.

        Returns (quotient, remainder); the remainder is the image under
        g -> root and does not involve g.
        """
        i = self.ring.index(name)
        root = to_fraction(root)
        by_cofactor: Dict[Exponents, Dict[int, Fraction]] = {}
        for exps, coefficient in self.terms.items():
            cofactor = exps[:i] + (0,) + exps[i + 1:]
            by_cofactor.setdefault(cofactor, {})[exps[i]] = coefficient
        quotient: Dict[Exponents, Fraction] = {}
        remainder: Dict[Exponents, Fraction] = {}
        for cofactor, univariate in by_cofactor.items():
            degree = max(univariate)
            carry = Fraction(0)
            # synthetic division, highest power first
            for power in range(degree, -1, -1):
                carry = carry * root + univariate.get(power, 0)
                if power == 0:
                    if carry:
                        remainder[cofactor] = carry
                elif carry:
                    exps = list(cofactor)
                    exps[i] = power - 1
                    quotient[tuple(exps)] = carry
        return GradedPoly(self.ring, quotient), GradedPoly(self.ring, remainder)

    def substitute(self, mapping: Mapping[str, Any], target: GradedRing) -> "GradedPoly":
        """
        Ring homomorphism into ``target``.

        Each generator is sent to mapping[name] (a GradedPoly over target or a
        scalar); generators absent from the mapping are sent to the generator
        of the same name in target.
        """
        images: List[GradedPoly] = []
        for name in self.ring.names:
            if name in mapping:
                value = mapping[name]
                images.append(value if isinstance(value, GradedPoly) else target.constant(value))
            elif target.has(name):
                images.append(target.generator(name))
            else:
                raise AlgebraError(f"no image for generator '{name}' in {target.names}")
        for image in images:
            if image.ring != target:
                raise AlgebraError("incompatible rings: substitution image outside target ring")
        power_cache: Dict[Tuple[int, int], GradedPoly] = {}

        def power(i: int, e: int) -> GradedPoly:
            key = (i, e)
            if key not in power_cache:
                power_cache[key] = images[i] ** e
            return power_cache[key]

        result = target.zero()
        for exps, coefficient in self.terms.items():
            term = target.constant(coefficient)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
                    if not term:
                        break
            result = result + term
        return result

    def evaluate(self, values: Mapping[str, Any]) -> Any:
        """Numeric (or exact) value at the given generator values."""
        total: Any = 0
        for exps, coefficient in self.terms.items():
            term: Any = coefficient
            for name, e in zip(self.ring.names, exps):
                if e:
                    term = term * values[name] ** e
            total = total + term
        return total

    def map_coefficients(self, fn) -> "GradedPoly":
        """Apply fn(weight, exponents, coefficient) -> coefficient to every term."""
        return GradedPoly(self.ring, {e: fn(w, e, c) for w, e, c in self.weighted_terms()})

    def leading_terms(self, limit: int = 3) -> str:
        """Short description of the first few terms, for failure witnesses."""
        items = sorted(self.terms.items())[:limit]
        text = " + ".join(f"{c}*{self._monomial_text(e)}" for e, c in items)
        if len(self.terms) > limit:
            text += f" + ... ({len(self.terms)} terms)"
        return text

    def _monomial_text(self, exps: Exponents) -> str:
        parts = [f"{n}^{p}" for n, p in zip(self.ring.names, exps) if p]
        return "*".join(parts) if parts else "1"


# Functional forms of the ring operations


def poly_mul(a: GradedPoly, b: GradedPoly) -> GradedPoly:
    return a * b


def series_exp(a: GradedPoly) -> GradedPoly:
    return a.series_exp()


def series_log(a: GradedPoly) -> GradedPoly:
    return a.series_log()


def series_inv(a: GradedPoly) -> GradedPoly:
    return a.series_inv()


def divide_by_generator(a: GradedPoly, name: str) -> GradedPoly:
    return a.divide_by_generator(name)


def weight_component(a: GradedPoly, weight: int) -> GradedPoly:
    return a.weight_component(weight)
