"""
Canonical text format for golden files.

    # gens ps_x2:4 c:2
    # bound 12
    # order 160
    # domain poly
    0 1 1/1
    4 c^1 -1/3

One term per line: q exponent in eighths, monomial (``1`` for the empty
one), coefficient as ``num/den``. Lines are sorted by (eighths, exponent
vector in generator-table order). A bare GradedPoly omits ``# order`` and
uses eighths 0 throughout.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

from app.algebra.coefficients import CoeffDomain, to_fraction
from app.algebra.graded_poly import Exponents, GradedPoly, GradedRing
from app.algebra.qseries import QSeries
from app.utils.exceptions import AlgebraError, GoldenFileError

Serializable = Union[GradedPoly, QSeries]


def _fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _monomial_text(ring: Optional[GradedRing], exps: Exponents) -> str:
    if ring is None:
        return "1"
    parts = [f"{name}^{power}" for name, power in zip(ring.names, exps) if power]
    return "*".join(parts) if parts else "1"


def _header(ring: Optional[GradedRing], order: Optional[int], domain: CoeffDomain) -> List[str]:
    gens = " ".join(f"{n}:{w}" for n, w in zip(ring.names, ring.weights)) if ring is not None else ""
    lines = [f"# gens {gens}".rstrip(), f"# bound {ring.bound if ring is not None else 0}"]
    if order is not None:
        lines.append(f"# order {order}")
    lines.append(f"# domain {domain.value}")
    return lines


def _rows(eighths: int, value, ring: Optional[GradedRing]) -> List[Tuple[int, Exponents, Fraction]]:
    if isinstance(value, GradedPoly):
        return [(eighths, exps, c) for exps, c in value.terms.items()]
    try:
        coefficient = to_fraction(value)
    except AlgebraError as exc:
        raise GoldenFileError(f"only rational coefficients can be serialized, got {value!r}") from exc
    unit = ring.unit if ring is not None else ()
    return [(eighths, unit, coefficient)]


def dumps(value: Serializable) -> str:
    """Canonical text of a GradedPoly or a rational/polynomial QSeries."""
    if isinstance(value, GradedPoly):
        ring, order, domain = value.ring, None, CoeffDomain.POLY
        rows = _rows(0, value, ring)
    elif isinstance(value, QSeries):
        if value.domain not in (CoeffDomain.RATIONAL, CoeffDomain.INTEGER, CoeffDomain.POLY):
            raise GoldenFileError(f"cannot serialize a {value.domain.value} q-series")
        ring, order = value.ring, value.order
        domain = CoeffDomain.POLY if ring is not None else CoeffDomain.RATIONAL
        rows = [row for n, c in value.coeffs.items() for row in _rows(n, c, ring)]
    else:
        raise GoldenFileError(f"cannot serialize {type(value).__name__}")
    rows.sort(key=lambda row: (row[0], row[1]))
    lines = _header(ring, order, domain)
    lines.extend(f"{n} {_monomial_text(ring, e)} {_fraction_text(c)}" for n, e, c in rows)
    return "\n".join(lines) + "\n"


def _parse_header(lines: Iterable[str]) -> Dict[str, str]:
    header: Dict[str, str] = {}
    for line in lines:
        if not line.startswith("#"):
            continue
        key, _, rest = line[1:].strip().partition(" ")
        header[key] = rest.strip()
    return header


def _parse_monomial(text: str, ring: Optional[GradedRing], lineno: int) -> Exponents:
    if text == "1":
        return ring.unit if ring is not None else ()
    if ring is None:
        raise GoldenFileError(f"line {lineno}: monomial '{text}' in a scalar series")
    exps = [0] * ring.rank
    for factor in text.split("*"):
        name, caret, power = factor.partition("^")
        if not caret or not ring.has(name):
            raise GoldenFileError(f"line {lineno}: bad monomial factor '{factor}'")
        try:
            exps[ring.index(name)] += int(power)
        except ValueError:
            raise GoldenFileError(f"line {lineno}: bad exponent in '{factor}'") from None
    return tuple(exps)


def loads(text: str) -> Serializable:
    """Inverse of ``dumps``; raises GoldenFileError on malformed input."""
    lines = [line.rstrip() for line in text.splitlines() if line.strip()]
    header = _parse_header(lines)
    for key in ("gens", "bound", "domain"):
        if key not in header:
            raise GoldenFileError(f"missing '# {key}' header")
    try:
        generators = [
            (name, int(weight))
            for name, _, weight in (item.partition(":") for item in header["gens"].split())
        ]
        bound = int(header["bound"])
        order = int(header["order"]) if "order" in header else None
        domain = CoeffDomain(header["domain"])
    except ValueError as exc:
        raise GoldenFileError(f"malformed header: {exc}") from exc
    ring = GradedRing.build(generators, bound) if (generators or domain is CoeffDomain.POLY) else None

    by_exponent: Dict[int, Dict[Exponents, Fraction]] = {}
    for lineno, line in enumerate(lines, start=1):
        if line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GoldenFileError(f"line {lineno}: expected '<eighths> <monomial> <num>/<den>'")
        try:
            eighths = int(parts[0])
            coefficient = Fraction(parts[2])
        except (ValueError, ZeroDivisionError) as exc:
            raise GoldenFileError(f"line {lineno}: {exc}") from exc
        exps = _parse_monomial(parts[1], ring, lineno)
        bucket = by_exponent.setdefault(eighths, {})
        bucket[exps] = bucket.get(exps, Fraction(0)) + coefficient

    if order is None:
        if ring is None or set(by_exponent) - {0}:
            raise GoldenFileError("a polynomial file must use eighths 0 and declare generators")
        return GradedPoly(ring, by_exponent.get(0, {}))
    if domain is CoeffDomain.POLY:
        coeffs = {n: GradedPoly(ring, terms) for n, terms in by_exponent.items()}
        return QSeries(coeffs, order, CoeffDomain.POLY, ring)
    coeffs = {n: terms.get((), Fraction(0)) for n, terms in by_exponent.items()}
    return QSeries(coeffs, order)
