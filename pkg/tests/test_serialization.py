from fractions import Fraction

import pytest

from app.algebra.graded_poly import GradedRing
from app.algebra.qseries import QSeries
from app.algebra.serialization import dumps, loads
from app.utils.exceptions import GoldenFileError


@pytest.fixture
def ring():
    return GradedRing.build([("ps_x2", 4), ("c", 2)], 8)


def test_polynomial_text_is_canonical(ring):
    poly = ring.generator("c").scale(Fraction(-1, 3)) + 1
    assert dumps(poly) == (
        "# gens ps_x2:4 c:2\n"
        "# bound 8\n"
        "# domain poly\n"
        "0 1 1/1\n"
        "0 c^1 -1/3\n"
    )


def test_rational_series_text():
    series = QSeries({0: Fraction(1, 4), 8: 6}, 16)
    assert dumps(series) == (
        "# gens\n"
        "# bound 0\n"
        "# order 16\n"
        "# domain rational\n"
        "0 1 1/4\n"
        "8 1 6/1\n"
    )
    assert loads(dumps(series)) == series


def test_polynomial_series_parses_back(ring):
    c = ring.generator("c")
    series = QSeries({0: ring.one(), 4: c * ring.generator("ps_x2")}, 12, ring=ring)
    parsed = loads(dumps(series))
    assert parsed == series
    assert parsed.ring == ring


def test_term_order_does_not_matter(ring):
    text = dumps(ring.generator("c") + ring.generator("ps_x2"))
    header, body = text.split("# domain poly\n")
    shuffled = header + "# domain poly\n" + "".join(reversed(body.splitlines(keepends=True)))
    assert dumps(loads(shuffled)) == text


@pytest.mark.parametrize("text, message", [
    ("# bound 4\n# domain poly\n0 1 1/1\n", "gens"),
    ("# gens c:2\n# bound 4\n# domain poly\n0 c^1\n", "expected"),
    ("# gens c:2\n# bound 4\n# domain poly\n0 z^1 1/1\n", "bad monomial"),
    ("# gens c:2\n# bound 4\n# domain poly\n0 c^1 1/0\n", "line"),
    ("# gens c:2\n# bound 4\n# domain poly\n8 c^1 1/1\n", "eighths 0"),
])
def test_malformed_files_raise(text, message):
    with pytest.raises(GoldenFileError, match=message):
        loads(text)


def test_complex_series_cannot_be_serialized():
    with pytest.raises(GoldenFileError):
        dumps(QSeries({0: 1j}, 8))
