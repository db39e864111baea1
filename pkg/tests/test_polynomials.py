from fractions import Fraction

import pytest

from arithfractal.errors import ConfigError
from arithfractal.polynomials import Polynomial, parse_polynomial, parse_rational


def test_parse_rational_forms():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-7") == Fraction(-7)
    assert parse_rational(5) == Fraction(5)
    with pytest.raises(ConfigError):
        parse_rational([1, 2])


def test_terms_merge_and_drop_zero():
    p = Polynomial(2, [((1, 0), Fraction(2)), ((1, 0), Fraction(-2)), ((0, 1), Fraction(3))])
    assert p.terms == (((0, 1), Fraction(3)),)


def test_evaluate_exact():
    # 2*x1^2 + x2/3 at (3/2, 6)
    p = Polynomial(2, [((2, 0), Fraction(2)), ((0, 1), Fraction(1, 3))])
    assert p.evaluate((Fraction(3, 2), Fraction(6))) == Fraction(9, 2) + 2


def test_degree_and_homogeneity():
    p = parse_polynomial("x1^2 + 2*x1*x2", 2)
    assert p.total_degree() == 2
    assert p.is_homogeneous()
    q = parse_polynomial("x1^2 + x2", 2)
    assert not q.is_homogeneous()


def test_parse_matches_manual_construction():
    parsed = parse_polynomial("x1 + x2 - 6", 2)
    manual = Polynomial(
        2,
        [((1, 0), Fraction(1)), ((0, 1), Fraction(1)), ((0, 0), Fraction(-6))],
    )
    assert parsed == manual


def test_parse_powers_and_caret():
    assert parse_polynomial("2*x1^2", 2) == parse_polynomial("2*x1**2", 2)
    grid = [(Fraction(a), Fraction(b)) for a in range(-3, 4) for b in range(-3, 4)]
    p = parse_polynomial("(x1 - x2)^2", 2)
    assert p == parse_polynomial("x1^2 - 2*x1*x2 + x2^2", 2)
    for point in grid:
        assert p.evaluate(point) == (point[0] - point[1]) ** 2


def test_parse_rejects_junk():
    with pytest.raises(ConfigError):
        parse_polynomial("__import__('os')", 1)
    with pytest.raises(ConfigError):
        parse_polynomial("x3", 2)
    with pytest.raises(ConfigError):
        parse_polynomial("x1 / x2", 2)


def test_records_round_trip():
    p = parse_polynomial("x1^2/2 - 3*x2", 2)
    again = Polynomial.from_records(p.to_records(), 2)
    assert again == p
