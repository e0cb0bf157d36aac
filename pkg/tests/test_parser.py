from fractions import Fraction

import pytest

from akgeo import expr as E
from akgeo.numeric import evaluate
from akgeo.parser import ParseError, parse_expression


def test_operator_precedence():
    assert evaluate(parse_expression("1 + 2*3^2"), (0, 0, 0, 0)) == 19
    assert evaluate(parse_expression("-2^2"), (0, 0, 0, 0)) == -4


def test_aliases():
    p = (0.3, -0.2, 0.5, 0.1)
    assert evaluate(parse_expression("z1"), p) == complex(0.3, -0.2)
    assert evaluate(parse_expression("z2b"), p) == complex(0.5, -0.1)
    assert evaluate(parse_expression("v"), p) == 0.6


def test_rational_exponents():
    e = parse_expression("x1^(1/4)")
    assert isinstance(e, E.Pow) and e.exponent == Fraction(1, 4)
    assert abs(evaluate(e, (16, 0, 0, 0)) - 2) < 1e-12


def test_negative_exponent():
    assert evaluate(parse_expression("x1^-2"), (2, 0, 0, 0)) == 0.25


def test_functions_and_comments():
    e = parse_expression("exp(log(x1)) + conj(i*x2)  # comment")
    assert e is parse_expression("x1 - i*x2")


def test_error_reports_offset():
    with pytest.raises(ParseError) as err:
        parse_expression("x1 +* 2")
    assert err.value.offset == 4
    assert "at offset 4" in str(err.value)


@pytest.mark.parametrize("text", ["(x1", "x1 + ", "foo", "x1 $ 2", "x1^(1/0)", ""])
def test_malformed_input_raises(text):
    with pytest.raises(ParseError):
        parse_expression(text)


def test_parameters_must_be_declared():
    with pytest.raises(ParseError):
        parse_expression("phi*x1")
    e = parse_expression("phi*x1", known_parameters=["phi"])
    assert evaluate(e, (2, 0, 0, 0), {"phi": 3}) == 6


def test_parameter_cannot_shadow_builtin():
    with pytest.raises(ValueError):
        parse_expression("x1", known_parameters=["v"])
