import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from profiles import Constant, Mul, Neg, Pow, Variable, parse_expression, tokenize
from utils.errors import DomainError, ParseError

SMOOTH = [
    ("sqrt(2*z - z^2)", 0.05, 1.95),
    ("1 + z^3/3", 0.0, 2.0),
    ("z^0.5*(2 - z)", 0.05, 1.5),
    ("(1 + z)/(2 + z^2)", 0.0, 2.0),
    ("-(z - 3)^2 + 10", 0.0, 2.0),
    ("a*z^2 + b", 0.0, 2.0),
]
CONSTANTS = {"a": 0.75, "b": 0.25}


def test_power_of_z():
    assert parse_expression("z^2").evaluate(0.5) == pytest.approx(0.25)


def test_sphere_curve():
    assert parse_expression("sqrt(2*z - z^2)").evaluate(1.0) == pytest.approx(1.0)


def test_dangling_operator_reports_offset():
    with pytest.raises(ParseError) as info:
        parse_expression("2*")
    assert info.value.offset == 2
    assert "number" in info.value.expected


def test_offsets_are_bytes():
    tokens = tokenize("  z *  1.5")
    assert [(t.kind, t.offset) for t in tokens] == [("ident", 2), ("op", 4), ("number", 7), ("end", 10)]


def test_unknown_identifier():
    with pytest.raises(ParseError) as info:
        parse_expression("1 + x")
    assert info.value.offset == 4


def test_unbalanced_parenthesis():
    with pytest.raises(ParseError) as info:
        parse_expression("(z + 1")
    assert info.value.offset == 6
    assert "')'" in info.value.expected


def test_invalid_character():
    with pytest.raises(ParseError):
        parse_expression("z $ 2")


def test_exponent_must_not_depend_on_z():
    with pytest.raises(ParseError) as info:
        parse_expression("2^z")
    assert info.value.offset == 2


def test_precedence():
    assert parse_expression("-2^2").evaluate(0.0) == -4.0
    assert parse_expression("2^3^2").evaluate(0.0) == 512.0
    assert parse_expression("8/4/2").evaluate(0.0) == 1.0
    assert parse_expression("1 - 2 - 3").evaluate(0.0) == -4.0
    assert parse_expression("2*-z").evaluate(3.0) == -6.0


def test_whitespace_insensitive():
    assert parse_expression("  z*  z ").evaluate(3.0) == parse_expression("z*z").evaluate(3.0)


def test_constants_are_folded():
    ast = parse_expression("R - z", {"R": 2.0})
    assert ast.evaluate(0.5) == pytest.approx(1.5)
    assert not ast.left.depends_on_z()


def test_reserved_constant_names():
    with pytest.raises(DomainError):
        parse_expression("z", {"z": 1.0})
    with pytest.raises(DomainError):
        parse_expression("z", {"sqrt": 1.0})


def test_vectorized_evaluation():
    zs = np.linspace(0.0, 1.0, 5)
    np.testing.assert_allclose(parse_expression("1 + z^2").evaluate(zs), 1.0 + zs ** 2)


def test_derivative_nodes():
    assert parse_expression("z").derivative() == Constant(1.0)
    assert parse_expression("3").derivative() == Constant(0.0)
    assert parse_expression("z^3").derivative() == Mul(Constant(3.0), Pow(Variable(), Constant(2.0)))
    assert parse_expression("z^3").derivative().evaluate(2.0) == 12.0


def test_printing_keeps_needed_parentheses():
    assert str(parse_expression("(1 - z)^2")) == "(1 - z)^2"
    assert str(parse_expression("1 - (z - 1)")) == "1 - (z - 1)"
    assert str(parse_expression("2/(z*3)")) == "2/(z*3)"
    assert str(parse_expression("-(z + 1)")) == "-(z + 1)"
    assert str(Neg(Constant(2.0))) == "-2"


@pytest.mark.parametrize("text,lo,hi", SMOOTH)
@settings(max_examples=100, deadline=None)
@given(u=st.floats(min_value=0.0, max_value=1.0))
def test_derivative_matches_central_difference(text, lo, hi, u):
    ast = parse_expression(text, CONSTANTS)
    slope = ast.derivative()
    z = lo + 0.01 + u * (hi - lo - 0.02)
    step = 1e-6
    fd = (float(ast.evaluate(z + step)) - float(ast.evaluate(z - step))) / (2 * step)
    exact = float(slope.evaluate(z))
    assert exact == pytest.approx(fd, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("text,lo,hi", SMOOTH)
@settings(max_examples=100, deadline=None)
@given(u=st.floats(min_value=0.0, max_value=1.0))
def test_print_parse_round_trip(text, lo, hi, u):
    ast = parse_expression(text, CONSTANTS)
    again = parse_expression(str(ast))
    z = lo + u * (hi - lo)
    assert float(again.evaluate(z)) == float(ast.evaluate(z))


@pytest.mark.parametrize("text,lo,hi", SMOOTH)
def test_derivative_print_round_trip(text, lo, hi):
    slope = parse_expression(text, CONSTANTS).derivative()
    again = parse_expression(str(slope))
    for z in np.linspace(lo + 0.01, hi - 0.01, 25):
        assert float(again.evaluate(z)) == pytest.approx(float(slope.evaluate(z)), rel=1e-14, abs=1e-15)


def test_overflowing_number():
    with pytest.raises(ParseError):
        parse_expression("1e999 * z")


def test_sqrt_needs_parenthesis():
    with pytest.raises(ParseError) as info:
        parse_expression("sqrt z")
    assert "'('" in info.value.expected


def test_math_consistency():
    assert float(parse_expression("sqrt(2)").evaluate(0.0)) == math.sqrt(2.0)
