"""Coefficient-expression parser: grammar, precedence, errors, evaluation."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from satflow.expr import (EvaluationError, ParseError, constant_expr,
                          negate_expr, parse_coefficient)


def _value(text: str, t: float) -> float:
    return parse_coefficient(text)(t)


class TestGrammar:
    def test_literal(self):
        assert _value("3.5", 0.0) == 3.5

    def test_variable(self):
        assert _value("t", 2.25) == 2.25

    def test_precedence_multiplication_over_addition(self):
        assert _value("1 + 2*3", 0.0) == 7.0

    def test_precedence_power_over_multiplication(self):
        assert _value("2*t^3", 2.0) == 16.0

    def test_power_binds_tighter_than_unary_minus(self):
        # -t^2 reads as -(t^2)
        assert _value("-t^2", 3.0) == -9.0

    def test_left_associative_subtraction(self):
        assert _value("10 - 4 - 3", 0.0) == 3.0

    def test_left_associative_division(self):
        assert _value("24/4/3", 0.0) == 2.0

    def test_parentheses(self):
        assert _value("(1 + t)^2", 2.0) == 9.0

    def test_functions(self):
        assert _value("sin(t)", 1.2) == pytest.approx(math.sin(1.2), abs=0)
        assert _value("cos(t)", 1.2) == pytest.approx(math.cos(1.2), abs=0)
        assert _value("exp(t)", 1.2) == pytest.approx(math.exp(1.2), abs=0)

    def test_nested_expression(self):
        text = "(2*t^2 - 1)/(1 + t^2)^2"
        t = 1.5
        expected = (2 * t * t - 1) / (1 + t * t) ** 2
        assert _value(text, t) == pytest.approx(expected, rel=1e-15)

    def test_whitespace_insensitive(self):
        assert _value(" 1+ t *2 ", 3.0) == _value("1+t*2", 3.0)


class TestErrors:
    @pytest.mark.parametrize("text,position", [
        ("2*", 2),
        ("(1 + t", 6),
        ("t^^2", 2),
        ("1 $ 2", 2),
        ("sin", 3),
        ("foo(t)", 0),
        ("", 0),
    ])
    def test_parse_error_carries_position(self, text, position):
        with pytest.raises(ParseError) as excinfo:
            parse_coefficient(text)
        assert excinfo.value.position == position
        assert f"position {position}" in str(excinfo.value)

    def test_fractional_exponent_rejected(self):
        with pytest.raises(ParseError):
            parse_coefficient("t^2.5")

    def test_negative_exponent_rejected(self):
        with pytest.raises(ParseError):
            parse_coefficient("t^-1")

    def test_parse_error_is_value_error(self):
        assert issubclass(ParseError, ValueError)

    def test_division_by_zero_raises_evaluation_error(self):
        expr = parse_coefficient("1/t")
        with pytest.raises(EvaluationError):
            expr(0.0)

    def test_overflow_raises_evaluation_error(self):
        expr = parse_coefficient("exp(t)^9")
        with pytest.raises(EvaluationError):
            expr(1000.0)


class TestHelpers:
    def test_constant_expr(self):
        expr = constant_expr(4.25)
        assert expr(0.0) == 4.25
        assert expr(-17.0) == 4.25

    def test_negate_expr(self):
        expr = negate_expr(parse_coefficient("t^2"))
        assert expr(3.0) == -9.0

    def test_text_round_trip(self):
        text = "(2*t^2 - 1)/(1 + t^2)^2"
        expr = parse_coefficient(text)
        again = parse_coefficient(expr.source_text)
        for t in (-2.0, -0.5, 0.0, 1.0, 3.75):
            assert expr(t) == again(t)


@given(st.floats(min_value=-10, max_value=10, allow_nan=False))
def test_polynomial_matches_direct_evaluation(t):
    expected = 3 * t**4 - 2 * t**2 + 0.5 * t - 7
    assert _value("3*t^4 - 2*t^2 + 0.5*t - 7", t) == pytest.approx(
        expected, rel=1e-12, abs=1e-12)


@given(st.integers(min_value=0, max_value=8),
       st.floats(min_value=-3, max_value=3, allow_nan=False))
def test_integer_powers(k, t):
    assert _value(f"t^{k}", t) == pytest.approx(float(t) ** k, rel=1e-14,
                                                abs=1e-300)
