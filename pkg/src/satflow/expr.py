"""Parser and evaluator for scalar coefficient expressions in the time variable t.

Grammar (whitespace-insensitive, left-associative, '^' binds tightest):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | base ('^' unsigned-integer)?
    base   := number | 't' | '(' expr ')' | ('sin'|'cos'|'exp') '(' expr ')'

A number is a plain decimal literal (no exponent notation).  Unary minus is
applied after exponentiation, so "-t^2" evaluates to -(t^2).  Parsing is
deterministic; evaluation is pure float arithmetic, so repeated evaluation at
the same t returns bit-identical results.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

__all__ = [
    "CoefficientExpr",
    "ParseError",
    "EvaluationError",
    "parse_coefficient",
    "constant_expr",
    "negate_expr",
]


class ParseError(ValueError):
    """Raised for malformed expression text; carries the 0-based position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


class EvaluationError(ValueError):
    """Raised when an expression cannot be evaluated at a given t."""


@dataclass(frozen=True)
class CoefficientExpr:
    """A scalar function of t with its defining source text."""

    source_text: str
    evaluator: Callable[[float], float] = field(repr=False)

    def __call__(self, t: float) -> float:
        return self.evaluator(t)


_TOKEN_RE = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z]+)|([-+*/^()]))")

_FUNCTIONS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            # the remainder is whitespace or an illegal character
            rest = text[pos:]
            stripped = rest.lstrip()
            if not stripped:
                break
            at = pos + (len(rest) - len(stripped))
            raise ParseError(f"unexpected character {stripped[0]!r}", at)
        number, word, op = match.groups()
        start = match.end() - len(number or word or op)
        if number is not None:
            tokens.append(("num", float(number), start))
        elif word is not None:
            if word == "t":
                tokens.append(("var", "t", start))
            elif word in _FUNCTIONS:
                tokens.append(("func", word, start))
            else:
                raise ParseError(f"unknown name {word!r}", start)
        else:
            tokens.append(("op", op, start))
        pos = match.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser producing a tuple-based AST."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> tuple[str, object, int]:
        return self.tokens[self.index]

    def advance(self) -> tuple[str, object, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect_op(self, op: str) -> None:
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", pos)
        self.advance()

    def parse(self) -> tuple:
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", pos)
        return node

    def expr(self) -> tuple:
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = ("bin", value, node, self.term())
            else:
                return node

    def term(self) -> tuple:
        node = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = ("bin", value, node, self.factor())
            else:
                return node

    def factor(self) -> tuple:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return ("neg", self.factor())
        node = self.base()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            kind, value, pos = self.advance()
            if kind != "num" or not float(value).is_integer() or "." in self._token_text(pos):
                raise ParseError("exponent must be an unsigned integer", pos)
            node = ("pow", node, int(value))
        return node

    def _token_text(self, pos: int) -> str:
        # source slice for the token starting at pos (used to reject "2^1.0")
        match = _TOKEN_RE.match(self.text, pos)
        return match.group(0).lstrip() if match else ""

    def base(self) -> tuple:
        kind, value, pos = self.advance()
        if kind == "num":
            return ("num", value)
        if kind == "var":
            return ("var",)
        if kind == "func":
            self.expect_op("(")
            node = self.expr()
            self.expect_op(")")
            return ("call", value, node)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"expected a number, 't', '(' or a function, got {value!r}", pos)


def _eval_node(node: tuple, t: float) -> float:
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        return t
    if tag == "neg":
        return -_eval_node(node[1], t)
    if tag == "pow":
        return _eval_node(node[1], t) ** node[2]
    if tag == "call":
        return _FUNCTIONS[node[1]](_eval_node(node[2], t))
    # binary
    op = node[1]
    left = _eval_node(node[2], t)
    right = _eval_node(node[3], t)
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    denominator = right
    if denominator == 0.0:
        raise EvaluationError(f"division by zero at t={t}")
    return left / denominator


def parse_coefficient(text: str) -> CoefficientExpr:
    """Parse expression text into a CoefficientExpr.

    Raises ParseError (with position) on malformed input.  The returned
    evaluator raises EvaluationError if a division's denominator vanishes at
    the evaluated t.
    """
    ast = _Parser(text).parse()

    def evaluate(t: float) -> float:
        try:
            return float(_eval_node(ast, float(t)))
        except OverflowError:
            raise EvaluationError(f"overflow at t={t}") from None

    return CoefficientExpr(text, evaluate)


def constant_expr(value: float) -> CoefficientExpr:
    v = float(value)
    return CoefficientExpr(repr(v), lambda t: v)


def negate_expr(expression: CoefficientExpr) -> CoefficientExpr:
    return CoefficientExpr(f"-({expression.source_text})", lambda t: -expression.evaluator(t))
