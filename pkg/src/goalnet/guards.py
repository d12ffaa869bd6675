"""Guard mini-language for conditional transitions.

Grammar (whitespace insensitive, `&&` binds tighter than `||`, comparison
is non-associative)::

    or      := and ('||' and)*
    and     := cmp ('&&' cmp)*
    cmp     := unary (CMPOP unary)?
    unary   := '!' unary | primary
    primary := literal | ident | '(' or ')'
    CMPOP   := '==' | '!=' | '<=' | '>=' | '<' | '>'
    literal := 'true' | 'false' | number | '"' chars '"'

Evaluation is strict and pure over a key-value blackboard: equality needs
same-type operands, ordered comparison needs numbers, and an unknown
identifier is an error rather than false.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import GuardEvalError, GuardParseError

Value = Union[bool, float, str]
Blackboard = Mapping[str, Value]

IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def is_identifier(name: str) -> bool:
    return bool(IDENT_RE.match(name))


# -- abstract syntax ----------------------------------------------------

@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class NumLit:
    value: float


@dataclass(frozen=True)
class StrLit:
    value: str


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "GuardExpr"


@dataclass(frozen=True)
class And:
    left: "GuardExpr"
    right: "GuardExpr"


@dataclass(frozen=True)
class Or:
    left: "GuardExpr"
    right: "GuardExpr"


@dataclass(frozen=True)
class Compare:
    op: str  # one of == != < <= > >=
    left: "GuardExpr"
    right: "GuardExpr"


GuardExpr = Union[BoolLit, NumLit, StrLit, Ident, Not, And, Or, Compare]

ORDERED_OPS = {"<", "<=", ">", ">="}
_BOOLEAN_NODES = (BoolLit, Not, And, Or, Compare)


# -- tokenizer -----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>"(?:\\.|[^"\\])*")
  | (?P<op>\|\||&&|==|!=|<=|>=|<|>|!|\(|\))
    """,
    re.VERBOSE,
)

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class _Token:
    kind: str  # num | ident | str | op | eof
    text: str
    column: int  # 1-based


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise GuardParseError(f"unexpected character {text[pos]!r}", pos + 1)
        if match.lastgroup != "ws":
            tokens.append(_Token(match.lastgroup, match.group(), pos + 1))
        pos = match.end()
    tokens.append(_Token("eof", "", len(text) + 1))
    return tokens


def _unescape(raw: str, column: int) -> str:
    body = raw[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            esc = body[i + 1]
            if esc not in _ESCAPES:
                raise GuardParseError(f"bad escape \\{esc}", column + i + 1)
            out.append(_ESCAPES[esc])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


# -- parser ---------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.current
        self.pos += 1
        return token

    def expect_op(self, text: str) -> None:
        if self.current.kind == "op" and self.current.text == text:
            self.advance()
            return
        raise GuardParseError(f"expected {text!r}", self.current.column)

    def parse_or(self) -> GuardExpr:
        expr = self.parse_and()
        while self.current.kind == "op" and self.current.text == "||":
            self.advance()
            expr = Or(expr, self.parse_and())
        return expr

    def parse_and(self) -> GuardExpr:
        expr = self.parse_cmp()
        while self.current.kind == "op" and self.current.text == "&&":
            self.advance()
            expr = And(expr, self.parse_cmp())
        return expr

    def parse_cmp(self) -> GuardExpr:
        left = self.parse_unary()
        if self.current.kind == "op" and self.current.text in ("==", "!=", "<", "<=", ">", ">="):
            op_token = self.advance()
            right = self.parse_unary()
            if op_token.text in ORDERED_OPS:
                for side in (left, right):
                    if isinstance(side, _BOOLEAN_NODES):
                        raise GuardParseError(
                            f"{op_token.text} cannot compare boolean expressions",
                            op_token.column,
                        )
            return Compare(op_token.text, left, right)
        return left

    def parse_unary(self) -> GuardExpr:
        if self.current.kind == "op" and self.current.text == "!":
            self.advance()
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> GuardExpr:
        token = self.current
        if token.kind == "num":
            self.advance()
            return NumLit(float(token.text))
        if token.kind == "str":
            self.advance()
            return StrLit(_unescape(token.text, token.column))
        if token.kind == "ident":
            self.advance()
            if token.text == "true":
                return BoolLit(True)
            if token.text == "false":
                return BoolLit(False)
            return Ident(token.text)
        if token.kind == "op" and token.text == "(":
            self.advance()
            expr = self.parse_or()
            self.expect_op(")")
            return expr
        raise GuardParseError("expected an expression", token.column)


def parse_guard(text: str) -> GuardExpr:
    """Parse guard text into an expression tree.

    Raises :class:`GuardParseError` with a 1-based column on bad input.
    """
    parser = _Parser(_tokenize(text))
    expr = parser.parse_or()
    if parser.current.kind != "eof":
        raise GuardParseError(f"unexpected {parser.current.text!r}", parser.current.column)
    return expr


# -- evaluator -------------------------------------------------------------

def _is_number(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _type_name(value: object) -> str:
    if isinstance(value, bool):
        return "boolean"
    if _is_number(value):
        return "number"
    return "text"


def _eval(expr: GuardExpr, bb: Blackboard) -> Value:
    if isinstance(expr, BoolLit):
        return expr.value
    if isinstance(expr, NumLit):
        return expr.value
    if isinstance(expr, StrLit):
        return expr.value
    if isinstance(expr, Ident):
        if expr.name not in bb:
            raise GuardEvalError(f"unknown identifier {expr.name!r}")
        return bb[expr.name]
    if isinstance(expr, Not):
        operand = _eval(expr.operand, bb)
        if not isinstance(operand, bool):
            raise GuardEvalError(f"! needs a boolean, got {_type_name(operand)}")
        return not operand
    if isinstance(expr, (And, Or)):
        # Both sides always evaluate: no observable short-circuit.
        left = _eval(expr.left, bb)
        right = _eval(expr.right, bb)
        for side in (left, right):
            if not isinstance(side, bool):
                op = "&&" if isinstance(expr, And) else "||"
                raise GuardEvalError(f"{op} needs booleans, got {_type_name(side)}")
        return (left and right) if isinstance(expr, And) else (left or right)
    if isinstance(expr, Compare):
        left = _eval(expr.left, bb)
        right = _eval(expr.right, bb)
        if expr.op in ORDERED_OPS:
            if not (_is_number(left) and _is_number(right)):
                raise GuardEvalError(
                    f"{expr.op} needs numbers, got {_type_name(left)} and {_type_name(right)}")
            return {"<": left < right, "<=": left <= right,
                    ">": left > right, ">=": left >= right}[expr.op]
        if _type_name(left) != _type_name(right):
            raise GuardEvalError(
                f"{expr.op} needs same-type operands, got {_type_name(left)} and {_type_name(right)}")
        return (left == right) if expr.op == "==" else (left != right)
    raise GuardEvalError(f"unknown node {expr!r}")


def eval_guard(expr: GuardExpr, bb: Blackboard) -> bool:
    """Evaluate an expression tree against a blackboard; result must be boolean."""
    result = _eval(expr, bb)
    if not isinstance(result, bool):
        raise GuardEvalError(f"guard must evaluate to a boolean, got {_type_name(result)}")
    return result


# -- formatter --------------------------------------------------------------

_STRENGTH_OR = 1
_STRENGTH_AND = 2
_STRENGTH_CMP = 3
_STRENGTH_NOT = 4
_STRENGTH_ATOM = 5


def _strength(expr: GuardExpr) -> int:
    if isinstance(expr, Or):
        return _STRENGTH_OR
    if isinstance(expr, And):
        return _STRENGTH_AND
    if isinstance(expr, Compare):
        return _STRENGTH_CMP
    if isinstance(expr, Not):
        return _STRENGTH_NOT
    return _STRENGTH_ATOM


def _escape(text: str) -> str:
    return (text.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n").replace("\t", "\\t"))


def _format(expr: GuardExpr, min_strength: int) -> str:
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, NumLit):
        value = expr.value
        return str(int(value)) if value.is_integer() else repr(value)
    if isinstance(expr, StrLit):
        return f'"{_escape(expr.value)}"'
    if isinstance(expr, Ident):
        return expr.name
    if isinstance(expr, Or):
        text = f"{_format(expr.left, _STRENGTH_OR)} || {_format(expr.right, _STRENGTH_AND)}"
        strength = _STRENGTH_OR
    elif isinstance(expr, And):
        text = f"{_format(expr.left, _STRENGTH_AND)} && {_format(expr.right, _STRENGTH_CMP)}"
        strength = _STRENGTH_AND
    elif isinstance(expr, Compare):
        text = f"{_format(expr.left, _STRENGTH_NOT)} {expr.op} {_format(expr.right, _STRENGTH_NOT)}"
        strength = _STRENGTH_CMP
    else:
        text = f"!{_format(expr.operand, _STRENGTH_NOT)}"
        strength = _STRENGTH_NOT
    if strength < min_strength:
        return f"({text})"
    return text


def format_guard(expr: GuardExpr) -> str:
    """Render an expression tree as canonical text with minimal parentheses.

    ``parse_guard(format_guard(e))`` is structurally equal to ``e``.
    """
    return _format(expr, _STRENGTH_OR)
