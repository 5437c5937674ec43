"""Tiny arithmetic expression language used by scenario files.

Grammar (EBNF), with the usual precedence (power binds tightest, then unary
minus, then * and /, then + and -; binary operators associate left, the
integer exponent tower associates right):

    expr     = term { ("+" | "-") term } ;
    term     = factor { ("*" | "/") factor } ;
    factor   = "-" factor | power ;
    power    = atom [ "^" exponent ] ;
    exponent = integer [ "^" exponent ] ;
    atom     = number | ident | ident "(" expr ")" | "(" expr ")" ;
    vector   = "[" expr { "," expr } "]" ;
    matrix   = "[" vector { "," vector } "]" ;

Identifiers are coordinates (x1..xn, t1..tk, w1..wq) or the functions sin,
cos, exp and sqrt.  Exponents are nonnegative integer literals; "-2^2"
therefore parses as -(2^2).  Parsing either succeeds or raises ParseError
with a 1-based position; no input crashes the parser.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NonFiniteError, ParseError, ValidationError

__all__ = [
    "Token",
    "tokenize",
    "Num",
    "Coord",
    "Neg",
    "BinOp",
    "Pow",
    "Call",
    "FUNCTIONS",
    "ExprParser",
    "parse_expression",
    "format_expr",
    "eval_expr",
    "free_names",
    "validate_expr",
]

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
}

_MAX_DEPTH = 200
_MAX_EXPONENT = 1_000_000

_SINGLE = {
    "+": "PLUS",
    "-": "MINUS",
    "*": "STAR",
    "/": "SLASH",
    "^": "CARET",
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ",": "COMMA",
    "=": "EQUALS",
    ".": "DOT",
}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def _is_ascii_digit(ch: str) -> bool:
    # str.isdigit accepts unicode digits that float() rejects
    return "0" <= ch <= "9"


def tokenize(text: str) -> list[Token]:
    """Scan text into tokens, keeping newlines; comments run from '#' to EOL."""
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            tokens.append(Token("NEWLINE", "\n", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if _is_ascii_digit(ch):
            start, start_col = i, col
            while i < n and _is_ascii_digit(text[i]):
                i += 1
            if i < n and text[i] == ".":
                i += 1
                while i < n and _is_ascii_digit(text[i]):
                    i += 1
            if i < n and text[i] in "eE":
                j = i + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and _is_ascii_digit(text[j]):
                    i = j
                    while i < n and _is_ascii_digit(text[i]):
                        i += 1
            lexeme = text[start:i]
            col = start_col + len(lexeme)
            if not math.isfinite(float(lexeme)):
                raise ParseError(f"number literal {lexeme!r} overflows", line, start_col)
            tokens.append(Token("NUMBER", lexeme, line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            start, start_col = i, col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            lexeme = text[start:i]
            col = start_col + len(lexeme)
            tokens.append(Token("IDENT", lexeme, line, start_col))
            continue
        kind = _SINGLE.get(ch)
        if kind is None:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        tokens.append(Token(kind, ch, line, col))
        i += 1
        col += 1
    tokens.append(Token("EOF", "", line, col))
    return tokens


def _is_int_literal(tok: Token) -> bool:
    return tok.kind == "NUMBER" and "." not in tok.text and "e" not in tok.text \
        and "E" not in tok.text


class Expr:
    """Base class for AST nodes; concrete nodes are frozen dataclasses."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Coord(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    power: int


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


class ExprParser:
    """Recursive-descent parser over a token list.

    The same instance parses plain expressions, vectors and matrices;
    scenario parsing drives it over per-statement token slices.
    """

    def __init__(self, tokens: list[Token], pos: int = 0):
        self.tokens = tokens
        self.pos = pos

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, expected_name: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"unexpected {tok.kind} {tok.text!r}", tok.line, tok.column,
                expected=(expected_name,),
            )
        return self.advance()

    def at_end(self) -> bool:
        return self.peek().kind == "EOF"

    # expression grammar ---------------------------------------------------

    def parse_expr(self, depth: int = 0) -> Expr:
        if depth > _MAX_DEPTH:
            tok = self.peek()
            raise ParseError("expression nests too deeply", tok.line, tok.column)
        node = self.parse_term(depth + 1)
        while self.peek().kind in ("PLUS", "MINUS"):
            op = self.advance().text
            node = BinOp(op, node, self.parse_term(depth + 1))
        return node

    def parse_term(self, depth: int) -> Expr:
        if depth > _MAX_DEPTH:
            tok = self.peek()
            raise ParseError("expression nests too deeply", tok.line, tok.column)
        node = self.parse_factor(depth + 1)
        while self.peek().kind in ("STAR", "SLASH"):
            op = self.advance().text
            node = BinOp(op, node, self.parse_factor(depth + 1))
        return node

    def parse_factor(self, depth: int) -> Expr:
        if depth > _MAX_DEPTH:
            tok = self.peek()
            raise ParseError("expression nests too deeply", tok.line, tok.column)
        if self.peek().kind == "MINUS":
            self.advance()
            return Neg(self.parse_factor(depth + 1))
        return self.parse_power(depth + 1)

    def parse_power(self, depth: int) -> Expr:
        node = self.parse_atom(depth + 1)
        if self.peek().kind == "CARET":
            self.advance()
            return Pow(node, self._parse_exponent())
        return node

    def _parse_exponent(self) -> int:
        tok = self.peek()
        if not _is_int_literal(tok):
            raise ParseError(
                f"exponent must be a nonnegative integer literal, got {tok.text!r}",
                tok.line, tok.column, expected=("integer",),
            )
        self.advance()
        value = int(tok.text)
        if self.peek().kind == "CARET":
            self.advance()
            upper = self._parse_exponent()
            if upper * math.log10(max(value, 2)) > 12:
                raise ParseError("integer exponent tower too large", tok.line, tok.column)
            value = value ** upper
        if value > _MAX_EXPONENT:
            raise ParseError("integer exponent too large", tok.line, tok.column)
        return value

    def parse_atom(self, depth: int) -> Expr:
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "IDENT":
            self.advance()
            if self.peek().kind == "LPAREN":
                self.advance()
                arg = self.parse_expr(depth + 1)
                self.expect("RPAREN", "')'")
                return Call(tok.text, arg)
            return Coord(tok.text)
        if tok.kind == "LPAREN":
            self.advance()
            node = self.parse_expr(depth + 1)
            self.expect("RPAREN", "')'")
            return node
        raise ParseError(
            f"unexpected {tok.kind} {tok.text!r}", tok.line, tok.column,
            expected=("number", "identifier", "'('"),
        )

    # aggregate values -----------------------------------------------------

    def parse_vector(self) -> tuple[Expr, ...]:
        self.expect("LBRACKET", "'['")
        entries = [self.parse_expr()]
        while self.peek().kind == "COMMA":
            self.advance()
            entries.append(self.parse_expr())
        self.expect("RBRACKET", "']'")
        return tuple(entries)

    def parse_matrix(self) -> tuple[tuple[Expr, ...], ...]:
        open_tok = self.expect("LBRACKET", "'['")
        rows = [self.parse_vector()]
        while self.peek().kind == "COMMA":
            self.advance()
            rows.append(self.parse_vector())
        self.expect("RBRACKET", "']'")
        width = len(rows[0])
        for idx, row in enumerate(rows):
            if len(row) != width:
                raise ValidationError(
                    f"matrix starting at line {open_tok.line} is ragged: "
                    f"row {idx + 1} has {len(row)} entries, expected {width}"
                )
        return tuple(rows)

    def parse_value(self):
        """Expression, vector or matrix, dispatched on the leading brackets."""
        if self.peek().kind == "LBRACKET":
            after = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else self.peek()
            if after.kind == "LBRACKET":
                return self.parse_matrix()
            return self.parse_vector()
        return self.parse_expr()


def parse_expression(text: str) -> Expr:
    """Parse a single expression; the whole string must be consumed."""
    parser = ExprParser(tokenize(text))
    node = parser.parse_expr()
    while parser.peek().kind == "NEWLINE":
        parser.advance()
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing {tok.kind} {tok.text!r} after expression",
                         tok.line, tok.column, expected=("end of input",))
    return node


_LEVEL_SUM, _LEVEL_PROD, _LEVEL_UNARY, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _LEVEL_SUM if e.op in "+-" else _LEVEL_PROD
    if isinstance(e, Neg):
        return _LEVEL_UNARY
    if isinstance(e, Pow):
        return _LEVEL_POW
    return _LEVEL_ATOM


def _wrap(e: Expr, minimum: int) -> str:
    text = format_expr(e)
    return f"({text})" if _level(e) < minimum else text


def format_expr(e: Expr) -> str:
    """Render an AST back to source; parsing the output reproduces the AST."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Coord):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _LEVEL_UNARY)
    if isinstance(e, Pow):
        return _wrap(e.base, _LEVEL_ATOM) + f"^{e.power}"
    if isinstance(e, Call):
        return f"{e.fn}({format_expr(e.arg)})"
    if isinstance(e, BinOp):
        own = _level(e)
        return f"{_wrap(e.left, own)}{e.op}{_wrap(e.right, own + 1)}"
    raise TypeError(f"not an expression node: {e!r}")


def eval_expr(e: Expr, env: dict) -> float:
    """Evaluate an AST over a coordinate environment.

    Division by zero, square roots of negative numbers and overflow raise
    NonFiniteError; everything else is plain float arithmetic.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Coord):
        try:
            return env[e.name]
        except KeyError:
            raise ValidationError(f"unknown coordinate {e.name!r} at evaluation") from None
    if isinstance(e, Neg):
        return -eval_expr(e.arg, env)
    if isinstance(e, Pow):
        try:
            return float(eval_expr(e.base, env) ** e.power)
        except OverflowError:
            raise NonFiniteError("power overflows") from None
    if isinstance(e, Call):
        arg = eval_expr(e.arg, env)
        if e.fn == "sqrt" and arg < 0:
            raise NonFiniteError(f"sqrt of negative value {arg}")
        try:
            return FUNCTIONS[e.fn](arg)
        except KeyError:
            raise ValidationError(f"unknown function {e.fn!r}") from None
        except OverflowError:
            raise NonFiniteError(f"{e.fn} overflows") from None
    if isinstance(e, BinOp):
        left = eval_expr(e.left, env)
        right = eval_expr(e.right, env)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if right == 0.0:
            raise NonFiniteError("division by zero")
        return left / right
    raise TypeError(f"not an expression node: {e!r}")


def free_names(e: Expr) -> set[str]:
    """Coordinate names referenced by an expression."""
    if isinstance(e, Num):
        return set()
    if isinstance(e, Coord):
        return {e.name}
    if isinstance(e, Neg):
        return free_names(e.arg)
    if isinstance(e, Pow):
        return free_names(e.base)
    if isinstance(e, Call):
        return free_names(e.arg)
    if isinstance(e, BinOp):
        return free_names(e.left) | free_names(e.right)
    raise TypeError(f"not an expression node: {e!r}")


def _function_names(e: Expr) -> set[str]:
    if isinstance(e, Call):
        return {e.fn} | _function_names(e.arg)
    if isinstance(e, Neg):
        return _function_names(e.arg)
    if isinstance(e, Pow):
        return _function_names(e.base)
    if isinstance(e, BinOp):
        return _function_names(e.left) | _function_names(e.right)
    return set()


def validate_expr(e: Expr, allowed: set[str], context: str) -> None:
    """Reject unknown coordinates or functions with a descriptive error."""
    unknown = free_names(e) - set(allowed)
    if unknown:
        raise ValidationError(
            f"{context}: unknown identifier(s) {sorted(unknown)}; "
            f"allowed coordinates are {sorted(allowed)}"
        )
    bad_fns = _function_names(e) - set(FUNCTIONS)
    if bad_fns:
        raise ValidationError(
            f"{context}: unknown function(s) {sorted(bad_fns)}; "
            f"available functions are {sorted(FUNCTIONS)}"
        )
