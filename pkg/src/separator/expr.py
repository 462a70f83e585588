"""Tokenizer and polynomial-expression grammar shared by the library and the manifest parser.

Expressions are kept as small tuple ASTs so manifests can be printed back exactly:
``("num", n)``, ``("var", name)``, ``("neg", a)``, ``("inv", a)``, ``("pow", a, n)`` and
binary ``("add" | "sub" | "mul" | "div", a, b)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from .cas.poly import Poly, PolyRing


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col, self.message = line, col, message
        super().__init__(f"line {line}, column {col}: {message}" if line else message)


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, NUMBER, OP, NEWLINE, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)|(?P<num>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>->|\*\*|[-+*/^()\[\]{},=:;])"
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos, braces = 1, 0, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            if braces == 0:
                tokens.append(Token("NEWLINE", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "num":
            tokens.append(Token("NUMBER", s, line, col))
        elif kind == "name":
            tokens.append(Token("NAME", s, line, col))
        elif kind == "op":
            if s in "([{":
                braces += 1
            elif s in ")]}":
                braces = max(0, braces - 1)
            tokens.append(Token("OP", "^" if s == "**" else s, line, col))
        pos = m.end()
    tokens.append(Token("NEWLINE", "\n", line, pos - line_start + 1))
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("OP", "NAME") and tok.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str, opener: Optional[Token] = None) -> Token:
        tok = self.peek()
        if self.at(text):
            return self.next()
        if opener is not None:
            raise ParseError(
                f"expected {text!r} to close {opener.text!r} opened at line {opener.line}, "
                f"column {opener.col}; found {_describe(tok)}",
                opener.line,
                opener.col,
            )
        raise ParseError(f"expected {text!r}, found {_describe(tok)}", tok.line, tok.col)

    def expect_name(self) -> Token:
        tok = self.peek()
        if tok.kind != "NAME":
            raise ParseError(f"expected a name, found {_describe(tok)}", tok.line, tok.col)
        return self.next()

    def expect_number(self) -> int:
        tok = self.peek()
        if tok.kind != "NUMBER":
            raise ParseError(f"expected a number, found {_describe(tok)}", tok.line, tok.col)
        self.next()
        return int(tok.text)

    def skip_newlines(self):
        while self.peek().kind == "NEWLINE":
            self.next()


def _describe(tok: Token) -> str:
    if tok.kind == "EOF":
        return "end of input"
    if tok.kind == "NEWLINE":
        return "end of line"
    return repr(tok.text)


# -- grammar: sum := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
#             unary := '-' unary | power; power := atom ('^' NUMBER)?


def parse_expr(ts: TokenStream):
    node = _term(ts)
    while ts.at("+") or ts.at("-"):
        op = ts.next().text
        rhs = _term(ts)
        node = ("add" if op == "+" else "sub", node, rhs)
    return node


def _term(ts):
    node = _unary(ts)
    while ts.at("*") or ts.at("/"):
        op = ts.next().text
        rhs = _unary(ts)
        node = ("mul" if op == "*" else "div", node, rhs)
    return node


def _unary(ts):
    if ts.accept("-"):
        return ("neg", _unary(ts))
    return _power(ts)


def _power(ts):
    node = _atom(ts)
    if ts.accept("^"):
        node = ("pow", node, ts.expect_number())
    return node


def _atom(ts):
    tok = ts.peek()
    if tok.kind == "NUMBER":
        ts.next()
        return ("num", int(tok.text))
    if tok.kind == "NAME":
        ts.next()
        if tok.text == "inv" and ts.at("("):
            opener = ts.next()
            inner = parse_expr(ts)
            ts.expect(")", opener)
            return ("inv", inner)
        return ("var", tok.text)
    if ts.at("("):
        opener = ts.next()
        inner = parse_expr(ts)
        ts.expect(")", opener)
        return inner
    raise ParseError(f"expected an expression, found {_describe(tok)}", tok.line, tok.col)


def parse_expression(text: str):
    ts = TokenStream(tokenize(text))
    node = parse_expr(ts)
    ts.skip_newlines()
    if ts.peek().kind != "EOF":
        tok = ts.peek()
        raise ParseError(f"unexpected {_describe(tok)}", tok.line, tok.col)
    return node


_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4, "num": 5, "var": 5, "inv": 5}


def format_expr(node) -> str:
    kind = node[0]
    if kind == "num":
        return str(node[1])
    if kind == "var":
        return node[1]
    if kind == "inv":
        return f"inv({format_expr(node[1])})"
    if kind == "neg":
        return "-" + _wrap(node[1], 3)
    if kind == "pow":
        return f"{_wrap(node[1], 5)}^{node[2]}"
    sym = {"add": " + ", "sub": " - ", "mul": "*", "div": "/"}[kind]
    p = _PREC[kind]
    return _wrap(node[1], p) + sym + _wrap(node[2], p + 1)


def _wrap(node, min_prec):
    s = format_expr(node)
    return s if _PREC[node[0]] >= min_prec else f"({s})"


@dataclass
class Context:
    ring: PolyRing
    var: Callable[[str], Poly]
    inv: Optional[Callable[[Poly], Poly]] = None


def evaluate(node, ctx: Context) -> Poly:
    kind = node[0]
    if kind == "num":
        return ctx.ring.const(node[1])
    if kind == "var":
        return ctx.var(node[1])
    if kind == "neg":
        return -evaluate(node[1], ctx)
    if kind == "pow":
        return evaluate(node[1], ctx) ** node[2]
    if kind == "inv":
        inner = evaluate(node[1], ctx)
        if inner.is_constant() and inner:
            return ctx.ring.const(ctx.ring.field.inv(inner.constant_coeff()))
        if ctx.inv is None:
            raise ValueError(f"inv({format_expr(node[1])}) is not available here")
        return ctx.inv(inner)
    a = evaluate(node[1], ctx)
    b = evaluate(node[2], ctx)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        if not (b.is_constant() and b):
            raise ValueError("division is only allowed by nonzero constants; use inv(...)")
        return a.scale(ctx.ring.field.inv(b.constant_coeff()))
    raise ValueError(f"bad expression node {node!r}")
