"""Manifest files: declarations of rings, maps, twists, schemes and points, followed by queries.

The format is line oriented; a statement may continue over several lines inside brackets.

    ring A = QQ[x, y] / (x*y)
    ring B = image(f)
    ring C0 = localize(A, x)
    map f : A -> B { x -> u^2 - 1, y -> u^3 - u }
    twist T = double(U = A, invert = [x, 1 - x], tau = { Z -> x*Z*inv(1 - x) })
    scheme S = glue(U = A, V = B, along = C0, rhoU = f, rhoV = g)
    point P = (U, ideal(x - 1))
    assert integral S
    query separator S

``print_manifest`` writes a manifest back out; parsing the result gives an equal manifest.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..expr import ParseError, Token, TokenStream, format_expr, parse_expr, tokenize

Expr = tuple


@dataclass(frozen=True)
class Pos:
    line: int
    col: int


def _pos(tok: Token) -> Pos:
    return Pos(tok.line, tok.col)


@dataclass(frozen=True)
class PolyRingDecl:
    name: str
    field: str  # "QQ" or "GF(p)"
    variables: tuple
    relations: tuple
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class ImageDecl:
    name: str
    map: str
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class LocalizeDecl:
    name: str
    ring: str
    element: Expr
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class MapDecl:
    name: str
    source: str
    target: str
    images: tuple  # ((generator, expr), ...)
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class TwistDecl:
    name: str
    ring: str
    invert: tuple
    tau: tuple
    inverse: Optional[tuple] = None
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class GlueDecl:
    name: str
    U: str
    V: str
    along: str
    rhoU: str
    rhoV: str
    invertU: Optional[tuple] = None
    invertV: Optional[tuple] = None
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class PointDecl:
    name: str
    chart: str
    generators: tuple
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class AssertDecl:
    property: str  # "integral" or "connected"
    target: str
    pos: Pos = field(default=None, compare=False)


@dataclass(frozen=True)
class Query:
    kind: str
    args: tuple  # names
    expr: Optional[Expr] = None
    pos: Pos = field(default=None, compare=False)

    @property
    def label(self) -> str:
        parts = [self.kind, *self.args]
        if self.expr is not None:
            parts += [":", format_expr(self.expr)]
        return " ".join(parts)


Declaration = Union[PolyRingDecl, ImageDecl, LocalizeDecl, MapDecl, TwistDecl, GlueDecl, PointDecl,
                    AssertDecl]


@dataclass(frozen=True)
class Manifest:
    statements: tuple = ()

    @property
    def declarations(self) -> tuple:
        return tuple(s for s in self.statements if not isinstance(s, Query))

    @property
    def queries(self) -> tuple:
        return tuple(s for s in self.statements if isinstance(s, Query))


# query kind -> kinds of its name arguments; "expr" marks a trailing ': expression'
QUERY_SIGNATURES = {
    "separator": ("scheme",),
    "check-separator": ("scheme",),
    "check-separated": ("scheme",),
    "build-separator": ("scheme",),
    "dominant": ("scheme",),
    "closure": ("scheme",),
    "apparented": ("scheme", "point", "point"),
    "identified": ("scheme", "point", "point"),
    "flat": ("map",),
    "etale": ("map",),
    "kernel": ("map",),
    "image": ("map",),
    "member": ("map|scheme", "expr"),
}

ASSERTABLE = ("integral", "connected")


def _names_in(ts: TokenStream, open_: str, close: str) -> tuple:
    opener = ts.expect(open_)
    names = []
    if not ts.at(close):
        names.append(ts.expect_name().text)
        while ts.accept(","):
            names.append(ts.expect_name().text)
    ts.expect(close, opener)
    return tuple(names)


def _exprs_in(ts: TokenStream, open_: str, close: str) -> tuple:
    opener = ts.expect(open_)
    items = []
    if not ts.at(close):
        items.append(parse_expr(ts))
        while ts.accept(","):
            items.append(parse_expr(ts))
    ts.expect(close, opener)
    return tuple(items)


def _assignments(ts: TokenStream) -> tuple:
    """{ name -> expr, ... }"""
    opener = ts.expect("{")
    items = []
    if not ts.at("}"):
        while True:
            name = ts.expect_name().text
            ts.expect("->")
            items.append((name, parse_expr(ts)))
            if not ts.accept(","):
                break
    ts.expect("}", opener)
    return tuple(items)


def _keywords(ts: TokenStream, spec: dict) -> dict:
    """( key = value, ... ) where spec maps each key to a value parser."""
    opener = ts.expect("(")
    out: dict = {}
    while not ts.at(")"):
        key_tok = ts.expect_name()
        key = key_tok.text
        if key not in spec:
            raise ParseError(f"unknown argument {key!r}; expected one of {', '.join(spec)}", key_tok.line,
                             key_tok.col)
        if key in out:
            raise ParseError(f"argument {key!r} given twice", key_tok.line, key_tok.col)
        ts.expect("=")
        out[key] = spec[key](ts)
        if not ts.accept(","):
            break
    ts.expect(")", opener)
    return out


def _name(ts):
    return ts.expect_name().text


def _field(ts: TokenStream) -> str:
    tok = ts.expect_name()
    if tok.text == "QQ":
        return "QQ"
    if tok.text == "GF":
        opener = ts.expect("(")
        p = ts.expect_number()
        ts.expect(")", opener)
        return f"GF({p})"
    raise ParseError(f"unknown coefficient field {tok.text!r}; use QQ or GF(p)", tok.line, tok.col)


def _parse_ring(ts: TokenStream, name: str, pos: Pos):
    head = ts.peek()
    if head.kind == "NAME" and head.text == "image" and ts.peek(1).text == "(":
        ts.next()
        opener = ts.expect("(")
        m = _name(ts)
        ts.expect(")", opener)
        return ImageDecl(name, m, pos)
    if head.kind == "NAME" and head.text == "localize" and ts.peek(1).text == "(":
        ts.next()
        opener = ts.expect("(")
        r = _name(ts)
        ts.expect(",")
        e = parse_expr(ts)
        ts.expect(")", opener)
        return LocalizeDecl(name, r, e, pos)
    fld = _field(ts)
    variables = _names_in(ts, "[", "]")
    relations: tuple = ()
    if ts.accept("/"):
        relations = _exprs_in(ts, "(", ")")
    return PolyRingDecl(name, fld, variables, relations, pos)


def _parse_statement(ts: TokenStream):
    tok = ts.expect_name()
    pos = _pos(tok)
    kw = tok.text
    if kw == "ring":
        name = _name(ts)
        ts.expect("=")
        return _parse_ring(ts, name, pos)
    if kw == "map":
        name = _name(ts)
        ts.expect(":")
        src = _name(ts)
        ts.expect("->")
        tgt = _name(ts)
        return MapDecl(name, src, tgt, _assignments(ts), pos)
    if kw == "twist":
        name = _name(ts)
        ts.expect("=")
        head = ts.expect_name()
        if head.text != "double":
            raise ParseError(f"expected 'double(...)', found {head.text!r}", head.line, head.col)
        args = _keywords(ts, {
            "U": _name,
            "invert": lambda t: _exprs_in(t, "[", "]"),
            "tau": _assignments,
            "inverse": _assignments,
        })
        if "U" not in args:
            raise ParseError("double(...) needs U = <ring>", head.line, head.col)
        return TwistDecl(name, args["U"], args.get("invert", ()), args.get("tau", ()), args.get("inverse"), pos)
    if kw == "scheme":
        name = _name(ts)
        ts.expect("=")
        head = ts.expect_name()
        if head.text != "glue":
            raise ParseError(f"expected 'glue(...)', found {head.text!r}", head.line, head.col)
        invert = lambda t: _exprs_in(t, "[", "]")  # noqa: E731
        args = _keywords(ts, {"U": _name, "V": _name, "along": _name, "rhoU": _name, "rhoV": _name,
                              "invertU": invert, "invertV": invert})
        missing = [k for k in ("U", "V", "along", "rhoU", "rhoV") if k not in args]
        if missing:
            raise ParseError(f"glue(...) is missing {', '.join(missing)}", head.line, head.col)
        return GlueDecl(name, args["U"], args["V"], args["along"], args["rhoU"], args["rhoV"],
                        args.get("invertU"), args.get("invertV"), pos)
    if kw == "point":
        name = _name(ts)
        ts.expect("=")
        opener = ts.expect("(")
        chart = ts.expect_name()
        if chart.text not in ("U", "V"):
            raise ParseError(f"point chart must be U or V, not {chart.text!r}", chart.line, chart.col)
        ts.expect(",")
        head = ts.expect_name()
        if head.text != "ideal":
            raise ParseError(f"expected 'ideal(...)', found {head.text!r}", head.line, head.col)
        gens = _exprs_in(ts, "(", ")")
        ts.expect(")", opener)
        return PointDecl(name, chart.text, gens, pos)
    if kw == "assert":
        prop = ts.expect_name()
        if prop.text not in ASSERTABLE:
            raise ParseError(f"can only assert {' or '.join(ASSERTABLE)}, not {prop.text!r}", prop.line, prop.col)
        return AssertDecl(prop.text, _name(ts), pos)
    if kw == "query":
        kind_tok = ts.expect_name()
        kind = kind_tok.text
        while ts.at("-"):  # hyphenated query names
            ts.next()
            kind += "-" + ts.expect_name().text
        if kind not in QUERY_SIGNATURES:
            raise ParseError(f"unknown query {kind!r}", kind_tok.line, kind_tok.col)
        sig = QUERY_SIGNATURES[kind]
        names = tuple(_name(ts) for s in sig if s != "expr")
        expr = None
        if "expr" in sig:
            ts.expect(":")
            expr = parse_expr(ts)
        return Query(kind, names, expr, pos)
    raise ParseError(f"unknown statement {kw!r}", tok.line, tok.col)


def _kind_of(stmt) -> str:
    if isinstance(stmt, (PolyRingDecl, ImageDecl, LocalizeDecl)):
        return "ring"
    if isinstance(stmt, MapDecl):
        return "map"
    if isinstance(stmt, (TwistDecl, GlueDecl)):
        return "scheme"
    if isinstance(stmt, PointDecl):
        return "point"
    return ""


def _check_names(statements) -> None:
    """Every referenced name is declared earlier with the right kind."""
    declared: dict = {}

    def need(name, kinds, pos):
        kinds = kinds.split("|")
        if name not in declared:
            raise ParseError(f"undeclared name {name!r}", pos.line, pos.col)
        if declared[name] not in kinds:
            raise ParseError(f"{name!r} is a {declared[name]}, expected a {' or '.join(kinds)}", pos.line, pos.col)

    for s in statements:
        p = s.pos
        if isinstance(s, ImageDecl):
            need(s.map, "map", p)
        elif isinstance(s, LocalizeDecl):
            need(s.ring, "ring", p)
        elif isinstance(s, MapDecl):
            need(s.source, "ring", p)
            need(s.target, "ring", p)
        elif isinstance(s, TwistDecl):
            need(s.ring, "ring", p)
        elif isinstance(s, GlueDecl):
            for r in (s.U, s.V, s.along):
                need(r, "ring", p)
            for m in (s.rhoU, s.rhoV):
                need(m, "map", p)
        elif isinstance(s, AssertDecl):
            need(s.target, "ring|scheme", p)
        elif isinstance(s, Query):
            sig = [k for k in QUERY_SIGNATURES[s.kind] if k != "expr"]
            for name, kind in zip(s.args, sig):
                need(name, kind, p)
        kind = _kind_of(s)
        if kind:
            if s.name in declared:
                raise ParseError(f"{s.name!r} is already declared", p.line, p.col)
            declared[s.name] = kind


def parse(text: str) -> Manifest:
    ts = TokenStream(tokenize(text))
    statements = []
    ts.skip_newlines()
    while ts.peek().kind != "EOF":
        statements.append(_parse_statement(ts))
        tok = ts.peek()
        if tok.kind not in ("NEWLINE", "EOF") and not ts.at(";"):
            raise ParseError(f"unexpected {tok.text!r} after statement", tok.line, tok.col)
        ts.accept(";")
        ts.skip_newlines()
    _check_names(statements)
    return Manifest(tuple(statements))


# -- printing


def _exprs(items) -> str:
    return ", ".join(format_expr(e) for e in items)


def _assign(items) -> str:
    return "{ " + ", ".join(f"{n} -> {format_expr(e)}" for n, e in items) + " }" if items else "{ }"


def print_statement(s) -> str:
    if isinstance(s, PolyRingDecl):
        out = f"ring {s.name} = {s.field}[{', '.join(s.variables)}]"
        if s.relations:
            out += f" / ({_exprs(s.relations)})"
        return out
    if isinstance(s, ImageDecl):
        return f"ring {s.name} = image({s.map})"
    if isinstance(s, LocalizeDecl):
        return f"ring {s.name} = localize({s.ring}, {format_expr(s.element)})"
    if isinstance(s, MapDecl):
        return f"map {s.name} : {s.source} -> {s.target} {_assign(s.images)}"
    if isinstance(s, TwistDecl):
        args = [f"U = {s.ring}", f"invert = [{_exprs(s.invert)}]", f"tau = {_assign(s.tau)}"]
        if s.inverse is not None:
            args.append(f"inverse = {_assign(s.inverse)}")
        return f"twist {s.name} = double({', '.join(args)})"
    if isinstance(s, GlueDecl):
        args = [f"U = {s.U}", f"V = {s.V}", f"along = {s.along}", f"rhoU = {s.rhoU}", f"rhoV = {s.rhoV}"]
        if s.invertU is not None:
            args.append(f"invertU = [{_exprs(s.invertU)}]")
        if s.invertV is not None:
            args.append(f"invertV = [{_exprs(s.invertV)}]")
        return f"scheme {s.name} = glue({', '.join(args)})"
    if isinstance(s, PointDecl):
        return f"point {s.name} = ({s.chart}, ideal({_exprs(s.generators)}))"
    if isinstance(s, AssertDecl):
        return f"assert {s.property} {s.target}"
    if isinstance(s, Query):
        out = f"query {s.kind} {' '.join(s.args)}"
        if s.expr is not None:
            out += f" : {format_expr(s.expr)}"
        return out
    raise TypeError(f"not a manifest statement: {s!r}")


def print_manifest(m: Manifest) -> str:
    return "".join(print_statement(s) + "\n" for s in m.statements)
