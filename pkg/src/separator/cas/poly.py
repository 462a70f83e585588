"""Sparse multivariate polynomials over a coefficient field."""
from __future__ import annotations

from typing import Iterable, Sequence

from .field import QQ, RATIONAL_TYPES, Field
from .order import MonomialOrder, grevlex


class PolyRing:
    """k[x_1, ..., x_n] with a fixed variable order."""

    def __init__(self, names: Sequence[str], field: Field = QQ):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        self.names = names
        self.field = field
        self.nvars = len(names)
        self._index = {n: i for i, n in enumerate(names)}
        self._zero_exp = (0,) * self.nvars

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.names == other.names and self.field == other.field

    def __hash__(self):
        return hash((self.names, self.field))

    def __repr__(self):
        return f"{self.field}[{','.join(self.names)}]"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no variable {name!r} in {self!r}") from None

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        c = self.field(c)
        return Poly(self, {self._zero_exp: c} if c != 0 else {})

    def gen(self, i) -> "Poly":
        if isinstance(i, str):
            i = self.index(i)
        exp = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Poly(self, {exp: self.field(1)})

    def gens(self) -> list["Poly"]:
        return [self.gen(i) for i in range(self.nvars)]

    def monomial(self, exp, coeff=1) -> "Poly":
        coeff = self.field(coeff)
        return Poly(self, {tuple(exp): coeff} if coeff != 0 else {})

    def __call__(self, value) -> "Poly":
        if isinstance(value, Poly):
            if value.ring != self:
                raise ValueError(f"variable-list mismatch: {value.ring!r} vs {self!r}")
            return value
        if isinstance(value, str):
            from ..expr import parse_expression, evaluate

            return evaluate(parse_expression(value), self.poly_context())
        return self.const(value)

    def poly_context(self):
        from ..expr import Context

        return Context(self, lambda name: self.gen(name))

    def with_field(self, field: Field) -> "PolyRing":
        return PolyRing(self.names, field)


class Poly:
    """Immutable polynomial; ``terms`` maps exponent tuples to nonzero coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring._zero_exp in self.terms)

    def constant_coeff(self):
        return self.terms.get(self.ring._zero_exp, self.ring.field(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def lm(self, order: MonomialOrder = grevlex):
        return max(self.terms, key=order.key)

    def lc(self, order: MonomialOrder = grevlex):
        return self.terms[self.lm(order)]

    def sorted_terms(self, order: MonomialOrder = grevlex):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def monic(self, order: MonomialOrder = grevlex) -> "Poly":
        if not self.terms:
            return self
        F = self.ring.field
        c = F.inv(self.lc(order))
        return Poly(self.ring, {e: F.norm(v * c) for e, v in self.terms.items()})

    # -- arithmetic
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError(f"variable-list mismatch: {self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, RATIONAL_TYPES):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.ring.field
        out = dict(self.terms)
        for e, v in other.terms.items():
            s = F.norm(out.get(e, 0) + v)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.ring.field
        return Poly(self.ring, {e: F.norm(-v) for e, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.ring.field
        out: dict = {}
        for e1, v1 in self.terms.items():
            for e2, v2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + v1 * v2
        return Poly(self.ring, {e: F.norm(v) for e, v in out.items() if F.norm(v)})

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        F = self.ring.field
        c = F(c)
        if c == 0:
            return self.ring.zero()
        return Poly(self.ring, {e: F.norm(v * c) for e, v in self.terms.items()})

    def mul_term(self, exp, c) -> "Poly":
        F = self.ring.field
        return Poly(self.ring, {tuple(a + b for a, b in zip(e, exp)): F.norm(v * c) for e, v in self.terms.items()})

    def __truediv__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            return self.scale(self.ring.field.inv(self.ring.field(other)))
        other = self._coerce(other)
        if other.is_constant() and other:
            return self.scale(self.ring.field.inv(other.constant_coeff()))
        q, r = divmod_exact(self, other)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.names, frozenset(self.terms.items())))

    # -- transformations
    def derivative(self, i: int) -> "Poly":
        F = self.ring.field
        out = {}
        for e, v in self.terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
                c = F.norm(v * e[i])
                if c:
                    out[ne] = c
        return Poly(self.ring, out)

    def substitute(self, images: Sequence["Poly"], ring: PolyRing | None = None) -> "Poly":
        """Evaluate at ``images`` (one polynomial of ``ring`` per variable)."""
        if ring is None:
            ring = images[0].ring if images else self.ring
        result = ring.zero()
        cache: dict = {}
        for e, v in self.terms.items():
            term = ring.const(v) if ring.field == self.ring.field else ring.const(ring.field(v))
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = images[i] ** a
                    term = term * cache[key]
            result = result + term
        return result

    def transfer(self, ring: PolyRing) -> "Poly":
        """Move into ``ring`` by variable name; every used variable must exist there."""
        used = self.variables()
        idx = {i: ring.index(self.ring.names[i]) for i in used}
        out = {}
        for e, v in self.terms.items():
            ne = [0] * ring.nvars
            for i in used:
                ne[idx[i]] += e[i]
            out[tuple(ne)] = ring.field(v) if ring.field != self.ring.field else v
        return Poly(ring, {e: v for e, v in out.items() if v})

    def embed(self, ring: PolyRing, positions: Sequence[int]) -> "Poly":
        """Send variable i to variable positions[i] of ``ring``."""
        out = {}
        for e, v in self.terms.items():
            ne = [0] * ring.nvars
            for i, a in enumerate(e):
                if a:
                    ne[positions[i]] += a
            out[tuple(ne)] = v
        return Poly(ring, out)

    def change_field(self, field: Field) -> "Poly":
        ring = self.ring.with_field(field)
        out = {}
        for e, v in self.terms.items():
            c = field(v)
            if c:
                out[e] = c
        return Poly(ring, out)

    def evaluate(self, point: Sequence):
        F = self.ring.field
        total = F(0)
        for e, v in self.terms.items():
            t = v
            for x, a in zip(point, e):
                if a:
                    t = t * x**a
            total = total + t
        return F.norm(total)

    # -- printing
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r} in {self.ring!r})"


def _format_monomial(names, exp):
    parts = []
    for n, a in zip(names, exp):
        if a == 1:
            parts.append(n)
        elif a:
            parts.append(f"{n}^{a}")
    return "*".join(parts)


def format_poly(p: Poly, order: MonomialOrder = grevlex) -> str:
    if not p.terms:
        return "0"
    out = []
    for exp, c in p.sorted_terms(order):
        mono = _format_monomial(p.ring.names, exp)
        neg = p.ring.field.characteristic == 0 and c < 0
        a = -c if neg else c
        if mono and a == 1:
            body = mono
        elif mono:
            body = f"{a}*{mono}"
        else:
            body = str(a)
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def divmod_exact(f: Poly, g: Poly, order: MonomialOrder = grevlex):
    """Multivariate division of f by a single g: f = q*g + r, r with no term divisible by lm(g)."""
    if not g:
        raise ZeroDivisionError("division by zero polynomial")
    F = f.ring.field
    lm = g.lm(order)
    lc_inv = F.inv(g.terms[lm])
    p = dict(f.terms)
    q: dict = {}
    r: dict = {}
    key = order.key
    while p:
        m = max(p, key=key)
        c = p[m]
        if all(a >= b for a, b in zip(m, lm)):
            shift = tuple(a - b for a, b in zip(m, lm))
            k = F.norm(c * lc_inv)
            q[shift] = F.norm(q.get(shift, 0) + k)
            for e, v in g.terms.items():
                ne = tuple(a + b for a, b in zip(e, shift))
                s = F.norm(p.get(ne, 0) - k * v)
                if s:
                    p[ne] = s
                else:
                    p.pop(ne, None)
        else:
            r[m] = c
            del p[m]
    return Poly(f.ring, {e: v for e, v in q.items() if v}), Poly(f.ring, r)


def poly_sum(polys: Iterable[Poly], ring: PolyRing) -> Poly:
    total = ring.zero()
    for p in polys:
        total = total + p
    return total
