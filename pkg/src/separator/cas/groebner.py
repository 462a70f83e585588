"""Buchberger's algorithm, normal forms, and ideal operations built on them."""
from __future__ import annotations

import heapq
import operator
import threading
from typing import Iterable, Sequence

from .budget import BudgetExceeded, current_budget
from .order import MonomialOrder, block, grevlex
from .poly import Poly, PolyRing, divmod_exact


_le = operator.le


def _divides(a, b) -> bool:
    return all(map(_le, a, b))


class _Keys(dict):
    def __init__(self, order: MonomialOrder):
        super().__init__()
        self.order = order
        self.neg: dict = {}

    def __missing__(self, exp):
        k = self[exp] = self.order.key(exp)
        return k

    def heap_key(self, exp):
        """Key under which the largest monomial comes first in a min-heap."""
        k = self.neg.get(exp)
        if k is None:
            k = self.neg[exp] = tuple(-v for v in self[exp])
        return k


_SHARED: dict = {}
_SHARED_LIMIT = 500_000
_shared_lock = threading.Lock()


def _keys_for(order: MonomialOrder) -> _Keys:
    """Key cache shared by all computations in one order; dropped when it grows too large."""
    with _shared_lock:
        keys = _SHARED.get(order)
        if keys is None or len(keys) > _SHARED_LIMIT:
            keys = _SHARED[order] = _Keys(order)
        return keys


class _Steps:
    __slots__ = ("n", "limit")

    def __init__(self, limit):
        self.n = 0
        self.limit = limit

    def tick(self):
        self.n += 1
        if self.n > self.limit:
            raise BudgetExceeded(f"Groebner step budget of {self.limit} reductions exceeded")


def _reduce(p: dict, basis, keys, F, steps: _Steps, full: bool = True) -> dict:
    """Remainder of p modulo ``basis`` = [(lm, terms)] with monic elements."""
    p = dict(p)
    rem: dict = {}
    hk = keys.heap_key
    heap = [(hk(e), e) for e in p]
    heapq.heapify(heap)
    push, pop = heapq.heappush, heapq.heappop
    while heap:
        m = pop(heap)[1]
        c = p.get(m)
        if c is None:
            continue  # cancelled earlier, or a duplicate heap entry
        for lm, g in basis:
            if all(map(_le, lm, m)):
                steps.tick()
                shift = tuple(map(operator.sub, m, lm))
                for e, v in g.items():
                    ne = tuple(map(operator.add, e, shift))
                    old = p.get(ne)
                    s = F.norm((old or 0) - c * v)
                    if s:
                        p[ne] = s
                        if old is None:
                            push(heap, (hk(ne), ne))
                    elif old is not None:
                        del p[ne]
                break
        else:
            if not full:
                rem.update(p)
                return rem
            rem[m] = c
            del p[m]
    return rem


def _monic(terms: dict, lm, F) -> dict:
    inv = F.inv(terms[lm])
    return {e: F.norm(v * inv) for e, v in terms.items()}


def buchberger(polys: Sequence[Poly], order: MonomialOrder = grevlex) -> list[Poly]:
    """Reduced Groebner basis of the ideal generated by ``polys``.

    Pairs are treated by smallest lcm total degree, ties broken by generator index,
    so the output is reproducible. The result is sorted by increasing leading monomial.
    """
    polys = [p for p in polys if p]
    if not polys:
        return []
    ring = polys[0].ring
    F = ring.field
    budget = current_budget()
    steps = _Steps(budget.max_steps)
    keys = _keys_for(order)

    basis: list[tuple] = []  # (lm, terms)
    pending: set = set()
    heap: list = []

    def add(terms: dict):
        lm = max(terms, key=keys.__getitem__)
        terms = _monic(terms, lm, F)
        if sum(lm) > budget.max_degree:
            raise BudgetExceeded(f"Groebner degree bound {budget.max_degree} exceeded")
        k = len(basis)
        basis.append((lm, terms))
        if len(basis) > budget.max_basis:
            raise BudgetExceeded(f"Groebner basis size bound {budget.max_basis} exceeded")
        for i in range(k):
            lmi = basis[i][0]
            lcm = tuple(max(a, b) for a, b in zip(lmi, lm))
            if all(a == 0 or b == 0 for a, b in zip(lmi, lm)):
                continue  # coprime leading monomials: S-polynomial reduces to zero
            heapq.heappush(heap, (sum(lcm), i, k, lcm))
            pending.add((i, k))
        return lm

    for p in polys:
        r = _reduce(p.terms, basis, keys, F, steps)
        if r:
            lm = add(r)
            if not any(lm):
                return [ring.one()]

    while heap:
        _, i, j, lcm = heapq.heappop(heap)
        pending.discard((i, j))
        skip = False
        for k in range(len(basis)):
            if k == i or k == j:
                continue
            if _divides(basis[k][0], lcm):
                if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                    skip = True
                    break
        if skip:
            continue
        (lmi, gi), (lmj, gj) = basis[i], basis[j]
        si = tuple(a - b for a, b in zip(lcm, lmi))
        sj = tuple(a - b for a, b in zip(lcm, lmj))
        s: dict = {}
        for e, v in gi.items():
            s[tuple(a + b for a, b in zip(e, si))] = v
        for e, v in gj.items():
            ne = tuple(a + b for a, b in zip(e, sj))
            t = F.norm(s.get(ne, 0) - v)
            if t:
                s[ne] = t
            else:
                s.pop(ne, None)
        r = _reduce(s, basis, keys, F, steps)
        if r:
            lm = add(r)
            if not any(lm):
                return [ring.one()]

    # minimalize, then inter-reduce tails
    order_idx = sorted(range(len(basis)), key=lambda t: (keys[basis[t][0]], t))
    minimal = []
    for t in order_idx:
        lm = basis[t][0]
        if any(_divides(basis[u][0], lm) and (basis[u][0] != lm or u < t) for u in range(len(basis)) if u != t):
            continue
        minimal.append(basis[t])
    reduced = []
    for idx, (lm, g) in enumerate(minimal):
        others = [b for k, b in enumerate(minimal) if k != idx]
        tail = {e: v for e, v in g.items() if e != lm}
        tail = _reduce(tail, others, keys, F, steps)
        tail[lm] = F(1)
        reduced.append((lm, tail))
    reduced.sort(key=lambda b: keys[b[0]])
    return [Poly(ring, g) for _, g in reduced]


def prepare_basis(basis: Sequence[Poly], order: MonomialOrder = grevlex) -> tuple:
    """[(leading monomial, monic terms)] for repeated use with ``normal_form``."""
    out = []
    for g in basis:
        lm = g.lm(order)
        out.append((lm, _monic(g.terms, lm, g.ring.field)))
    return tuple(out)


def normal_form(f: Poly, basis: Sequence[Poly], order: MonomialOrder = grevlex, prepared=None) -> Poly:
    """Remainder of f on division by a Groebner basis (unique when ``basis`` is one).

    ``prepared`` may pass ``prepare_basis(basis, order)`` computed once for many reductions.
    """
    if not f:
        return f
    keys = _keys_for(order)
    b = prepared if prepared is not None else prepare_basis(basis, order)
    steps = _Steps(current_budget().max_steps)
    return Poly(f.ring, _reduce(f.terms, b, keys, f.ring.field, steps))


class Ideal:
    """Ideal of a polynomial ring, caching one reduced Groebner basis per monomial order."""

    def __init__(self, ring: PolyRing, gens: Iterable[Poly] = ()):
        self.ring = ring
        seen = []
        for g in gens:
            g = ring(g)
            if g and g not in seen:
                seen.append(g)
        self.gens = tuple(seen)
        self._cache: dict = {}
        self._lock = threading.Lock()

    @classmethod
    def from_groebner(cls, ring: PolyRing, basis: Iterable[Poly], order: MonomialOrder = grevlex) -> "Ideal":
        """Wrap a basis already known to be a reduced Groebner basis for ``order``."""
        ideal = cls(ring, basis)
        ideal._cache[order] = ideal.gens
        return ideal

    def groebner(self, order: MonomialOrder = grevlex) -> tuple[Poly, ...]:
        with self._lock:
            gb = self._cache.get(order)
        if gb is None:
            gb = tuple(buchberger(self.gens, order))
            with self._lock:
                gb = self._cache.setdefault(order, gb)
        return gb

    def reduce(self, f, order: MonomialOrder = grevlex) -> Poly:
        gb = self.groebner(order)
        key = ("prepared", order)
        prep = self._cache.get(key)
        if prep is None:
            prep = self._cache[key] = prepare_basis(gb, order)
        return normal_form(self.ring(f), gb, order, prep)

    def contains(self, f) -> bool:
        return not self.reduce(f)

    __contains__ = contains

    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_constant()

    def is_zero(self) -> bool:
        return not self.gens

    def __le__(self, other: "Ideal") -> bool:
        return all(other.contains(g) for g in self.gens)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.groebner() == other.groebner()

    __hash__ = None

    def __add__(self, other) -> "Ideal":
        extra = other.gens if isinstance(other, Ideal) else tuple(other)
        return Ideal(self.ring, self.gens + tuple(extra))

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, [a * b for a in self.gens for b in other.gens])

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.gens) + ")" if self.gens else "(0)"

    def __repr__(self):
        return f"Ideal{self} of {self.ring!r}"

    def transfer(self, ring: PolyRing) -> "Ideal":
        return Ideal(ring, [g.transfer(ring) for g in self.gens])

    def eliminate(self, keep: Iterable) -> "Ideal":
        """I ∩ k[keep], returned as an ideal of the same ring."""
        keep_idx = {self.ring.index(k) if isinstance(k, str) else k for k in keep}
        drop = [i for i in range(self.ring.nvars) if i not in keep_idx]
        if not drop:
            return self
        kept = [i for i in range(self.ring.nvars) if i in keep_idx]
        perm = drop + kept
        work = PolyRing([self.ring.names[i] for i in perm], self.ring.field)
        pos = {old: new for new, old in enumerate(perm)}
        gens = [g.embed(work, [pos[i] for i in range(self.ring.nvars)]) for g in self.gens]
        gb = buchberger(gens, block(len(drop)))
        out = [g.embed(self.ring, perm) for g in gb if not (g.variables() & set(range(len(drop))))]
        return Ideal(self.ring, out)

    def _with_tag(self):
        name = "_t"
        while name in self.ring.names:
            name += "_"
        work = PolyRing((name,) + self.ring.names, self.ring.field)
        shift = list(range(1, self.ring.nvars + 1))
        return work, shift

    def intersect(self, other: "Ideal") -> "Ideal":
        if self.is_zero() or other.is_zero():
            return Ideal(self.ring)
        work, shift = self._with_tag()
        t = work.gen(0)
        gens = [t * g.embed(work, shift) for g in self.gens]
        gens += [(1 - t) * g.embed(work, shift) for g in other.gens]
        elim = Ideal(work, gens).eliminate(range(1, work.nvars))
        back = [0] + list(range(self.ring.nvars))
        return Ideal(self.ring, [g.embed(self.ring, back) for g in elim.gens])

    def quotient(self, f) -> "Ideal":
        """The colon ideal (I : f) = {g : g*f in I}."""
        f = self.ring(f)
        if not f or self.contains(f):
            return Ideal(self.ring, [self.ring.one()])
        inter = self.intersect(Ideal(self.ring, [f]))
        out = []
        for g in inter.gens:
            q, r = divmod_exact(g, f)
            if r:
                raise ArithmeticError("colon ideal: intersection generator not divisible by f")
            out.append(q)
        return Ideal(self.ring, out)

    def standard_monomials(self, order: MonomialOrder = grevlex):
        """Monomials outside the leading-term ideal, or None if there are infinitely many."""
        gb = self.groebner(order)
        lms = [g.lm(order) for g in gb]
        n = self.ring.nvars
        if any(not any(m) for m in lms):
            return []
        bounds = []
        for i in range(n):
            pure = [m[i] for m in lms if m[i] and all(m[j] == 0 for j in range(n) if j != i)]
            if not pure:
                return None
            bounds.append(min(pure))
        out = []

        def rec(i, prefix):
            if i == n:
                exp = tuple(prefix)
                if not any(_divides(m, exp) for m in lms):
                    out.append(exp)
                return
            for a in range(bounds[i]):
                rec(i + 1, prefix + [a])

        rec(0, [])
        out.sort(key=order.key)
        return out


def is_unit_ideal(ideal: Ideal) -> bool:
    return ideal.is_unit()


def eliminate(ideal: Ideal, keep) -> Ideal:
    return ideal.eliminate(keep)


def ideal_quotient(ideal: Ideal, f) -> Ideal:
    return ideal.quotient(f)
