"""Finitely presented algebras over a field and homomorphisms between them.

Kernels, images, subalgebra membership and module presentations are all computed
from the graph ideal of a map, ``I_target + (x_i - phi(x_i))``, under an order that
eliminates the target variables.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .cas import QQ, Field, Ideal, Poly, PolyRing, block, grevlex, normal_form
from .cas.groebner import buchberger


class IllDefinedMap(ValueError):
    pass


def _unique(name: str, taken) -> str:
    while name in taken:
        name += "'"
    return name


def _fresh(base: str, taken) -> str:
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


class FpAlgebra:
    """k[names] / relations."""

    def __init__(self, names: Sequence[str], relations=(), field: Field = QQ, label: str | None = None,
                 origin: tuple | None = None):
        self.ring = PolyRing(names, field)
        self.ideal = Ideal(self.ring, [self.ring(r) for r in relations])
        self.label = label
        self.origin = origin

    @property
    def names(self):
        return self.ring.names

    @property
    def field(self):
        return self.ring.field

    @property
    def ngens(self):
        return self.ring.nvars

    def gens(self) -> list[Poly]:
        return self.ring.gens()

    def element(self, x) -> Poly:
        return self.reduce(self.ring(x))

    def reduce(self, f: Poly) -> Poly:
        return self.ideal.reduce(f)

    def is_zero(self, f) -> bool:
        return self.ideal.contains(self.ring(f))

    def equal(self, f, g) -> bool:
        return self.is_zero(self.ring(f) - self.ring(g))

    def is_zero_ring(self) -> bool:
        return self.ideal.is_unit()

    def describe(self) -> str:
        base = f"{self.field}[{','.join(self.names)}]"
        if self.ideal.is_zero():
            return base
        return f"{base}/{self.ideal}"

    def __repr__(self):
        return f"FpAlgebra({self.label or self.describe()})"


class RingMap:
    """Homomorphism given by one target element per source generator."""

    def __init__(self, source: FpAlgebra, target: FpAlgebra, images: Sequence, check: bool = True,
                 label: str | None = None):
        if len(images) != source.ngens:
            raise IllDefinedMap(f"expected {source.ngens} images, got {len(images)}")
        if source.field != target.field:
            raise IllDefinedMap("source and target have different coefficient fields")
        self.source = source
        self.target = target
        self.images = tuple(target.reduce(target.ring(x)) for x in images)
        self.label = label
        self._graph = None
        if check:
            for r in source.ideal.gens:
                if not target.is_zero(self.apply_raw(r)):
                    raise IllDefinedMap(f"relation {r} of the source does not map to zero")

    def apply_raw(self, f: Poly) -> Poly:
        return f.substitute(self.images, self.target.ring)

    def __call__(self, f) -> Poly:
        return self.target.reduce(self.apply_raw(self.source.ring(f)))

    def compose(self, inner: "RingMap") -> "RingMap":
        """self ∘ inner."""
        if inner.target is not self.source:
            raise ValueError("maps are not composable")
        return RingMap(inner.source, self.target, [self(g) for g in inner.images], check=False)

    def agrees_with(self, other: "RingMap") -> bool:
        return all(self.target.equal(a, b) for a, b in zip(self.images, other.images))

    def describe(self) -> str:
        pairs = ", ".join(f"{n} -> {img}" for n, img in zip(self.source.names, self.images))
        return "{" + pairs + "}"

    # -- graph ideal, shared by kernel / membership / finiteness
    def graph(self):
        """(ring [target vars, source vars], reduced GB of the graph ideal, #target vars)."""
        if self._graph is None:
            tnames = list(self.target.names)
            snames = []
            for n in self.source.names:
                snames.append(_unique(n, set(tnames) | set(snames)))
            ring = PolyRing(tnames + snames, self.target.field)
            nt = len(tnames)
            tpos = list(range(nt))
            gens = [r.embed(ring, tpos) for r in self.target.ideal.gens]
            for i, img in enumerate(self.images):
                gens.append(ring.gen(nt + i) - img.embed(ring, tpos))
            gb = buchberger(gens, block(nt))
            self._graph = (ring, tuple(gb), nt)
        return self._graph

    def preimage(self, f) -> Optional[Poly]:
        """A source polynomial mapping to f, or None if f is not in the image subalgebra."""
        ring, gb, nt = self.graph()
        f = self.target.ring(f)
        r = normal_form(f.embed(ring, list(range(nt))), gb, block(nt))
        if any(i < nt for i in r.variables()):
            return None
        back = [0] * nt + list(range(self.source.ngens))
        return self.source.reduce(r.embed(self.source.ring, back))


def ringmap_kernel(phi: RingMap) -> Ideal:
    ring, gb, nt = phi.graph()
    back = [0] * nt + list(range(phi.source.ngens))
    gens = [g.embed(phi.source.ring, back) for g in gb if all(i >= nt for i in g.variables())]
    return Ideal(phi.source.ring, gens)


def ringmap_image(phi: RingMap):
    """(C, source -> C, C -> target) with C = source / ker(phi)."""
    ker = ringmap_kernel(phi)
    C = FpAlgebra(phi.source.names, ker.gens, phi.source.field, origin=("image", phi))
    to_c = RingMap(phi.source, C, C.gens(), check=False)
    from_c = RingMap(C, phi.target, phi.images, check=False)
    return C, to_c, from_c


def is_surjective(phi: RingMap) -> bool:
    return all(phi.preimage(y) is not None for y in phi.target.gens())


def is_injective(phi: RingMap) -> bool:
    return ringmap_kernel(phi) <= phi.source.ideal


def is_isomorphism(phi: RingMap) -> bool:
    return is_surjective(phi) and is_injective(phi)


def is_epimorphism(phi: RingMap) -> bool:
    """Multiplication B ⊗_A B -> B is injective, i.e. y ⊗ 1 = 1 ⊗ y for every generator y of B."""
    B = phi.target
    names = list(B.names)
    primed = []
    for n in B.names:
        primed.append(_unique(n, set(names) | set(primed)))
    ring = PolyRing(names + primed, B.field)
    n = B.ngens
    left, right = list(range(n)), list(range(n, 2 * n))
    gens = [r.embed(ring, left) for r in B.ideal.gens] + [r.embed(ring, right) for r in B.ideal.gens]
    gens += [img.embed(ring, left) - img.embed(ring, right) for img in phi.images]
    ideal = Ideal(ring, gens)
    return all(ideal.contains(ring.gen(i) - ring.gen(n + i)) for i in range(n))


def module_finite_witness(phi: RingMap):
    """Monic integral relations {target generator: graph-ideal element}, or None if inconclusive."""
    ring, gb, nt = phi.graph()
    order = block(nt)
    witness = {}
    for j in range(nt):
        for g in gb:
            lm = g.lm(order)
            if lm[j] and all(a == 0 for i, a in enumerate(lm) if i != j):
                witness[phi.target.names[j]] = g
                break
        else:
            return None
    return witness


def module_generators(phi: RingMap) -> Optional[list[Poly]]:
    """Target monomials spanning the target as a source-module (needs a finiteness witness)."""
    if module_finite_witness(phi) is None:
        return None
    ring, gb, nt = phi.graph()
    order = block(nt)
    pure = [g.lm(order)[:nt] for g in gb if not any(g.lm(order)[nt:])]
    pure = [m for m in pure if any(m)]
    bounds = []
    for j in range(nt):
        bounds.append(min(m[j] for m in pure if m[j] and all(a == 0 for i, a in enumerate(m) if i != j)))
    out = []

    def rec(j, prefix):
        if j == nt:
            exp = tuple(prefix)
            if not any(all(a <= b for a, b in zip(m, exp)) for m in pure):
                out.append(exp)
            return
        for a in range(bounds[j]):
            rec(j + 1, prefix + [a])

    rec(0, [])
    out.sort(key=grevlex.key)
    return [phi.target.ring.monomial(e) for e in out]


@dataclass(frozen=True)
class PresentedModule:
    """Cokernel of ``matrix`` (rows are relations) on ``ngens`` generators over ``base``."""

    base: FpAlgebra
    ngens: int
    matrix: tuple
    labels: tuple = ()

    def describe(self) -> str:
        rows = ["[" + ", ".join(str(x) for x in row) + "]" for row in self.matrix]
        return f"{self.ngens} generators {list(self.labels)}; relations [" + ", ".join(rows) + "]"

    def is_zero(self) -> bool:
        """Every generator lies in the span of the relations (equivalently Fitt_0 = (1))."""
        if self.ngens == 0:
            return True
        ring, ideal = _module_ideal(self.base, self.ngens, self.matrix)
        nb = self.base.ngens
        return all(ideal.contains(ring.gen(nb + i)) for i in range(self.ngens))


def _module_ideal(base: FpAlgebra, n: int, rows):
    """Submodule of base^n spanned by ``rows`` encoded as an ideal in base[e_1..e_n] with e_i e_j = 0."""
    names = list(base.names)
    es = []
    for i in range(n):
        es.append(_fresh(f"e{i + 1}", set(names) | set(es)))
    ring = PolyRing(names + es, base.field)
    nb = base.ngens
    bpos = list(range(nb))
    gens = []
    for row in rows:
        v = ring.zero()
        for i, x in enumerate(row):
            v = v + x.embed(ring, bpos) * ring.gen(nb + i)
        gens.append(v)
    for i in range(n):
        for r in base.ideal.gens:
            gens.append(r.embed(ring, bpos) * ring.gen(nb + i))
        for j in range(i, n):
            gens.append(ring.gen(nb + i) * ring.gen(nb + j))
    return ring, Ideal(ring, gens)


class GeneratorsDoNotSpan(ValueError):
    pass


def module_presentation(phi: RingMap, generators: Sequence | None = None) -> PresentedModule:
    """Presentation of the target as a module over the source on the given target elements."""
    if generators is None:
        generators = module_generators(phi)
        if generators is None:
            raise GeneratorsDoNotSpan("no module-finiteness witness; pass generators explicitly")
    gens = [phi.target.reduce(phi.target.ring(g)) for g in generators]
    n = len(gens)
    T, S = phi.target, phi.source
    tnames = list(T.names)
    e0 = _fresh("e0", set(tnames) | set(S.names))
    snames = []
    for nm in S.names:
        snames.append(_unique(nm, {e0, *tnames, *snames}))
    es = []
    for i in range(n):
        es.append(_fresh(f"e{i + 1}", {e0, *tnames, *snames, *es}))
    ring = PolyRing([e0] + tnames + snames + es, T.field)
    nt, ns = T.ngens, S.ngens
    tpos = list(range(1, nt + 1))
    spos = list(range(nt + 1, nt + 1 + ns))
    epos = [0] + list(range(nt + 1 + ns, nt + 1 + ns + n))
    E = [ring.gen(p) for p in epos]
    graph = [r.embed(ring, tpos) for r in T.ideal.gens]
    graph += [ring.gen(spos[i]) - img.embed(ring, tpos) for i, img in enumerate(phi.images)]
    hgens = [g * E[0] for g in graph]
    hgens += [E[i + 1] - gens[i].embed(ring, tpos) * E[0] for i in range(n)]
    hgens += [E[i] * E[j] for i in range(n + 1) for j in range(i, n + 1)]
    order = block(1 + nt)
    gb = buchberger(hgens, order)
    elim = set(range(1 + nt))

    def in_span(h: Poly) -> bool:
        r = normal_form(h.embed(ring, tpos) * E[0], gb, order)
        return not (r.variables() & elim)

    checks = [T.ring.one()] + [y * g for y in T.gens() for g in gens]
    for h in checks:
        if not in_span(h):
            raise GeneratorsDoNotSpan(f"{h} is not in the span of {[str(g) for g in gens]}")

    back = [0] * ring.nvars
    for i, p in enumerate(spos):
        back[p] = i
    rows = []
    for g in gb:
        vs = g.variables()
        if vs & elim:
            continue
        if sum(g.lm(order)[p] for p in epos[1:]) != 1:
            continue
        row = []
        for k in range(n):
            coeff = {}
            for e, v in g.terms.items():
                if e[epos[k + 1]] == 1:
                    coeff[tuple(e[p] for p in spos)] = v
            row.append(S.reduce(Poly(S.ring, coeff)))
        if any(row) and tuple(row) not in rows:
            rows.append(tuple(row))
    return PresentedModule(S, n, tuple(rows), tuple(str(g) for g in gens))


def tensor(A: FpAlgebra, B: FpAlgebra, suffixes=("0", "1"), over: tuple | None = None):
    """A ⊗ B over the field, or A ⊗_R B when ``over=(f: R->A, g: R->B)``.

    Returns (A⊗B, A -> A⊗B, B -> A⊗B). Generator names get the suffixes only on a clash.
    """
    if A.field != B.field:
        raise ValueError("tensor factors have different coefficient fields")
    clash = set(A.names) & set(B.names)
    an = [n + suffixes[0] for n in A.names] if clash else list(A.names)
    bn = [n + suffixes[1] for n in B.names] if clash else list(B.names)
    if len(set(an) | set(bn)) != len(an) + len(bn):
        raise ValueError("cannot make tensor generator names distinct")
    ring = PolyRing(an + bn, A.field)
    apos = list(range(A.ngens))
    bpos = list(range(A.ngens, A.ngens + B.ngens))
    rels = [r.embed(ring, apos) for r in A.ideal.gens] + [r.embed(ring, bpos) for r in B.ideal.gens]
    if over is not None:
        f, g = over
        if f.target is not A or g.target is not B or f.source is not g.source:
            raise ValueError("base-change tensor needs maps R -> A and R -> B")
        for a, b in zip(f.images, g.images):
            rels.append(a.embed(ring, apos) - b.embed(ring, bpos))
    T = FpAlgebra(ring.names, rels, A.field)
    ia = RingMap(A, T, [T.ring.gen(i) for i in apos], check=False)
    ib = RingMap(B, T, [T.ring.gen(i) for i in bpos], check=False)
    return T, ia, ib


def localize(A: FpAlgebra, f, name: str = "w"):
    """(A_f, A -> A_f) with A_f = A[w]/(f*w - 1)."""
    f = A.reduce(A.ring(f))
    if not f:
        raise ValueError("cannot localize at an element that is zero in the ring")
    w = _fresh(name, set(A.names))
    ring = PolyRing(A.names + (w,), A.field)
    pos = list(range(A.ngens))
    rels = [r.embed(ring, pos) for r in A.ideal.gens] + [f.embed(ring, pos) * ring.gen(A.ngens) - 1]
    Af = FpAlgebra(ring.names, rels, A.field, origin=("localization", A, f))
    return Af, RingMap(A, Af, Af.gens()[: A.ngens], check=False)


def unit_inverse(A: FpAlgebra, f) -> Optional[Poly]:
    """g with f*g = 1 in A, or None if f is not a unit."""
    f = A.reduce(A.ring(f))
    if f.is_constant() and f:
        return A.ring.const(A.field.inv(f.constant_coeff()))
    z = _fresh("_z", set(A.names))
    ring = PolyRing((z,) + A.names, A.field)
    pos = list(range(1, A.ngens + 1))
    gens = [r.embed(ring, pos) for r in A.ideal.gens] + [f.embed(ring, pos) * ring.gen(0) - 1]
    gb = buchberger(gens, block(1))
    r = normal_form(ring.gen(0), gb, block(1))
    if 0 in r.variables():
        return None
    g = A.reduce(r.embed(A.ring, [0] + list(range(A.ngens))))
    return g if A.equal(f * g, 1) else None


def simplify(A: FpAlgebra):
    """Drop generators that a relation expresses through the others.

    Returns (A', A -> A', A' -> A), mutually inverse. Higher-index generators are removed first.
    """
    ring = A.ring
    images = ring.gens()
    alive = list(range(A.ngens))
    rels = list(A.ideal.groebner())
    while True:
        best = None
        for g in rels:
            for i in sorted(g.variables(), reverse=True):
                unit = tuple(1 if j == i else 0 for j in range(ring.nvars))
                if unit in g.terms and all(e[i] == 0 for e in g.terms if e != unit):
                    if best is None or i > best[0]:
                        best = (i, g)
                    break
        if best is None:
            break
        i, g = best
        c = g.terms[tuple(1 if j == i else 0 for j in range(ring.nvars))]
        expr = -(g - ring.gen(i).scale(c)).scale(ring.field.inv(c))
        sub = ring.gens()
        sub[i] = expr
        rels = [r.substitute(sub, ring) for r in rels]
        images = [im.substitute(sub, ring) for im in images]
        alive.remove(i)
        rels = list(Ideal(ring, rels).groebner())
    names = [ring.names[i] for i in alive]
    S = FpAlgebra(names, [r.transfer(PolyRing(names, A.field)) for r in rels], A.field,
                  origin=A.origin)
    fwd = RingMap(A, S, [im.transfer(S.ring) for im in images], check=False)
    back = RingMap(S, A, [A.ring.gen(i) for i in alive], check=False)
    return S, fwd, back


@dataclass(frozen=True)
class RelativePresentation:
    """target ≅ source[fiber vars] / relations, in the ring ``ring`` = k[source vars, fiber vars]."""

    ring: PolyRing
    relations: Ideal
    nbase: int
    fiber: tuple


def relative_presentation(phi: RingMap) -> RelativePresentation:
    """Present the target as an algebra over the source, pruning target generators already in the image."""
    T, S = phi.target, phi.source
    tnames = list(T.names)
    snames = []
    for n in S.names:
        snames.append(_unique(n, set(tnames) | set(snames)))
    ring = PolyRing(tnames + snames, T.field)
    nt = T.ngens
    tpos = list(range(nt))
    gens = [r.embed(ring, tpos) for r in T.ideal.gens]
    gens += [ring.gen(nt + i) - img.embed(ring, tpos) for i, img in enumerate(phi.images)]
    order = block(nt)
    gb = buchberger(gens, order)
    pruned = set()
    rest = []
    for g in gb:
        lm = g.lm(order)
        if sum(lm) == 1 and lm.index(1) < nt:
            pruned.add(lm.index(1))
        else:
            rest.append(g)
    keep_t = [j for j in range(nt) if j not in pruned]
    new_names = snames + [tnames[j] for j in keep_t]
    out = PolyRing(new_names, T.field)
    pos = [0] * ring.nvars
    for i in range(S.ngens):
        pos[nt + i] = i
    for k, j in enumerate(keep_t):
        pos[j] = S.ngens + k
    rels = [g.embed(out, pos) for g in rest]
    return RelativePresentation(out, Ideal(out, rels), S.ngens, tuple(tnames[j] for j in keep_t))
