"""Schemes glued from two affine charts, and their separators.

T = U ∪ V with U = Spec A, V = Spec B, U ∩ V = Spec C0. Everything is read off the
restriction map phi_UV : A ⊗ B -> C0 and its image C, the ring of the closure of the
diagonal over U × V.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from .cas import Ideal, Poly, Undecided
from .flatness import FLAT, NOT_FLAT, UNDECIDED, FlatVerdict, flatness
from .rings import (FpAlgebra, RingMap, is_epimorphism, is_isomorphism, is_surjective, localize,
                    ringmap_image, simplify, tensor, unit_inverse)

ALREADY_SEPARATED = "AlreadySeparated"
SEPARATOR_EXISTS = "SeparatorExists"
NO_SEPARATOR = "NoSeparator"


class InvariantBreach(RuntimeError):
    """A constructed separator failed its own open-immersion certificate."""


@dataclass(frozen=True)
class TwoOpenScheme:
    A: FpAlgebra
    B: FpAlgebra
    C0: FpAlgebra
    rho_U: RingMap
    rho_V: RingMap
    integral: bool = False
    connected: bool = False
    certificate: str = "localization"
    name: str = "T"

    def swap(self) -> "TwoOpenScheme":
        return replace(self, A=self.B, B=self.A, rho_U=self.rho_V, rho_V=self.rho_U)

    def chart(self, which: str) -> FpAlgebra:
        if which not in ("U", "V"):
            raise ValueError(f"chart must be U or V, not {which!r}")
        return self.A if which == "U" else self.B

    def describe(self) -> dict:
        return {
            "U": self.A.describe(),
            "V": self.B.describe(),
            "UV": self.C0.describe(),
            "rhoU": self.rho_U.describe(),
            "rhoV": self.rho_V.describe(),
        }


@dataclass(frozen=True)
class TwistSpec:
    ring: FpAlgebra
    invert: tuple
    open_ring: FpAlgebra
    inclusion: RingMap
    twist: RingMap
    inverse: RingMap


def open_subset(A: FpAlgebra, invert: Sequence):
    """(Γ(U0), A -> Γ(U0)) for U0 = D(f), f the product of ``invert`` (U0 = Spec A if empty)."""
    invert = [A.reduce(A.ring(f)) for f in invert]
    if not invert:
        return A, RingMap(A, A, A.gens(), check=False)
    f = A.ring.one()
    for g in invert:
        f = f * g
    return localize(A, f)


def twist_spec(A: FpAlgebra, invert: Sequence, tau: dict, inverse: Optional[dict] = None,
               open_ring=None) -> TwistSpec:
    """Twist data on U0 = D(prod invert) ⊂ Spec A.

    ``tau`` and ``inverse`` give images of A's generators in Γ(U0) (missing ones are fixed); the
    inverted element's image is derived. Without ``inverse`` the twist must be an involution.
    ``open_ring`` may pass in the result of ``open_subset(A, invert)`` already computed.
    """
    C0, inc = open_ring or open_subset(A, invert)
    tw = _open_automorphism(A, C0, inc, tau)
    inv = _open_automorphism(A, C0, inc, inverse) if inverse is not None else tw
    for g in C0.gens():
        if not C0.equal(tw(inv(g)), g) or not C0.equal(inv(tw(g)), g):
            raise ValueError("twist is not an automorphism with the given inverse")
    return TwistSpec(A, tuple(A.reduce(A.ring(f)) for f in invert), C0, inc, tw, inv)


def _open_automorphism(A, C0, inc, images: dict) -> RingMap:
    out = []
    unknown = set(images) - set(A.names)
    if unknown:
        raise ValueError(f"twist mentions {', '.join(sorted(unknown))}, which are not generators of the chart")
    for name in A.names:
        out.append(C0.ring(images[name]) if name in images else C0.ring.gen(name))
    if C0 is not A:
        f = C0.origin[2]
        tf = f.embed(C0.ring, list(range(A.ngens))).substitute(out, C0.ring)
        w = unit_inverse(C0, tf)
        if w is None:
            raise ValueError("twist does not preserve the open subset (image of the inverted element is not a unit)")
        out.append(w)
    return RingMap(C0, C0, out)


def build_twisted(spec: TwistSpec, name: str = "T") -> TwoOpenScheme:
    """Two copies of Spec A glued along U0, the second through the twist."""
    return TwoOpenScheme(spec.ring, spec.ring, spec.open_ring, spec.inclusion,
                         spec.twist.compose(spec.inclusion), certificate="localization", name=name)


def certify_localization(rho: RingMap, invert: Optional[Sequence] = None) -> bool:
    """rho : A -> C0 identifies C0 with A[1/f], f the product of ``invert`` (default: C0's own)."""
    A, C0 = rho.source, rho.target
    if invert is None:
        if C0.origin and C0.origin[0] == "localization" and C0.origin[1] is A:
            canonical = C0.gens()[: A.ngens]
            return all(C0.equal(a, b) for a, b in zip(rho.images, canonical))
        return is_isomorphism(rho)
    f = A.ring.one()
    for g in invert:
        f = f * A.ring(g)
    w = unit_inverse(C0, rho(f))
    if w is None:
        return False
    Af, _ = localize(A, f)
    induced = RingMap(Af, C0, list(rho.images) + [w])
    return is_isomorphism(induced)


def glue(A, B, C0, rho_U, rho_V, invert_U=None, invert_V=None, name="T") -> TwoOpenScheme:
    for side, rho, inv in (("U", rho_U, invert_U), ("V", rho_V, invert_V)):
        if rho.target is not C0:
            raise ValueError(f"rho{side} must land in the overlap ring")
        if not certify_localization(rho, inv):
            raise ValueError(f"rho{side} is not certified as a localization (open immersion)")
    return TwoOpenScheme(A, B, C0, rho_U, rho_V, name=name)


# -- the restriction map and the closure of the diagonal

def restriction_map(T: TwoOpenScheme):
    P, iA, iB = tensor(T.A, T.B, suffixes=("_U", "_V"))
    phi = RingMap(P, T.C0, list(T.rho_U.images) + list(T.rho_V.images))
    return phi, iA, iB


@dataclass(frozen=True)
class DiagonalClosure:
    C: FpAlgebra
    d0: RingMap  # B -> C
    d1: RingMap  # A -> C
    inclusion: RingMap  # C -> C0
    phi: RingMap  # A ⊗ B -> C0
    full: FpAlgebra  # A ⊗ B / ker(phi) before pruning generators

    def describe(self) -> dict:
        return {"C": self.C.describe(), "d1": self.d1.describe(), "d0": self.d0.describe(),
                "kernel": str(self.full.ideal)}


def diagonal_closure(T: TwoOpenScheme) -> DiagonalClosure:
    phi, iA, iB = restriction_map(T)
    full, to_c, from_c = ringmap_image(phi)
    C, fwd, back = simplify(full)
    C.label = "Im(phi)"
    proj = fwd.compose(to_c)
    return DiagonalClosure(C, proj.compose(iB), proj.compose(iA), from_c.compose(back), phi, full)


def is_separated(T: TwoOpenScheme) -> bool:
    return is_surjective(restriction_map(T)[0])


# -- integrality

def _frac(v) -> Fraction:
    # plain Python integers, so Fraction arithmetic never sees GMP types
    return Fraction(int(v.numerator), int(v.denominator))


def _univariate_coeffs(g: Poly, i: int) -> list:
    coeffs = [Fraction(0)] * (g.degree_in(i) + 1)
    for e, v in g.terms.items():
        coeffs[e[i]] = _frac(v)
    return coeffs


def _has_rational_root(coeffs: list) -> bool:
    import math

    if coeffs[0] == 0:
        return True
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    a0, an = abs(ints[0]), abs(ints[-1])

    def divisors(n):
        return [d for d in range(1, n + 1) if n % d == 0]

    for p in divisors(a0):
        for q in divisors(an):
            for r in (Fraction(p, q), Fraction(-p, q)):
                if sum(c * r**k for k, c in enumerate(coeffs)) == 0:
                    return True
    return False


def _is_square(coeffs: list) -> bool:
    """Is the univariate polynomial (ascending coefficients) a square in QQ[u]?"""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if not coeffs:
        return True
    d = len(coeffs) - 1
    if d % 2:
        return False
    lc = coeffs[-1]
    if lc < 0:
        return False
    rn, rd = _isqrt(lc.numerator), _isqrt(lc.denominator)
    if rn is None or rd is None:
        return False
    h = d // 2
    root = [Fraction(0)] * (h + 1)
    root[h] = Fraction(rn, rd)
    for k in range(h - 1, -1, -1):
        # coefficient of u^(h + k) in root^2 determines root[k]
        acc = sum(root[i] * root[h + k - i] for i in range(k + 1, h + 1) if 0 <= h + k - i <= h and h + k - i != k)
        root[k] = (coeffs[h + k] - acc) / (2 * root[h])
    sq = [Fraction(0)] * (d + 1)
    for i, a in enumerate(root):
        for j, b in enumerate(root):
            sq[i + j] += a * b
    return sq == list(coeffs) + [Fraction(0)] * (d + 1 - len(coeffs))


def _isqrt(n: int):
    import math

    r = math.isqrt(n)
    return r if r * r == n else None


def _irreducible_small(g: Poly) -> bool:
    vs = sorted(g.variables())
    if len(vs) == 1:
        i = vs[0]
        d = g.degree_in(i)
        if d == 1:
            return True
        if d in (2, 3):
            return not _has_rational_root(_univariate_coeffs(g, i))
        return False
    if len(vs) == 2:
        for i in vs:
            (j,) = [v for v in vs if v != i]
            d = g.degree_in(i)
            lead = {e: c for e, c in g.terms.items() if e[i] == d}
            if len(lead) != 1 or any(a for k, a in enumerate(next(iter(lead))) if k != i):
                continue  # leading coefficient in this variable is not a constant
            lc = _frac(next(iter(lead.values())))
            if d == 1:
                return True
            if d == 2:
                b = [Fraction(0)] * (g.degree() + 1)
                c = [Fraction(0)] * (g.degree() + 1)
                for e, v in g.terms.items():
                    if e[i] == 1:
                        b[e[j]] += _frac(v) / lc
                    elif e[i] == 0:
                        c[e[j]] += _frac(v) / lc
                disc = [Fraction(0)] * (2 * len(b))
                for p, x in enumerate(b):
                    for q, y in enumerate(b):
                        disc[p + q] += x * y
                for p, x in enumerate(c):
                    disc[p] -= 4 * x
                return not _is_square(disc)
    return False


def visibly_domain(R: FpAlgebra) -> bool:
    """Sound but incomplete domain test: polynomial rings, small irreducible hypersurfaces,
    localizations and subrings of those."""
    if R.field.characteristic != 0:
        return False
    if R.ideal.is_zero():
        return True
    if R.origin:
        kind = R.origin[0]
        if kind == "localization":
            return visibly_domain(R.origin[1]) and not R.is_zero_ring()
        if kind == "image":
            return visibly_domain(R.origin[1].target)
    gb = R.ideal.groebner()
    if len(gb) == 1 and not gb[0].is_constant():
        return _irreducible_small(gb[0])
    return False


YES, NO = "Yes", "No"


def diagonal_dominant(T: TwoOpenScheme) -> str:
    """Yes when the charts are asserted or visibly integral; otherwise Undecided."""
    if T.integral:
        return YES
    if visibly_domain(T.A) and visibly_domain(T.B):
        return YES
    return UNDECIDED


def chart_connected(T: TwoOpenScheme, which: str) -> bool:
    return T.integral or T.connected or visibly_domain(T.chart(which))


# -- separators

@dataclass(frozen=True)
class Separator:
    E: TwoOpenScheme
    h_U: RingMap
    h_V: RingMap
    iso_U: bool
    iso_V: bool

    def describe(self) -> dict:
        return {
            "gluing_ring": self.E.C0.describe(),
            "U_to_W": self.E.rho_U.describe(),
            "V_to_W": self.E.rho_V.describe(),
            "U_to_W_isomorphism": self.iso_U,
            "V_to_W_isomorphism": self.iso_V,
            "h": "identity on each chart",
        }


FINITE_TYPE_NOTE = ("Im(phi) is of finite type over each chart: it is generated over one chart ring "
                    "by the images of the other chart's generators")


@dataclass(frozen=True)
class SeparatorReport:
    verdict: str
    dominance: str = UNDECIDED
    closure: Optional[DiagonalClosure] = None
    flat_U: Optional[FlatVerdict] = None
    flat_V: Optional[FlatVerdict] = None
    separator: Optional[Separator] = None
    reason: str = ""
    notes: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "dominance": self.dominance}
        if self.closure is not None:
            out["closure"] = self.closure.describe()
        if self.flat_U is not None:
            out["flat_over_U"] = self.flat_U.to_dict()
        if self.flat_V is not None:
            out["flat_over_V"] = self.flat_V.to_dict()
        if self.separator is not None:
            out["separator"] = self.separator.describe()
        if self.reason:
            out["reason"] = self.reason
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def separator_check(T: TwoOpenScheme) -> SeparatorReport:
    """Decide whether T admits a separator, building it when it does."""
    try:
        dom = diagonal_dominant(T)
        if is_separated(T):
            return SeparatorReport(ALREADY_SEPARATED, dom, notes=("phi_UV is surjective",))
        D = diagonal_closure(T)
        fu = flatness(D.d1, chart_connected(T, "U"))
        fv = flatness(D.d0, chart_connected(T, "V"))
    except Undecided as exc:
        return SeparatorReport(UNDECIDED, reason=exc.reason)
    notes = (FINITE_TYPE_NOTE,)
    if NOT_FLAT in (fu.status, fv.status):
        sides = [s for s, v in (("U", fu), ("V", fv)) if v.status == NOT_FLAT]
        return SeparatorReport(NO_SEPARATOR, dom, D, fu, fv,
                               reason=f"Im(phi) is not flat over the chart ring of {' and '.join(sides)}",
                               notes=notes)
    if UNDECIDED in (fu.status, fv.status):
        why = "; ".join(v.reason for v in (fu, fv) if v.status == UNDECIDED)
        return SeparatorReport(UNDECIDED, dom, D, fu, fv, reason=f"flatness undecided: {why}", notes=notes)
    if dom != YES:
        return SeparatorReport(UNDECIDED, dom, D, fu, fv,
                               reason="Im(phi) is flat on both sides but dominance of the diagonal is not certified",
                               notes=notes)
    try:
        sep = build_separator(T, D, fu, fv)
    except Undecided as exc:
        return SeparatorReport(UNDECIDED, dom, D, fu, fv, reason=exc.reason, notes=notes)
    return SeparatorReport(SEPARATOR_EXISTS, dom, D, fu, fv, separator=sep, notes=notes)


def build_separator(T: TwoOpenScheme, D: DiagonalClosure, flat_U: FlatVerdict, flat_V: FlatVerdict) -> Separator:
    """Glue U and V along W = Spec Im(phi) and certify the result."""
    if flat_U.status != FLAT or flat_V.status != FLAT:
        raise ValueError("build_separator needs Im(phi) flat over both charts")
    for side, m in (("U", D.d1), ("V", D.d0)):
        if not is_epimorphism(m):
            raise InvariantBreach(f"structure map from {side} to Im(phi) is not an epimorphism")
    E = TwoOpenScheme(T.A, T.B, D.C, D.d1, D.d0, integral=T.integral, connected=T.connected,
                      certificate="flat epimorphism of finite type", name=f"sep({T.name})")
    if not is_separated(E):
        raise InvariantBreach("glued separator is not separated")
    ident_U = RingMap(T.A, T.A, T.A.gens(), check=False)
    ident_V = RingMap(T.B, T.B, T.B.gens(), check=False)
    return Separator(E, ident_U, ident_V, is_isomorphism(D.d1), is_isomorphism(D.d0))


# -- points

@dataclass(frozen=True)
class PointRef:
    chart: str
    generators: tuple


def _point_ideal(R: FpAlgebra, x: PointRef) -> Ideal:
    ideal = R.ideal + [R.ring(g) for g in x.generators]
    sm = ideal.standard_monomials()
    if sm is None or len(sm) != 1:
        raise ValueError(f"point ideal ({', '.join(map(str, x.generators))}) is not a rational maximal ideal")
    return ideal


def apparented(T: TwoOpenScheme, x: PointRef, y: PointRef, closure: Optional[DiagonalClosure] = None) -> bool:
    """Whether the local rings at x (on U) and y (on V) are dominated by a common local ring."""
    if x.chart != "U" or y.chart != "V":
        raise ValueError("apparented expects a point on U and a point on V")
    _point_ideal(T.A, x)
    _point_ideal(T.B, y)
    if diagonal_dominant(T) != YES:
        raise Undecided("apparented points need integral charts")
    D = closure or diagonal_closure(T)
    gens = [D.d1(g) for g in x.generators] + [D.d0(g) for g in y.generators]
    return not (D.C.ideal + gens).is_unit()


IDENTIFIED, DISTINCT = "Identified", "Distinct"


def identified_in_separator(T: TwoOpenScheme, x: PointRef, y: PointRef, report: Optional[SeparatorReport] = None) -> str:
    report = report or separator_check(T)
    if report.verdict == SEPARATOR_EXISTS:
        return IDENTIFIED if apparented(T, x, y, report.closure) else DISTINCT
    if report.verdict == ALREADY_SEPARATED:
        return IDENTIFIED if apparented(T, x, y) else DISTINCT
    return report.verdict
