"""Flatness of ring maps in two decidable situations.

* one-generator extensions A[T]/(sT - t) with (s, t) a regular sequence: flat iff (s, t) = (1);
* module-finite maps over a connected base: flat iff some Fitting ideal jumps from 0 to (1).

Anything else is reported as Undecided.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .cas import Ideal, Poly, Undecided, grevlex, normal_form
from .cas.groebner import buchberger, prepare_basis
from .rings import (FpAlgebra, PresentedModule, RingMap, module_generators, module_presentation,
                    relative_presentation)

FLAT, NOT_FLAT, UNDECIDED = "Flat", "NotFlat", "Undecided"


@dataclass(frozen=True)
class FlatVerdict:
    status: str
    method: str
    witness: Optional[Ideal] = None
    reason: str = ""
    rank: Optional[int] = None
    details: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        out = {"status": self.status, "method": self.method}
        if self.witness is not None:
            out["witness"] = str(self.witness)
        if self.reason:
            out["reason"] = self.reason
        if self.rank is not None:
            out["rank"] = self.rank
        out.update({k: str(v) for k, v in self.details.items()})
        return out


def is_regular_sequence(A: FpAlgebra, s, t) -> bool:
    """(0 : s) = 0 and ((s) : t) = (s) in A; (s, t) = A is allowed."""
    s, t = A.ring(s), A.ring(t)
    I = A.ideal
    if not I.quotient(s) == I:
        return False
    Is = I + [s]
    return Is.quotient(t) == Is


def flat_hypersurface(A: FpAlgebra, s, t) -> FlatVerdict:
    """Flatness of A[T]/(sT - t) over A for a regular sequence (s, t)."""
    s, t = A.reduce(A.ring(s)), A.reduce(A.ring(t))
    details = {"s": s, "t": t}
    try:
        if not is_regular_sequence(A, s, t):
            return FlatVerdict(UNDECIDED, "hypersurface", reason=f"({s}, {t}) is not a regular sequence",
                               details=details)
        unit = (A.ideal + [s, t]).is_unit()
    except Undecided as exc:
        return FlatVerdict(UNDECIDED, "hypersurface", reason=exc.reason, details=details)
    if unit:
        return FlatVerdict(FLAT, "hypersurface", details=details)
    return FlatVerdict(NOT_FLAT, "hypersurface", witness=Ideal(A.ring, [s, t]), details=details)


def _minors(matrix, size: int):
    """All size x size minors (rows choose size, columns choose size), by memoized Laplace expansion."""
    memo: dict = {}

    def det(rows, cols):
        if not rows:
            return None
        key = (rows, cols)
        if key in memo:
            return memo[key]
        if len(rows) == 1:
            val = matrix[rows[0]][cols[0]]
        else:
            val = None
            for k, c in enumerate(cols):
                a = matrix[rows[0]][c]
                if not a:
                    continue
                sub = det(rows[1:], cols[:k] + cols[k + 1:])
                if not sub:
                    continue
                term = a * sub
                if k % 2:
                    term = -term
                val = term if val is None else val + term
            if val is None:
                val = matrix[rows[0]][cols[0]].ring.zero()
        memo[key] = val
        return val

    ncols = len(matrix[0]) if matrix else 0
    for rows in combinations(range(len(matrix)), size):
        for cols in combinations(range(ncols), size):
            yield det(rows, cols)


def fitting_ideal(M: PresentedModule, k: int) -> Ideal:
    """Fitt_k(M) as an ideal of the base presentation ring (base relations included)."""
    A = M.base
    size = M.ngens - k
    if size <= 0:
        return Ideal(A.ring, [A.ring.one()])
    if size > len(M.matrix):
        return A.ideal
    return _accumulate(A, _minors([list(r) for r in M.matrix], size))


def _accumulate(A: FpAlgebra, polys, batch: int = 8) -> Ideal:
    """A.ideal + polys, reducing each new element against the basis built so far.

    Most minors of a presentation matrix are redundant; reducing them first keeps the
    Buchberger runs small.
    """
    order = grevlex
    basis = A.ideal.groebner(order)
    prepared = prepare_basis(basis, order)
    pending: list = []
    for f in polys:
        r = normal_form(f, basis, order, prepared)
        if not r:
            continue
        pending.append(r)
        if len(pending) >= batch:
            basis = buchberger(list(basis) + pending, order)
            prepared = prepare_basis(basis, order)
            pending = []
            if len(basis) == 1 and basis[0].is_constant():
                break
    if pending:
        basis = buchberger(list(basis) + pending, order)
    return Ideal.from_groebner(A.ring, basis, order)


def fitting_ideals(M: PresentedModule) -> list[Ideal]:
    return [fitting_ideal(M, k) for k in range(M.ngens + 1)]


def _display(ideal: Ideal, A: FpAlgebra) -> Ideal:
    gens = [g for g in ideal.groebner() if not A.ideal.contains(g)] if not ideal.is_unit() else list(ideal.groebner())
    return Ideal(A.ring, gens)


def flat_finite(M: PresentedModule, base_connected: bool) -> FlatVerdict:
    """A finite module over a connected Noetherian base is flat iff Fitt_{r-1} = 0 and Fitt_r = (1) for some r."""
    if not base_connected:
        return FlatVerdict(UNDECIDED, "fitting", reason="base ring not asserted connected")
    A = M.base
    try:
        r, prev = 0, None
        while not (current := fitting_ideal(M, r)).is_unit():
            r, prev = r + 1, current
        if r == 0:
            return FlatVerdict(FLAT, "fitting", rank=0)
        if prev <= A.ideal:
            return FlatVerdict(FLAT, "fitting", rank=r)
        return FlatVerdict(NOT_FLAT, "fitting", witness=_display(prev, A),
                           details={"fitting_index": r - 1, "candidate_rank": r})
    except Undecided as exc:
        return FlatVerdict(UNDECIDED, "fitting", reason=exc.reason)


def kaehler_differentials(phi: RingMap) -> PresentedModule:
    """Ω of the target over the source, on d(target generators)."""
    B = phi.target
    n = B.ngens
    rows = []
    for f in list(B.ideal.gens) + list(phi.images):
        row = tuple(B.reduce(f.derivative(j)) for j in range(n))
        if any(row) and row not in rows:
            rows.append(row)
    return PresentedModule(B, n, tuple(rows), tuple(f"d{x}" for x in B.names))


def flatness(phi: RingMap, base_connected: bool = False) -> FlatVerdict:
    """Route a flatness question to the hypersurface or the Fitting criterion."""
    A = phi.source
    try:
        rel = relative_presentation(phi)
        base_pos = list(range(A.ngens))
        Ib = Ideal(rel.ring, [r.embed(rel.ring, base_pos) for r in A.ideal.gens])
        if not rel.fiber and rel.relations == Ib:
            return FlatVerdict(FLAT, "trivial", rank=1, details={"note": "isomorphism"})
        if len(rel.fiber) == 1:
            verdict = _hypersurface_route(A, rel, Ib)
            if verdict is not None and verdict.status != UNDECIDED:
                return verdict
        gens = module_generators(phi)
        if gens is None:
            return FlatVerdict(UNDECIDED, "none",
                               reason="not a one-generator hypersurface extension and no module-finiteness witness")
        return flat_finite(module_presentation(phi, gens), base_connected)
    except Undecided as exc:
        return FlatVerdict(UNDECIDED, "none", reason=exc.reason)


def _hypersurface_route(A: FpAlgebra, rel, Ib: Ideal) -> Optional[FlatVerdict]:
    T = rel.nbase
    back = list(range(A.ngens)) + [0]
    for h in rel.relations.groebner():
        if h.degree_in(T) != 1:
            continue
        s_terms, r_terms = {}, {}
        for e, v in h.terms.items():
            if e[T]:
                s_terms[e[:T] + (0,) + e[T + 1:]] = v
            else:
                r_terms[e] = v
        s = Poly(rel.ring, s_terms)
        if s.variables() & {T} or not (Ib + [h]) == rel.relations:
            continue
        s_a = s.embed(A.ring, back)
        t_a = (-Poly(rel.ring, r_terms)).embed(A.ring, back)
        if A.field.characteristic == 0 and s_a and s_a.lc() < 0:
            s_a, t_a = -s_a, -t_a
        return flat_hypersurface(A, s_a, t_a)
    return None


ETALE, NOT_ETALE = "Etale", "NotEtale"


@dataclass(frozen=True)
class EtaleVerdict:
    status: str
    flat: FlatVerdict
    unramified: Optional[bool]
    reason: str = ""

    def to_dict(self) -> dict:
        out = {"status": self.status, "flat": self.flat.to_dict(), "unramified": self.unramified}
        if self.reason:
            out["reason"] = self.reason
        return out


def is_etale(phi: RingMap, base_connected: bool = False) -> EtaleVerdict:
    """Flat and Ω = 0 (characteristic zero)."""
    fv = flatness(phi, base_connected)
    try:
        unram = kaehler_differentials(phi).is_zero()
    except Undecided as exc:
        if fv.status == NOT_FLAT:
            return EtaleVerdict(NOT_ETALE, fv, None)
        return EtaleVerdict(UNDECIDED, fv, None, reason=exc.reason)
    if fv.status == NOT_FLAT or not unram:
        return EtaleVerdict(NOT_ETALE, fv, unram)
    if fv.status == FLAT:
        return EtaleVerdict(ETALE, fv, unram)
    return EtaleVerdict(UNDECIDED, fv, unram, reason=fv.reason)
