"""Brute-force cross-checks over small prime fields.

These routines share no decision logic with the flatness and image code: points are found
by exhaustive search, fiber lengths by counting standard monomials of a fiber over GF(p),
and subalgebra membership by linear algebra on products of generators.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cas import GF, BudgetExceeded, Ideal, Poly, normal_form
from .rings import FpAlgebra, RingMap, simplify

log = logging.getLogger(__name__)

MAX_GENS = 4
MAX_PRIME = 257
YES = "yes"
NOT_WITHIN_BOUND = "no-within-bound"


class BadPrime(ValueError):
    """The prime divides a denominator of the input, so the input has no reduction mod p."""


@dataclass(frozen=True)
class PointSample:
    p: int
    points: tuple

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _mod_p(f: Poly, p: int) -> Poly:
    try:
        return f.change_field(GF(p))
    except ZeroDivisionError as exc:
        raise BadPrime(str(exc)) from None


def _compile(f: Poly, p: int):
    """(coefficient, exponent) pairs of f mod p, for vectorized evaluation."""
    g = _mod_p(f, p)
    return [(int(c), e) for e, c in g.terms.items()]


def _eval_grid(terms, powers, cols, shape, fixed):
    """Evaluate compiled terms over a grid; ``cols`` maps variable index to grid axis."""
    total = np.zeros(shape, dtype=np.int64)
    p = powers[0].shape[0]
    for c, e in terms:
        t = np.full(shape, c, dtype=np.int64)
        for i, a in enumerate(e):
            if not a:
                continue
            if i in cols:
                idx = [np.newaxis] * len(shape)
                idx[cols[i]] = slice(None)
                t = t * powers[a][tuple(idx)] % p
            else:
                t = t * int(powers[a][fixed[i]]) % p
        total = (total + t) % p
    return total


def enumerate_points(A: FpAlgebra, p: int) -> PointSample:
    """All GF(p)-points of Spec A, by exhaustive search (at most 4 generators, p <= 257)."""
    n = A.ngens
    if n > MAX_GENS or p > MAX_PRIME:
        raise BudgetExceeded(f"point enumeration limited to {MAX_GENS} generators and p <= {MAX_PRIME}")
    GF(p)  # validates p
    rels = [_compile(r, p) for r in A.ideal.gens]
    rels = [r for r in rels if r]
    maxdeg = max([sum(e) for r in rels for _, e in r] + [1])
    base = np.arange(p, dtype=np.int64)
    powers = [np.ones(p, dtype=np.int64)]
    for _ in range(maxdeg):
        powers.append(powers[-1] * base % p)
    # the last (up to) three variables are scanned as a numpy grid, the others one value at a time
    ngrid = min(n, 3)
    outer = n - ngrid
    cols = {outer + k: k for k in range(ngrid)}
    shape = (p,) * ngrid
    early = [r for r in rels if all(e[i] == 0 for _, e in r for i in cols)]
    late = [r for r in rels if r not in early]
    found = []
    for prefix in itertools.product(range(p), repeat=outer):
        fixed = dict(enumerate(prefix))
        if any(_eval_grid(r, powers, {}, (), fixed) for r in early):
            continue
        ok = np.ones(shape, dtype=bool)
        for r in late:
            ok &= _eval_grid(r, powers, cols, shape, fixed) == 0
        if ngrid:
            found.extend(tuple(prefix) + tuple(row) for row in np.argwhere(ok).tolist())
        elif ok:
            found.append(tuple(prefix))
    return PointSample(p, tuple(sorted(found)))


def _point_ideal_mod_p(phi: RingMap, point: Sequence[int], p: int) -> Ideal:
    T = phi.target
    ring = T.ring.with_field(GF(p))
    gens = [_mod_p(r, p) for r in T.ideal.gens]
    gens += [_mod_p(img, p) - ring.const(x) for img, x in zip(phi.images, point)]
    return Ideal(ring, gens)


def fiber_length(phi: RingMap, point: Sequence[int], p: int) -> Optional[int]:
    """dim over GF(p) of target / (source point) target, or None if the fiber is not finite."""
    sm = _point_ideal_mod_p(phi, point, p).standard_monomials()
    return None if sm is None else len(sm)


@dataclass(frozen=True)
class FiberSurvey:
    """Fiber lengths of a map over every GF(p)-point of its source."""

    p: int
    lengths: dict

    @property
    def values(self) -> set:
        return set(self.lengths.values())

    @property
    def constant(self) -> bool:
        return len(self.values) <= 1

    def jump(self):
        """Two points with different fiber lengths, or None."""
        seen: dict = {}
        for pt, n in sorted(self.lengths.items()):
            seen.setdefault(n, pt)
        if len(seen) < 2:
            return None
        (a, pa), (b, pb) = sorted(seen.items())[:2]
        return (pa, a), (pb, b)


def fiber_survey(phi: RingMap, p: int, sample: Optional[int] = None) -> FiberSurvey:
    """Fiber length at every GF(p)-point of the source, or at ``sample`` of them.

    Sources with more than four generators are first replaced by an isomorphic presentation
    with redundant generators removed; points are reported in that presentation. The sample,
    when requested, is a seeded random subset and so is reproducible.
    """
    S = phi.source
    if S.ngens > MAX_GENS:
        _, _, back = simplify(S)
        phi = phi.compose(back)
    points = list(enumerate_points(phi.source, p))
    if sample is not None and len(points) > sample:
        points = sorted(random.Random(p).sample(points, sample))
    return FiberSurvey(p, {pt: fiber_length(phi, pt, p) for pt in points})


def oracle_flatness(phi: RingMap, primes: Sequence[int] = (101, 103), sample: Optional[int] = None) -> dict:
    """Constant fiber length (expected when flat) or a jump (forced when not flat), per prime.

    Primes that divide a denominator of the input are skipped and logged.
    """
    out = {}
    for p in primes:
        try:
            survey = fiber_survey(phi, p, sample)
        except BadPrime as exc:
            log.warning("skipping p=%d: %s", p, exc)
            continue
        jump = survey.jump()
        out[p] = {
            "points": len(survey.lengths),
            "lengths": sorted(v for v in survey.values if v is not None),
            "constant": survey.constant,
            "jump": None if jump is None else [list(jump[0][0]), jump[0][1], list(jump[1][0]), jump[1][1]],
        }
    return out


def _echelon_mod_p(M: np.ndarray, p: int) -> tuple[np.ndarray, list]:
    """Reduced row echelon form of M over GF(p) and its pivot columns."""
    M = M % p
    nrows, ncols = M.shape
    rank, pivots = 0, []
    for c in range(ncols):
        if rank == nrows:
            break
        nz = np.nonzero(M[rank:, c])[0]
        if not nz.size:
            continue
        piv = rank + int(nz[0])
        M[[rank, piv]] = M[[piv, rank]]
        M[rank] = M[rank] * pow(int(M[rank, c]), -1, p) % p
        factors = M[:, c].copy()
        factors[rank] = 0
        M = (M - np.outer(factors, M[rank])) % p
        pivots.append(c)
        rank += 1
    return M[:rank], pivots


class TruncatedSpan:
    """GF(p)-span of the products of ``gens`` of total degree <= bound, modulo the target's relations."""

    def __init__(self, gens: Sequence[Poly], bound: int, p: int, target: Optional[FpAlgebra] = None):
        self.p = p
        self.bound = bound
        ring_p = gens[0].ring.with_field(GF(p)) if gens else None
        if target is not None:
            ring_p = target.ring.with_field(GF(p))
            self.rel_basis = Ideal(ring_p, [_mod_p(r, p) for r in target.ideal.gens]).groebner()
        else:
            self.rel_basis = ()
        gens_p = [normal_form(_mod_p(g, p), self.rel_basis) for g in gens]
        products = []
        for d in range(bound + 1):
            for combo in itertools.combinations_with_replacement(range(len(gens_p)), d):
                m = ring_p.one()
                for i in combo:
                    m = normal_form(m * gens_p[i], self.rel_basis)
                products.append(m)
        self.columns = {e: k for k, e in enumerate(sorted({e for q in products for e in q.terms}))}
        rows = np.array([self._row(q) for q in products], dtype=np.int64)
        self.echelon, self.pivots = _echelon_mod_p(rows, p)

    def _row(self, q: Poly) -> list:
        r = [0] * len(self.columns)
        for e, c in q.terms.items():
            r[self.columns[e]] = int(c)
        return r

    def __contains__(self, f: Poly) -> bool:
        goal = normal_form(_mod_p(f, self.p), self.rel_basis)
        if any(e not in self.columns for e in goal.terms):
            return False
        v = np.array(self._row(goal), dtype=np.int64)
        for row, c in zip(self.echelon, self.pivots):
            if v[c]:
                v = (v - v[c] * row) % self.p
        return not v.any()

    def membership(self, f: Poly) -> str:
        return YES if f in self else NOT_WITHIN_BOUND


def truncated_membership(f: Poly, gens: Sequence[Poly], bound: int, p: int,
                         target: Optional[FpAlgebra] = None) -> str:
    """Is f a GF(p)-linear combination of products of ``gens`` of total degree <= bound?

    Everything is reduced modulo the target's relations over GF(p). Answers "yes" or
    "no-within-bound"; the latter says nothing about higher degrees.
    """
    return TruncatedSpan(gens, bound, p, target).membership(f)


__all__ = [
    "BadPrime", "PointSample", "FiberSurvey", "enumerate_points", "fiber_length", "fiber_survey",
    "oracle_flatness", "TruncatedSpan", "truncated_membership", "YES", "NOT_WITHIN_BOUND",
]
