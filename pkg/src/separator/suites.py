"""Randomized property suite for one-generator extensions A[T]/(sT - t).

For a regular sequence (s, t), A[T]/(sT - t) is flat over A exactly when (s, t) is the unit
ideal. The suite draws small instances, keeps the regular ones and checks:

* the verdict of ``flat_hypersurface`` against a direct unit-ideal test;
* the general ``flatness`` router on the map A -> A[T]/(sT - t) gives the same verdict;
* multiplying s and t by a unit does not change the verdict;
* on module-finite instances, fiber lengths over GF(p) are constant when flat and jump when not.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .cas import Poly
from .flatness import FLAT, NOT_FLAT, UNDECIDED, flat_hypersurface, flatness, is_regular_sequence
from .oracle import oracle_flatness
from .rings import FpAlgebra, RingMap, module_finite_witness

ORACLE_SAMPLE = 40  # GF(p)-points per module-finite instance

# (generators, relations, a unit other than the constants)
BASES = (
    (("x",), (), None),
    (("x", "y"), (), None),
    (("x", "y", "z"), (), None),
    (("x", "y"), ("x*y - 1",), "x"),
    (("x", "y", "z"), ("z^2 - x*y",), None),
    (("x", "y"), ("y^2 - x^3",), None),
)


@dataclass(frozen=True)
class Instance:
    A: FpAlgebra
    s: Poly
    t: Poly
    unit: Poly


def _random_poly(rng: random.Random, A: FpAlgebra, max_degree: int = 2) -> Poly:
    n = A.ngens
    monos = [e for e in _exponents(n, max_degree)]
    f = A.ring.zero()
    for _ in range(rng.randint(1, 3)):
        e = rng.choice(monos)
        f = f + A.ring.monomial(e, rng.choice((-2, -1, 1, 2, 3)))
    return A.reduce(f)


def _exponents(n: int, d: int):
    if n == 0:
        yield ()
        return
    for a in range(d + 1):
        for rest in _exponents(n - 1, d - a):
            yield (a,) + rest


def random_instances(seed: int, count: int, max_tries: int = 5000):
    """``count`` random regular (A, s, t), deterministic in ``seed``."""
    rng = random.Random(seed)
    bases = [(FpAlgebra(g, r), u) for g, r, u in BASES]
    out = []
    for _ in range(max_tries):
        if len(out) == count:
            break
        A, unit_name = rng.choice(bases)
        s = A.ring.const(rng.choice((1, 2, -3))) if rng.random() < 0.25 else _random_poly(rng, A)
        t = _random_poly(rng, A)
        if not s or not is_regular_sequence(A, s, t):
            continue
        if unit_name is not None and rng.random() < 0.5:
            unit = A.ring.gen(unit_name)
        else:
            unit = A.ring.const(rng.choice((-1, 2, 5)))
        out.append(Instance(A, s, t, unit))
    return out


def extension(A: FpAlgebra, s: Poly, t: Poly):
    """The map A -> A[T]/(sT - t)."""
    names = list(A.names) + ["T"]
    pos = list(range(A.ngens))
    B0 = FpAlgebra(names, (), A.field)
    rels = [r.embed(B0.ring, pos) for r in A.ideal.gens]
    rels.append(s.embed(B0.ring, pos) * B0.ring.gen("T") - t.embed(B0.ring, pos))
    B = FpAlgebra(names, rels, A.field)
    return RingMap(A, B, B.gens()[: A.ngens], check=False)


def extension_suite(seed: int = 0, count: int = 50, oracle_prime: int = 101) -> dict:
    tested = flat = not_flat = 0
    failures = []
    router_agrees = unit_invariant = True
    oracle_checked = 0
    oracle_agrees = True
    for inst in random_instances(seed, count):
        A, s, t = inst.A, inst.s, inst.t
        v = flat_hypersurface(A, s, t)
        unit = (A.ideal + [s, t]).is_unit()
        tested += 1
        ok = v.status != UNDECIDED and (v.status == FLAT) == unit
        flat += v.status == FLAT
        not_flat += v.status == NOT_FLAT
        phi = extension(A, s, t)
        routed = flatness(phi, base_connected=True)
        if routed.status != v.status:
            router_agrees = False
            failures.append(f"router: {A.describe()} s={s} t={t}: {routed.status} vs {v.status}")
        scaled = flat_hypersurface(A, inst.unit * s, inst.unit * t)
        if scaled.status != v.status:
            unit_invariant = False
            failures.append(f"unit {inst.unit}: {A.describe()} s={s} t={t}")
        if module_finite_witness(phi) is not None:
            survey = oracle_flatness(phi, [oracle_prime], sample=ORACLE_SAMPLE).get(oracle_prime)
            if survey is not None:
                oracle_checked += 1
                agree = survey["constant"] if v.status == FLAT else survey["jump"] is not None
                if not agree:
                    oracle_agrees = False
                    failures.append(f"oracle: {A.describe()} s={s} t={t}: {survey}")
        if not ok:
            failures.append(f"verdict: {A.describe()} s={s} t={t}: {v.status}, unit ideal {unit}")
    coherent = tested >= count and not any(f.startswith("verdict") for f in failures)
    return {
        "seed": seed,
        "requested": count,
        "tested": tested,
        "flat": flat,
        "not_flat": not_flat,
        "coherent": coherent,
        "router_agrees": router_agrees,
        "unit_invariant": unit_invariant,
        "oracle_prime": oracle_prime,
        "oracle_checked": oracle_checked,
        "oracle_agrees": oracle_agrees,
        "failures": failures,
    }
