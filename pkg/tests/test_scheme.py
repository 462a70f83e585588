from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_closure, corpus_env, corpus_report
from separator.cas import GF, Undecided
from separator.flatness import FLAT
from separator.rings import FpAlgebra, RingMap, is_epimorphism, is_injective, localize
from separator.scheme import (ALREADY_SEPARATED, DISTINCT, IDENTIFIED, NO_SEPARATOR, SEPARATOR_EXISTS, UNDECIDED,
                              YES, PointRef, _is_square, apparented, build_twisted, certify_localization,
                              diagonal_dominant, glue, identified_in_separator, is_separated, open_subset,
                              separator_check, twist_spec, visibly_domain)

SCHEMES = [("doubled_line", "D"), ("doubled_line", "D2"), ("ex71", "T"), ("crossing_lines", "T"),
           ("trivial_glue", "T")]


def line_doubled():
    L = FpAlgebra(["x"])
    return build_twisted(twist_spec(L, [L.ring("x")], {}), name="D")


# -- construction

def test_open_subset_without_inverted_elements_is_the_whole_chart():
    A = FpAlgebra(["x"])
    C0, inc = open_subset(A, [])
    assert C0 is A and inc.agrees_with(RingMap(A, A, ["x"]))


def test_twist_must_be_an_automorphism():
    A = FpAlgebra(["x", "z"])
    C0, inc = open_subset(A, [A.ring("x")])
    w = C0.ring.gen(2)
    with pytest.raises(ValueError, match="automorphism"):
        twist_spec(A, [A.ring("x")], {"z": C0.ring("x*z")}, inverse={"z": C0.ring("z")}, open_ring=(C0, inc))
    with pytest.raises(ValueError, match="not generators"):
        twist_spec(A, [A.ring("x")], {"q": C0.ring("z")}, open_ring=(C0, inc))
    with pytest.raises(ValueError, match="open subset"):
        twist_spec(A, [A.ring("x")], {"x": C0.ring("x + 1")}, inverse={"x": C0.ring("x - 1")}, open_ring=(C0, inc))
    spec = twist_spec(A, [A.ring("x")], {"z": C0.ring("x*z")}, inverse={"z": w * C0.ring("z")}, open_ring=(C0, inc))
    assert spec.twist.compose(spec.inverse).agrees_with(RingMap(C0, C0, C0.gens()))


def test_glue_certifies_open_immersions():
    L0, L1 = FpAlgebra(["s"]), FpAlgebra(["t"])
    W, r0 = localize(L0, L0.ring("s"))
    r1 = RingMap(L1, W, [W.ring("s")])
    assert certify_localization(r0)
    assert certify_localization(r1, [L1.ring("t")])
    assert not certify_localization(r1, [L1.ring("t - 1")])
    bad = RingMap(L1, W, [W.ring("s^2")])
    with pytest.raises(ValueError, match="localization"):
        glue(L0, L1, W, r0, bad, invert_V=[L1.ring("t")])


def test_doubled_line_is_not_separated():
    D = line_doubled()
    assert not is_separated(D)
    assert diagonal_dominant(D) == YES


def test_visibly_domain():
    assert visibly_domain(FpAlgebra(["x", "y"]))
    assert visibly_domain(FpAlgebra(["x", "y"], ["y^2 - x^3 - x"]))
    assert visibly_domain(FpAlgebra(["x"], ["x^2 + 1"]))
    assert not visibly_domain(FpAlgebra(["x", "y"], ["x*y"]))
    assert not visibly_domain(FpAlgebra(["x"], ["x^2 - 4"]))
    assert not visibly_domain(FpAlgebra(["x", "y"], ["y^2 - x^2"]))
    assert not visibly_domain(FpAlgebra(["x"], field=GF(5)))
    A = FpAlgebra(["x", "y"], ["y^2 - x^3"])
    assert visibly_domain(localize(A, A.ring("x"))[0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=4))
def test_squares_are_recognized(c):
    c = [Fraction(v) for v in c]
    sq = [Fraction(0)] * (2 * len(c) - 1)
    for i, a in enumerate(c):
        for j, b in enumerate(c):
            sq[i + j] += a * b
    assert _is_square(sq)


def test_non_squares():
    assert not _is_square([Fraction(1), Fraction(0), Fraction(0), Fraction(1)])
    assert not _is_square([Fraction(-1)])
    assert not _is_square([Fraction(2)])


# -- separator check on the corpus

@pytest.mark.parametrize("stem,name", SCHEMES)
def test_verdict_is_symmetric_under_chart_swap(stem, name):
    T = corpus_env(stem).schemes[name]
    a, b = corpus_report(stem, name), separator_check(T.swap())
    assert a.verdict == b.verdict
    if a.flat_U is not None:
        assert (a.flat_U.status, a.flat_V.status) == (b.flat_V.status, b.flat_U.status)


@pytest.mark.parametrize("stem,name", SCHEMES)
def test_closure_is_coherent_with_the_gluing(stem, name):
    T = corpus_env(stem).schemes[name]
    D = corpus_closure(stem, name)
    assert is_injective(D.inclusion)
    assert D.inclusion.compose(D.d1).agrees_with(T.rho_U)
    assert D.inclusion.compose(D.d0).agrees_with(T.rho_V)


@pytest.mark.parametrize("stem,name", SCHEMES)
def test_constructed_separators_are_sound(stem, name):
    r = corpus_report(stem, name)
    if r.verdict != SEPARATOR_EXISTS:
        return
    E = r.separator.E
    assert is_separated(E)
    assert r.flat_U.status == FLAT and r.flat_V.status == FLAT
    assert is_epimorphism(E.rho_U) and is_epimorphism(E.rho_V)


def test_expected_verdicts():
    assert corpus_report("doubled_line", "D").verdict == SEPARATOR_EXISTS
    assert corpus_report("ex71").verdict == NO_SEPARATOR
    assert corpus_report("crossing_lines").verdict == NO_SEPARATOR
    assert corpus_report("trivial_glue").verdict == ALREADY_SEPARATED


def test_flat_without_dominance_is_undecided():
    # a doubled line over GF(5): flat on both sides, but no domain certificate in positive characteristic
    L = FpAlgebra(["x"], field=GF(5))
    D = build_twisted(twist_spec(L, [L.ring("x")], {}))
    r = separator_check(D)
    assert r.verdict == UNDECIDED and "dominance" in r.reason


# -- points

def test_apparented_is_reflexive_on_the_overlap():
    # (X, Z) = (a, b) on U is the point (a, a*b/(1 - a)) on V
    T = corpus_env("ex71").schemes["T"]
    for a, b in ((Fraction(3), 1), (Fraction(-1), 2), (Fraction(1, 3), 3)):
        x = PointRef("U", (T.A.ring(f"X - {a}"), T.A.ring(f"Z - {b}")))
        same = PointRef("V", (T.B.ring(f"X - {a}"), T.B.ring(f"Z - {a * b / (1 - a)}")))
        other = PointRef("V", (T.B.ring(f"X - {a}"), T.B.ring(f"Z - {b + 1}")))
        assert apparented(T, x, same)
        assert not apparented(T, x, other)
    D = corpus_env("doubled_line").schemes["D"]
    for c in range(-2, 3):
        p = (D.A.ring(f"x - {c}"),)
        assert apparented(D, PointRef("U", p), PointRef("V", p))


def test_identification_in_the_separator():
    D = corpus_env("doubled_line").schemes["D"]
    r = corpus_report("doubled_line", "D")
    o = (D.A.ring("x"),)
    assert identified_in_separator(D, PointRef("U", o), PointRef("V", o), r) == IDENTIFIED
    p1, p2 = PointRef("U", (D.A.ring("x - 1"),)), PointRef("V", (D.A.ring("x - 2"),))
    assert identified_in_separator(D, p1, p2, r) == DISTINCT
    T = corpus_env("ex71").schemes["T"]
    P = PointRef("U", (T.A.ring("2*X - 1"), T.A.ring("Z")))
    Q = PointRef("V", P.generators)
    assert apparented(T, P, Q)
    assert identified_in_separator(T, P, Q, corpus_report("ex71")) == NO_SEPARATOR


def test_points_must_be_rational_and_on_the_right_chart():
    D = corpus_env("doubled_line").schemes["D"]
    o = (D.A.ring("x"),)
    with pytest.raises(ValueError):
        apparented(D, PointRef("V", o), PointRef("U", o))
    with pytest.raises(ValueError, match="rational maximal"):
        apparented(D, PointRef("U", (D.A.ring("x^2 + 1"),)), PointRef("V", o))


def test_apparented_needs_integral_charts():
    T = corpus_env("crossing_lines").schemes["T"]
    x = PointRef("U", (T.A.ring("X"), T.A.ring("Y")))
    with pytest.raises(Undecided):
        apparented(T, x, PointRef("V", x.generators))
