"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run directly with ``python tests/test_acceptance.py`` or through pytest (the lines are
repeated in the terminal summary).
"""
import itertools
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import corpus_closure, corpus_env, corpus_report  # noqa: E402
from separator.cas import Ideal, buchberger, normal_form  # noqa: E402
from separator.cli.corpus import corpus_dir, corpus_files  # noqa: E402
from separator.cli.runner import element  # noqa: E402
from separator.expr import parse_expression  # noqa: E402
from separator.flatness import (ETALE, FLAT, NOT_FLAT, fitting_ideal, flat_finite, flatness, is_etale,  # noqa: E402
                                is_regular_sequence)
from separator.oracle import NOT_WITHIN_BOUND, YES, TruncatedSpan, oracle_flatness  # noqa: E402
from separator.rings import is_surjective, module_finite_witness, module_presentation, ringmap_kernel  # noqa: E402
from separator.scheme import (DISTINCT, IDENTIFIED, NO_SEPARATOR, SEPARATOR_EXISTS, UNDECIDED, PointRef,  # noqa: E402
                              chart_connected, identified_in_separator, is_separated, separator_check)
from separator.suites import extension_suite  # noqa: E402

RESULTS: dict = {}


def verdict_line(n: int, title: str, checks: list) -> None:
    """Print and record one line for criterion n; fail the test if any named check is false."""
    failed = [name for name, ok in checks if not ok]
    line = f"{'PASS' if not failed else 'FAIL'} criterion {n}: {title}"
    if failed:
        line += " [failed: " + "; ".join(failed) + "]"
    RESULTS[n] = line
    print(line)
    assert not failed, line


def same_ideal(a: Ideal, b: Ideal) -> bool:
    return a <= b and b <= a and a == b


# -- 1: the smooth twisted plane

def test_criterion_1_twisted_plane():
    T = corpus_env("ex71").schemes["T"]
    D = corpus_closure("ex71")
    r = corpus_report("ex71")
    C = D.C
    X, ZU, ZV = (C.ring.gen(n) for n in ("X_U", "Z_U", "Z_V"))
    expected = Ideal(C.ring, [(1 - X) * ZV - X * ZU])
    full = D.full
    xu, xv, zu, zv = (full.ring.gen(n) for n in ("X_U", "X_V", "Z_U", "Z_V"))
    expected_full = Ideal(full.ring, [xu - xv, (1 - xu) * zv - xu * zu])
    A = T.A
    x, z = A.ring.gen("X"), A.ring.gen("Z")
    wU, wV = Ideal(A.ring, [1 - x, x * z]), Ideal(A.ring, [x, (1 - x) * z])
    checks = [
        ("Im(phi) presented by ((1-X)Z_V - X Z_U)", same_ideal(C.ideal, expected)),
        ("kernel of phi on the full tensor product", same_ideal(full.ideal, expected_full)),
        ("verdict NoSeparator", r.verdict == NO_SEPARATOR),
        ("both sides NotFlat by the hypersurface criterion",
         (r.flat_U.status, r.flat_V.status, r.flat_U.method, r.flat_V.method)
         == (NOT_FLAT, NOT_FLAT, "hypersurface", "hypersurface")),
        ("witness over U is (1-X, XZ)", same_ideal(r.flat_U.witness, wU)),
        ("witness over V is (X, (1-X)Z)", same_ideal(r.flat_V.witness, wV)),
        ("witnesses are regular and non-unit",
         all(is_regular_sequence(A, *w.gens) and not w.is_unit() for w in (wU, wV))),
    ]
    verdict_line(1, "twisted plane: Im(phi) = ((1-X)Z_V - X Z_U), NoSeparator with witnesses (1-X, XZ), (X, (1-X)Z)",
                 checks)


# -- 2: randomized one-generator extensions

def test_criterion_2_extension_suite():
    s = extension_suite(seed=0, count=50, oracle_prime=101)
    checks = [
        (">= 50 regular instances", s["tested"] >= 50),
        ("Flat iff (s, t) = (1)", s["coherent"]),
        ("both verdicts occur", s["flat"] > 0 and s["not_flat"] > 0),
        ("router agrees", s["router_agrees"]),
        ("unit invariance", s["unit_invariant"]),
        ("oracle ran on module-finite cases", s["oracle_checked"] > 0),
        ("GF(101) fiber lengths agree", s["oracle_agrees"]),
    ]
    verdict_line(2, f"A[T]/(sT - t) flat iff (s, t) = (1) on {s['tested']} instances "
                    f"({s['flat']} flat, {s['not_flat']} not flat, {s['oracle_checked']} oracle-checked)", checks)


# -- 3: crossing lines with a doubled branch

def test_criterion_3_crossing_lines():
    T = corpus_env("crossing_lines").schemes["T"]
    D = corpus_closure("crossing_lines")
    r = corpus_report("crossing_lines")
    B = T.B
    Y = B.ring.gen("Y")
    M = module_presentation(D.d0)
    v = flat_finite(M, base_connected=True)
    checks = [
        ("Im(phi) is QQ[X] (one generator, no relations)", D.C.ngens == 1 and D.C.ideal.is_zero()),
        ("V-side map is onto Im(phi)", is_surjective(D.d0)),
        ("its kernel is YA", same_ideal(ringmap_kernel(D.d0), B.ideal + [Y])),
        ("A/YA not flat over A = QQ[X,Y]/(XY)", v.status == NOT_FLAT),
        ("charts asserted connected, not integral", T.connected and not T.integral and chart_connected(T, "V")),
        ("dominance stays undecided", r.dominance == UNDECIDED),
        ("verdict NoSeparator", r.verdict == NO_SEPARATOR),
    ]
    verdict_line(3, "crossing lines: Im(phi) = A/YA = QQ[X], not flat over A, NoSeparator", checks)


# -- 4: the line with a doubled origin

def test_criterion_4_doubled_line():
    T = corpus_env("doubled_line").schemes["D"]
    r = corpus_report("doubled_line", "D")
    sep = r.separator
    x = T.A.ring.gen("x")
    origin = (x,)
    checks = [("verdict SeparatorExists", r.verdict == SEPARATOR_EXISTS)]
    if sep is not None:
        W = sep.E.C0
        checks += [
            ("gluing ring is QQ[x]", W.ngens == 1 and W.ideal.is_zero()),
            ("both structure maps are isomorphisms", sep.iso_U and sep.iso_V),
            ("E is separated", is_separated(sep.E)),
            ("two origins identified",
             identified_in_separator(T, PointRef("U", origin), PointRef("V", origin), r) == IDENTIFIED),
            ("(x-1) and (x-2) distinct",
             identified_in_separator(T, PointRef("U", (x - 1,)), PointRef("V", (x - 2,)), r) == DISTINCT),
        ]
    verdict_line(4, "doubled line: separator glued along QQ[x], origins identified, (x-1) and (x-2) distinct", checks)


# -- 5: the etale scheme over the nodal cubic

IDEMPOTENTS = ("-4*y1*y3*inv(u)", "-4*y1*y2*inv(u)", "-4*y2*y3*inv(u)")
T_FIRST = "(1 + v*inv(u))/2*(-4*y1*y3*inv(u))"
T_OTHERS = ("(1 + v*inv(u))/2*(-4*y1*y2*inv(u))", "(1 + v*inv(u))/2*(-4*y2*y3*inv(u))")


def test_criterion_5_nodal_cover():
    env = corpus_env("ex72")
    r = corpus_report("ex72")
    phi = r.closure.phi
    C0 = phi.target
    span = TruncatedSpan(phi.images, 4, 101, C0)
    elems = {s: element(C0, parse_expression(s)) for s in IDEMPOTENTS + (T_FIRST,) + T_OTHERS + ("inv(u)",)}
    e = [elems[s] for s in IDEMPOTENTS]
    norm = flatness(env.maps["normalization"], base_connected=True)
    cover = is_etale(env.maps["cover"], base_connected=True)
    checks = [
        ("e1, e2, e3 are orthogonal idempotents summing to 1",
         all(C0.equal(a * a, a) for a in e) and all(C0.is_zero(a * b) for a, b in itertools.combinations(e, 2))
         and C0.equal(e[0] + e[1] + e[2], 1)),
        ("idempotents and (t,0,0) in the span of degree <= 4 products over GF(101)",
         all(span.membership(elems[s]) == YES for s in IDEMPOTENTS + (T_FIRST,))),
        ("idempotents and (t,0,0) in Im(phi) exactly",
         all(phi.preimage(elems[s]) is not None for s in IDEMPOTENTS + (T_FIRST,))),
        ("(0,t,0) and (0,0,t) in Im(phi) exactly", all(phi.preimage(elems[s]) is not None for s in T_OTHERS)),
        ("1/u not in Im(phi), consistently with the oracle",
         phi.preimage(elems["inv(u)"]) is None and span.membership(elems["inv(u)"]) == NOT_WITHIN_BOUND),
        ("normalization of the node NotFlat", norm.status == NOT_FLAT and norm.method == "fitting"),
        ("cover A -> B Etale", cover.status == ETALE),
        ("verdict NoSeparator", r.verdict == NO_SEPARATOR),
    ]
    verdict_line(5, "nodal cover: Im(phi) = Abar^3 by generator membership, Abar not flat over A, A -> B etale, "
                    "NoSeparator", checks)


# -- 6: invariant suites

CORPUS_SCHEMES = [("doubled_line", "D"), ("doubled_line", "D2"), ("ex71", "T"), ("crossing_lines", "T"),
                  ("trivial_glue", "T"), ("ex72", "T")]


def _groebner_stable(ideal: Ideal) -> bool:
    gb = buchberger(list(ideal.gens))
    if buchberger(list(reversed(ideal.gens))) != gb or buchberger(gb) != gb:
        return False
    probes = [g * h + g for g, h in itertools.product(ideal.gens[:3], ideal.ring.gens()[:3])]
    return all(normal_form(normal_form(f, gb), gb) == normal_form(f, gb) for f in probes)


def _fitting_chain_increases(phi) -> bool:
    M = module_presentation(phi)
    prev = None
    for k in range(M.ngens + 1):
        F = fitting_ideal(M, k)
        if prev is not None and not prev <= F:
            return False
        if F.is_unit():
            return True
        prev = F
    return False


def _module_finite_maps():
    """(name, map, flatness verdict) for every module-finite map of the corpus."""
    env72 = corpus_env("ex72")
    maps = [(n, m, None) for n, m in (("normalization", env72.maps["normalization"]),
                                      ("cover", env72.maps["cover"]),
                                      ("trivial_glue s", corpus_env("trivial_glue").maps["s"]))]
    for stem, name in CORPUS_SCHEMES:
        r = corpus_report(stem, name)
        if r.closure is None:
            continue
        maps += [(f"{stem} {name} U-side", r.closure.d1, r.flat_U), (f"{stem} {name} V-side", r.closure.d0, r.flat_V)]
    out = []
    for n, m, v in maps:
        if module_finite_witness(m) is not None:
            out.append((n, m, v or flatness(m, base_connected=True)))
    return out


def test_criterion_6_invariants():
    checks = []
    ideals = []
    for stem in ("ex71", "ex72", "crossing_lines", "doubled_line", "trivial_glue"):
        env = corpus_env(stem)
        ideals += [R.ideal for R in env.rings.values() if not R.ideal.is_zero()]
        for name in env.schemes:
            if (stem, name) in CORPUS_SCHEMES and corpus_report(stem, name).closure is not None:
                ideals.append(corpus_closure(stem, name).full.ideal)
    checks.append((f"Groebner determinism and idempotence on {len(ideals)} corpus ideals",
                   all(_groebner_stable(I) for I in ideals)))
    for stem, name in CORPUS_SCHEMES:
        T = corpus_env(stem).schemes[name]
        a, b = corpus_report(stem, name), separator_check(T.swap())
        checks.append((f"swap symmetry {stem} {name}", a.verdict == b.verdict))
        if a.verdict == SEPARATOR_EXISTS:
            E = a.separator.E
            checks.append((f"soundness {stem} {name}",
                           is_separated(E) and a.flat_U.status == FLAT and a.flat_V.status == FLAT))
    maps = _module_finite_maps()
    for name, phi, v in maps:
        checks.append((f"Fitting chain increases: {name}", _fitting_chain_increases(phi)))
        if v.status not in (FLAT, NOT_FLAT):
            continue
        for p, s in oracle_flatness(phi, (101, 103)).items():
            agrees = s["constant"] if v.status == FLAT else s["jump"] is not None
            checks.append((f"oracle GF({p}) agrees: {name} {v.status}", agrees))
    verdict_line(6, f"invariants: Groebner stability, swap symmetry, soundness, Fitting chains, "
                    f"oracle agreement on {len(maps)} module-finite corpus maps", checks)


# -- 7: the command line

def _sep(*args):
    return subprocess.Popen([sys.executable, "-m", "separator.cli.main", *args],
                            stdout=subprocess.PIPE, stderr=subprocess.PIPE)


def test_criterion_7_cli():
    first, second = _sep("corpus", "--format", "json"), _sep("corpus", "--format", "json")
    (out1, _), (out2, _) = first.communicate(), second.communicate()
    with tempfile.TemporaryDirectory() as tmp:
        bad = Path(tmp) / "mismatch.json"
        bad.write_text(json.dumps({"doubled_line.sep": {"separator D": "NoSeparator"},
                                   "trivial_glue.sep": {"check-separated T": "NotSeparated"}}))
        broken = Path(tmp) / "broken.sep"
        broken.write_text("ring A = QQ[x, y]\nmap f : A -> A { x -> y, y -> \n")
        files = [str(corpus_dir() / "doubled_line.sep"), str(corpus_dir() / "trivial_glue.sep")]
        mismatch = _sep("check", *files, "--format", "json", "--strict-expect", str(bad))
        error = _sep("check", str(broken))
        _, mismatch_err = mismatch.communicate()
        _, error_err = error.communicate()
    doc = json.loads(out1) if first.returncode == 0 else {}
    checks = [
        ("corpus run exits 0", first.returncode == 0 and second.returncode == 0),
        ("two JSON runs byte-identical", out1 == out2 and len(out1) > 0),
        ("report covers the whole corpus", [f["file"] for f in doc.get("files", [])]
         == [p.name for p in corpus_files()]),
        ("intentional mismatches exit 1", mismatch.returncode == 1 and mismatch_err.count(b"expectation mismatch") == 2),
        ("syntax error exits 2 with a position", error.returncode == 2 and b"line" in error_err),
    ]
    verdict_line(7, "CLI: byte-identical JSON across two corpus runs; exit codes 0/1/2", checks)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
