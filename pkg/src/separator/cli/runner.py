"""Evaluate a parsed manifest and answer its queries.

Each query produces a record ``{"query", "line", "verdict", "details"}``. Records hold only
strings, numbers, booleans, lists and dicts so that JSON output is reproducible byte for byte.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from ..cas import GF, QQ, Undecided
from ..expr import Context, evaluate
from ..flatness import FLAT, NOT_FLAT, flatness, is_etale
from ..oracle import BadPrime, TruncatedSpan, oracle_flatness
from ..rings import (FpAlgebra, IllDefinedMap, RingMap, is_surjective, localize, module_finite_witness,
                     ringmap_image, ringmap_kernel, unit_inverse)
from ..scheme import (ALREADY_SEPARATED, SEPARATOR_EXISTS, PointRef, SeparatorReport, TwoOpenScheme,
                      apparented, build_twisted, diagonal_closure, diagonal_dominant, glue, identified_in_separator,
                      open_subset, restriction_map, separator_check, twist_spec, visibly_domain)
from .manifest import (AssertDecl, GlueDecl, ImageDecl, LocalizeDecl, Manifest, MapDecl, PointDecl, PolyRingDecl,
                       Query, TwistDecl)


class ManifestError(Exception):
    """A declaration or query that cannot be evaluated; carries its source line."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class Options:
    oracle_primes: tuple = ()
    membership_bound: int = 4


@dataclass
class Environment:
    rings: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    schemes: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    connected: set = field(default_factory=set)  # ring names asserted connected
    integral: set = field(default_factory=set)  # ring names asserted integral
    reports: dict = field(default_factory=dict)  # cached separator reports per scheme
    spans: dict = field(default_factory=dict)  # cached oracle spans
    restrictions: dict = field(default_factory=dict)  # cached phi_UV per scheme
    closures: dict = field(default_factory=dict)  # cached diagonal closures per scheme


def _field_of(name: str):
    if name == "QQ":
        return QQ
    return GF(int(name[3:-1]))


def element(R: FpAlgebra, node, line: int = 0):
    """Evaluate an expression in R; ``inv`` is allowed for units of R only."""

    def inv(f):
        g = unit_inverse(R, f)
        if g is None:
            raise ManifestError(f"inv({f}) is not defined: {f} is not a unit in {R.describe()}", line)
        return g

    def var(name):
        try:
            return R.ring.gen(name)
        except KeyError:
            raise ManifestError(f"{name!r} is not a generator of {R.label or R.describe()}", line) from None

    try:
        return R.reduce(evaluate(node, Context(R.ring, var, inv)))
    except ValueError as exc:
        raise ManifestError(str(exc), line) from None


def _assignment_images(source: FpAlgebra, target: FpAlgebra, items, line: int, complete: bool) -> dict:
    out = {}
    for name, node in items:
        if name not in source.names:
            raise ManifestError(f"{name!r} is not a generator of the source ring", line)
        if name in out:
            raise ManifestError(f"image of {name!r} given twice", line)
        out[name] = element(target, node, line)
    if complete:
        missing = [n for n in source.names if n not in out]
        if missing:
            raise ManifestError(f"no image given for {', '.join(missing)}", line)
    return out


def declare(env: Environment, stmt) -> None:
    line = stmt.pos.line if stmt.pos else 0
    try:
        _declare(env, stmt, line)
    except ManifestError:
        raise
    except (ValueError, IllDefinedMap, KeyError) as exc:
        raise ManifestError(str(exc).strip('"'), line) from None


def _declare(env: Environment, stmt, line: int) -> None:
    if isinstance(stmt, PolyRingDecl):
        R = FpAlgebra(stmt.variables, (), _field_of(stmt.field), label=stmt.name)
        rels = [element(R, r, line) for r in stmt.relations]
        env.rings[stmt.name] = FpAlgebra(stmt.variables, rels, R.field, label=stmt.name)
    elif isinstance(stmt, ImageDecl):
        C, _, _ = ringmap_image(env.maps[stmt.map])
        C.label = stmt.name
        env.rings[stmt.name] = C
    elif isinstance(stmt, LocalizeDecl):
        A = env.rings[stmt.ring]
        Af, _ = localize(A, element(A, stmt.element, line))
        Af.label = stmt.name
        env.rings[stmt.name] = Af
    elif isinstance(stmt, MapDecl):
        S, T = env.rings[stmt.source], env.rings[stmt.target]
        images = _assignment_images(S, T, stmt.images, line, complete=True)
        env.maps[stmt.name] = RingMap(S, T, [images[n] for n in S.names], label=stmt.name)
    elif isinstance(stmt, TwistDecl):
        A = env.rings[stmt.ring]
        invert = [element(A, e, line) for e in stmt.invert]
        C0, inc = open_subset(A, invert)
        tau = _assignment_images(A, C0, stmt.tau, line, complete=False)
        inverse = None if stmt.inverse is None else _assignment_images(A, C0, stmt.inverse, line, complete=False)
        spec = twist_spec(A, invert, tau, inverse, open_ring=(C0, inc))
        env.schemes[stmt.name] = build_twisted(spec, name=stmt.name)
    elif isinstance(stmt, GlueDecl):
        A, B, C0 = env.rings[stmt.U], env.rings[stmt.V], env.rings[stmt.along]
        rU, rV = env.maps[stmt.rhoU], env.maps[stmt.rhoV]
        for side, m, src in (("rhoU", rU, A), ("rhoV", rV, B)):
            if m.source is not src or m.target is not C0:
                raise ManifestError(f"{side} must be a map {src.label} -> {C0.label}", line)
        invU = None if stmt.invertU is None else [element(A, e, line) for e in stmt.invertU]
        invV = None if stmt.invertV is None else [element(B, e, line) for e in stmt.invertV]
        env.schemes[stmt.name] = glue(A, B, C0, rU, rV, invU, invV, name=stmt.name)
    elif isinstance(stmt, PointDecl):
        env.points[stmt.name] = stmt
    elif isinstance(stmt, AssertDecl):
        if stmt.target in env.schemes:
            T = env.schemes[stmt.target]
            flag = "integral" if stmt.property == "integral" else "connected"
            env.schemes[stmt.target] = replace(T, **{flag: True})
        else:
            (env.integral if stmt.property == "integral" else env.connected).add(stmt.target)
            if stmt.property == "integral":
                env.connected.add(stmt.target)


def _connected(env: Environment, R: FpAlgebra) -> bool:
    return R.label in env.connected or visibly_domain(R)


def _point(env: Environment, T: TwoOpenScheme, name: str, line: int) -> PointRef:
    decl = env.points[name]
    R = T.chart(decl.chart)
    return PointRef(decl.chart, tuple(element(R, g, line) for g in decl.generators))


def _report(env: Environment, name: str) -> SeparatorReport:
    if name not in env.reports:
        env.reports[name] = separator_check(env.schemes[name])
    return env.reports[name]


def _restriction(env: Environment, name: str):
    if name not in env.restrictions:
        env.restrictions[name] = restriction_map(env.schemes[name])[0]
    return env.restrictions[name]


def _closure(env: Environment, name: str):
    if name not in env.closures:
        r = env.reports.get(name)
        env.closures[name] = r.closure if r is not None and r.closure is not None else \
            diagonal_closure(env.schemes[name])
    return env.closures[name]


def _oracle_check(verdict_status: str, survey: dict) -> dict:
    """Flat must give constant fiber lengths; NotFlat must show a jump."""
    out = {}
    for p, s in sorted(survey.items()):
        if verdict_status == FLAT:
            agrees = s["constant"]
        elif verdict_status == NOT_FLAT:
            agrees = s["jump"] is not None
        else:
            agrees = None
        out[str(p)] = dict(s, agrees=agrees)
    return out


def _flat_with_oracle(phi: RingMap, verdict, opts: Options) -> dict:
    d = verdict.to_dict()
    if opts.oracle_primes and verdict.method == "fitting" and module_finite_witness(phi) is not None:
        d["oracle"] = _oracle_check(verdict.status, oracle_flatness(phi, opts.oracle_primes))
    return d


def answer(env: Environment, q: Query, opts: Options) -> dict:
    line = q.pos.line if q.pos else 0
    rec = {"query": q.label, "line": line}
    try:
        verdict, details = _answer(env, q, opts, line)
    except Undecided as exc:
        verdict, details = "Undecided", {"reason": exc.reason}
    except ManifestError:
        raise
    except ValueError as exc:
        raise ManifestError(str(exc), line) from None
    rec["verdict"] = verdict
    rec["details"] = details
    return rec


def _answer(env: Environment, q: Query, opts: Options, line: int):
    k = q.kind
    if k in ("separator", "check-separator"):
        r = _report(env, q.args[0])
        d = r.to_dict()
        if opts.oracle_primes and r.closure is not None:
            for side, m, v in (("U", r.closure.d1, r.flat_U), ("V", r.closure.d0, r.flat_V)):
                if v is not None and v.method == "fitting" and module_finite_witness(m) is not None:
                    d[f"flat_over_{side}"]["oracle"] = _oracle_check(v.status, oracle_flatness(m, opts.oracle_primes))
        return r.verdict, d
    if k == "check-separated":
        sep = is_surjective(_restriction(env, q.args[0]))
        return ("Separated" if sep else "NotSeparated"), {}
    if k == "build-separator":
        T = env.schemes[q.args[0]]
        r = _report(env, q.args[0])
        if r.verdict == ALREADY_SEPARATED:
            return r.verdict, {"separator": {"gluing_ring": T.C0.describe(), "note": "T is separated; E = T",
                                             "h": "identity"}}
        if r.verdict != SEPARATOR_EXISTS:
            return r.verdict, r.to_dict()
        return r.verdict, {"separator": r.separator.describe()}
    if k == "dominant":
        return diagonal_dominant(env.schemes[q.args[0]]), {}
    if k == "closure":
        D = _closure(env, q.args[0])
        return D.C.describe(), D.describe()
    if k in ("apparented", "identified"):
        T = env.schemes[q.args[0]]
        x, y = (_point(env, T, n, line) for n in q.args[1:])
        if k == "apparented":
            return ("Apparented" if apparented(T, x, y) else "NotApparented"), {}
        return identified_in_separator(T, x, y, _report(env, q.args[0])), {}
    if k == "flat":
        phi = env.maps[q.args[0]]
        v = flatness(phi, _connected(env, phi.source))
        return v.status, _flat_with_oracle(phi, v, opts)
    if k == "etale":
        phi = env.maps[q.args[0]]
        v = is_etale(phi, _connected(env, phi.source))
        d = v.to_dict()
        if v.flat is not None:
            d["flat"] = _flat_with_oracle(phi, v.flat, opts)
        return v.status, d
    if k == "kernel":
        phi = env.maps[q.args[0]]
        extra = [g for g in ringmap_kernel(phi).groebner() if not phi.source.ideal.contains(g)]
        return ("(" + ", ".join(map(str, extra)) + ")" if extra else "(0)"), {}
    if k == "image":
        C, _, _ = ringmap_image(env.maps[q.args[0]])
        return C.describe(), {}
    if k == "member":
        name = q.args[0]
        if name in env.maps:
            phi = env.maps[name]
        else:
            phi = _restriction(env, name)
        f = element(phi.target, q.expr, line)
        pre = phi.preimage(f)
        d = {"element": str(f)}
        if pre is not None:
            d["preimage"] = str(pre)
        if opts.oracle_primes:
            d["oracle"] = {}
            for p in opts.oracle_primes:
                key = (name, p, opts.membership_bound)
                try:
                    if key not in env.spans:
                        env.spans[key] = TruncatedSpan(phi.images, opts.membership_bound, p, phi.target)
                    found = f in env.spans[key]
                except BadPrime as exc:
                    d["oracle"][str(p)] = {"skipped": str(exc)}
                    continue
                # a hit over GF(p) must not contradict an exact "not a member"
                d["oracle"][str(p)] = {"bound": opts.membership_bound, "found": found,
                                       "agrees": pre is not None or not found}
        return ("Member" if pre is not None else "NotMember"), d
    raise ManifestError(f"unsupported query {k!r}", line)


def run_manifest(m: Manifest, opts: Optional[Options] = None) -> list[dict]:
    opts = opts or Options()
    env = Environment()
    records = []
    for stmt in m.statements:
        if isinstance(stmt, Query):
            records.append(answer(env, stmt, opts))
        else:
            declare(env, stmt)
    return records


# -- text rendering

CRITERION = "two-chart criterion"


def _flat_line(side: str, v: dict) -> str:
    status = {"Flat": "FLAT", "NotFlat": "NOT FLAT", "Undecided": "UNDECIDED"}[v["status"]]
    how = {"hypersurface": "one-generator criterion", "fitting": "Fitting ideals", "trivial": "isomorphism"}
    out = f"  {CRITERION}: Im(phi) flat over Gamma({side})? {status} [{how.get(v['method'], v['method'])}]"
    if "witness" in v:
        out += f", witness ideal {v['witness']}"
    if "reason" in v:
        out += f" ({v['reason']})"
    for p, o in sorted(v.get("oracle", {}).items()):
        out += f"\n    oracle GF({p}): fiber lengths {o['lengths']} over {o['points']} points, agrees={o['agrees']}"
    return out


def render_text(records: Sequence[dict]) -> str:
    lines = []
    for r in records:
        lines.append(f"{r['query']}: {r['verdict']}")
        d = r["details"]
        kind = r["query"].split()[0]
        if kind in ("separator", "check-separator"):
            if "closure" in d:
                lines.append(f"  Im(phi) = {d['closure']['C']}")
            for side, key in (("U", "flat_over_U"), ("V", "flat_over_V")):
                if key in d:
                    lines.append(_flat_line(side, d[key]))
            if "separator" in d:
                lines.append(f"  E glued along {d['separator']['gluing_ring']}")
            if d.get("reason"):
                lines.append(f"  reason: {d['reason']}")
        elif kind == "build-separator" and "separator" in d:
            for key, val in sorted(d["separator"].items()):
                lines.append(f"  {key}: {val}")
        elif kind in ("flat", "etale"):
            v = d.get("flat", d) if kind == "etale" else d
            if "witness" in v:
                lines.append(f"  witness ideal {v['witness']}")
            if "rank" in v:
                lines.append(f"  rank {v['rank']}")
            for p, o in sorted(v.get("oracle", {}).items()):
                lines.append(f"  oracle GF({p}): fiber lengths {o['lengths']}, agrees={o['agrees']}")
            if d.get("reason"):
                lines.append(f"  reason: {d['reason']}")
        elif kind == "member":
            if "preimage" in d:
                lines.append(f"  preimage {d['preimage']}")
            for p, o in sorted(d.get("oracle", {}).items()):
                lines.append(f"  oracle GF({p}): {o}")
        elif "reason" in d:
            lines.append(f"  reason: {d['reason']}")
    return "\n".join(lines)


__all__ = ["ManifestError", "Options", "Environment", "run_manifest", "render_text", "element", "declare",
           "answer"]
