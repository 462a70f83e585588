"""The ``sep`` command.

    sep check FILE... [--format text|json] [--oracle 101,103] [--budget N] [--jobs N] [--strict-expect FILE]
    sep corpus [--list] [--format text|json] [--oracle ...]
    sep suite extension [--seed N] [--count N]
    sep print FILE

Exit status: 0 on a clean run, 1 when a verdict differs from ``--strict-expect``, 2 on errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from pathlib import Path

from ..cas import Budget, using_budget
from ..expr import ParseError
from .corpus import corpus_expectations, corpus_files
from .manifest import parse, print_manifest
from .runner import ManifestError, Options, render_text, run_manifest

SCHEMA = "separator-report/1"
EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2


def _primes(text: str) -> tuple:
    try:
        primes = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated primes, got {text!r}") from None
    return primes


def _run_file(path: Path, opts: Options, budget) -> dict:
    entry = {"file": path.name}
    ctx = using_budget(Budget(max_steps=budget)) if budget else nullcontext()
    with ctx:
        try:
            manifest = parse(path.read_text(encoding="utf-8"))
            entry["records"] = run_manifest(manifest, opts)
        except ParseError as exc:
            entry["error"] = f"line {exc.line}, column {exc.col}: {exc.message}"
        except ManifestError as exc:
            entry["error"] = str(exc)
        except OSError as exc:
            entry["error"] = f"cannot read {path}: {exc.strerror}"
    return entry


def _run_files(paths, opts: Options, budget, jobs: int = 1) -> list[dict]:
    """One entry per manifest, in input order; manifests share nothing, so they may run in parallel."""
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_file, paths, [opts] * len(paths), [budget] * len(paths)))
    return [_run_file(path, opts, budget) for path in paths]


def _compare(results: list[dict], expected: dict) -> list[str]:
    """Mismatches between recorded verdicts and the expectation table {file: {query: verdict}}."""
    problems = []
    by_file = {r["file"]: r for r in results}
    for fname, table in sorted(expected.items()):
        r = by_file.get(fname)
        if r is None:
            continue
        got = {rec["query"]: rec["verdict"] for rec in r.get("records", [])}
        for query, verdict in sorted(table.items()):
            if query not in got:
                problems.append(f"{fname}: no query {query!r}")
            elif got[query] != verdict:
                problems.append(f"{fname}: {query}: expected {verdict}, got {got[query]}")
    return problems


def _emit(results: list[dict], fmt: str, flags: dict, out) -> None:
    if fmt == "json":
        doc = {"schema": SCHEMA, "flags": flags, "files": results}
        out.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        return
    for r in results:
        out.write(f"== {r['file']} ==\n")
        if "error" in r:
            out.write(f"error: {r['error']}\n")
        else:
            text = render_text(r["records"])
            out.write(text + "\n" if text else "(no queries)\n")


def _check(paths, args, expected=None) -> int:
    opts = Options(oracle_primes=args.oracle or ())
    results = _run_files(paths, opts, args.budget, args.jobs)
    flags = {"oracle": list(opts.oracle_primes), "budget": args.budget}
    _emit(results, args.format, flags, sys.stdout)
    errors = [r for r in results if "error" in r]
    for r in errors:
        print(f"{r['file']}: {r['error']}", file=sys.stderr)
    if errors:
        return EXIT_ERROR
    if expected is not None:
        problems = _compare(results, expected)
        for p in problems:
            print(f"expectation mismatch: {p}", file=sys.stderr)
        if problems:
            return EXIT_MISMATCH
    return EXIT_OK


def cmd_check(args) -> int:
    expected = None
    if args.strict_expect:
        try:
            expected = json.loads(Path(args.strict_expect).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"cannot load expectations: {exc}", file=sys.stderr)
            return EXIT_ERROR
    return _check([Path(f) for f in args.files], args, expected)


def cmd_corpus(args) -> int:
    files = corpus_files()
    if args.list:
        for f in files:
            print(f.name)
        return EXIT_OK
    return _check(files, args, corpus_expectations())


def cmd_print(args) -> int:
    try:
        sys.stdout.write(print_manifest(parse(Path(args.file).read_text(encoding="utf-8"))))
    except ParseError as exc:
        print(f"{args.file}: line {exc.line}, column {exc.col}: {exc.message}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_suite(args) -> int:
    from ..suites import extension_suite

    summary = extension_suite(seed=args.seed, count=args.count, oracle_prime=101)
    if args.format == "json":
        print(json.dumps(summary, sort_keys=True, indent=2))
    else:
        print(f"one-generator flatness suite: {summary['tested']} regular instances, seed {summary['seed']}")
        print(f"  flat = unit ideal on every instance: {summary['coherent']}")
        print(f"  module-finite instances checked against GF(101) fiber lengths: {summary['oracle_checked']}, "
              f"all agree: {summary['oracle_agrees']}")
    return EXIT_OK if summary["coherent"] and summary["oracle_agrees"] else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sep", description="Separators of schemes glued from two affine charts.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--oracle", type=_primes, metavar="P1,P2", help="cross-check over these prime fields")
        p.add_argument("--budget", type=int, metavar="STEPS", help="Groebner reduction step limit")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
        p.add_argument("--jobs", type=int, default=1, metavar="N", help="run up to N manifests in parallel")

    p = sub.add_parser("check", help="run the queries of manifest files")
    p.add_argument("files", nargs="+")
    p.add_argument("--strict-expect", metavar="FILE", help="JSON table of expected verdicts")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("corpus", help="run the bundled example manifests against their recorded verdicts")
    p.add_argument("--list", action="store_true", help="only list the bundled manifests")
    common(p)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("print", help="parse a manifest and print it in normal form")
    p.add_argument("file")
    p.set_defaults(func=cmd_print)

    p = sub.add_parser("suite", help="randomized property suites")
    p.add_argument("name", choices=("extension",))
    p.add_argument("--count", type=int, default=50)
    common(p)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
